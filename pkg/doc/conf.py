# Configuration file for the Sphinx documentation builder.

import sys
import os
from datetime import datetime

sys.path.insert(0, os.path.abspath('..'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode',
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
    'pandas': ('https://pandas.pydata.org/docs', None),
}

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = 'netresid'
year = datetime.now().year
copyright = '%d, The netresid developers' % year
author = 'The netresid developers'

from netresid import __version__
version = __version__
release = __version__

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

pygments_style = 'tango'

autodoc_member_order = 'bysource'

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'

html_theme_options = {
    'display_version': True,
}

htmlhelp_basename = 'netresiddoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (master_doc, 'netresid.tex', 'netresid Documentation',
     author, 'manual'),
]

man_pages = [
    (master_doc, 'netresid', 'netresid Documentation',
     [author], 1)
]
