from setuptools import setup
from os import path
import re

here = path.abspath(path.dirname(__file__))

# Parse version
with open(path.join(here, 'netresid', '__init__.py')) as f:
    version = re.findall(r"__version__ = '(.+)'", f.read())[0]

with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_desc = f.read()

setup(
    name='netresid',
    packages=['netresid'],

    install_requires=['numpy>=1.20', 'scipy>=1.8', 'scikit-learn>=1.0', 'pandas>=1.3'],
    extras_require={'test': ['pytest>=6']},
    python_requires='>=3.8',

    entry_points={
        'console_scripts': ['netresid=netresid.cli:main'],
    },

    version=version,

    description='Goodness-of-fit of logistic regression on networks via a block model residual term',

    long_description=long_desc,
    long_description_content_type='text/markdown',

    license='MIT',

    # See https://pypi.org/classifiers
    classifiers=[
        'Development Status :: 4 - Beta',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',

        'License :: OSI Approved :: MIT License',

        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],

    keywords='network logistic regression stochastic block model variational bayes graphon',
)
