"""
Goodness-of-fit for logistic regression on networks.

A logistic regression on edge covariates is extended with a stochastic block
model residual term and fitted for ``K = 1..K_max`` blocks by variational
Bayes EM. The approximate posterior probability of ``K = 1`` is the
probability that no residual structure is left once the covariates are
accounted for.
"""

import numpy as np

__version__ = '1.0.0'


def derive_seed(master, *path):
    """
    Derive an integer seed for the job identified by ``path`` (e.g. ``(K, restart)``
    or ``(cell, replicate)``) from a master seed. The result depends only on
    its arguments, never on which worker runs the job.
    """
    entropy = [int(master)] + [int(p) for p in path]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


from . import exception
from .namedtuple import Hyperparameters, FitOptions, SimConfig, FitResult, RunManifest, GraphonGrid
from .graph import Network, NodeDescriptorTable, code_covariates, read_network
from .vbem import VariationalState, fit_single, fit_model, logistic_lambda, lower_bound
from .select import model_posterior, gof, summarize
from .graphon import export_grid, residual_phi_at, identifiability_order, dirichlet_joint_cdf
from .simulate import simulate_network, sweep
