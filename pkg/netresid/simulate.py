"""
Synthetic networks from the W-graph ``W(u, v) = rho * lam**2 * (u * v)**(lam - 1)``
with Gaussian node covariates, and calibration sweeps over ``(n, rho, lam)``.

``lam = 1`` gives a constant ``W`` and therefore data without residual
structure.
"""

import logging
import math

import numpy as np
import pandas as pd
from scipy.special import expit, logit

from . import exception, derive_seed
from .graph import Network
from .loop import WorkerPool
from .namedtuple import SimConfig, FitOptions, Hyperparameters
from .select import summarize
from .vbem import fit_model

_log = logging.getLogger(__name__)

SWEEP_COLUMNS = ['n', 'rho', 'lambda', 'replicate', 'seed', 'p_H0', 'bayes_factor', 'runtime_s', 'error']


def check_config(config):
    if config.n is None or int(config.n) < 2:
        raise exception.BadConfig('need at least 2 nodes, got %r' % config.n, 'n')
    if config.rho is None or not config.rho > 0:
        raise exception.BadConfig('must be positive, got %r' % config.rho, 'rho')
    if not config.lam >= 1:
        raise exception.BadConfig('must be >= 1, got %r' % config.lam, 'lam')
    if config.rho * config.lam ** 2 > 1:
        raise exception.BadConfig('rho * lam^2 = %.4g exceeds 1; W must be a probability'
                                  % (config.rho * config.lam ** 2), 'rho')
    if config.d < 0:
        raise exception.BadConfig('must be >= 0', 'd')
    if config.beta is not None and len(config.beta) != config.d:
        raise exception.BadConfig('needs %d coefficients, got %d' % (config.d, len(config.beta)), 'beta')
    return config


def w_graph(u, v, rho, lam):
    """ ``rho * lam^2 * (u v)^(lam - 1)`` """
    return rho * lam ** 2 * np.power(np.multiply(u, v), lam - 1.0)


def residual_phi(u, v, rho, lam):
    """ The logit-scale residual structure ``g^-1(W(u, v))``. """
    return logit(w_graph(u, v, rho, lam))


def simulate_network(config):
    """
    Draw one network.

    :type config: :class:`.SimConfig`
    :return: ``(network, U)`` where ``U`` holds the latent positions of the nodes
    """
    config = check_config(config)
    n, d = int(config.n), int(config.d)
    beta = np.zeros(d) if config.beta is None else np.asarray(config.beta, dtype=float)
    rng = np.random.default_rng(config.seed)

    U = rng.uniform(0.0, 1.0, size=n)
    nodes = rng.standard_normal((n, d))

    # x_ij = x_i - x_j for i < j, stored for both orders
    diff = nodes[:, None, :] - nodes[None, :, :]
    iu = np.triu_indices(n, k=1)
    x = np.zeros((n, n, d))
    x[iu] = diff[iu]
    x[iu[1], iu[0]] = diff[iu]

    with np.errstate(divide='ignore'):
        phi = residual_phi(U[:, None], U[None, :], config.rho, config.lam)
    p = expit(x @ beta + phi)

    y = np.zeros((n, n))
    y[iu] = rng.uniform(size=iu[0].size) < p[iu]
    y = y + y.T

    names = ['x%d' % (k + 1) for k in range(d)]
    return Network(y, x if d else None, covariate_names=names), U


def calibration_design():
    """
    The full calibration grid: ``n`` in {100, 150}, ``rho`` in {1e-2, 10^-1.5, 1e-1}
    and 20 values of ``lam`` evenly spaced in [1, 5], leaving out the cells
    where ``rho * lam^2 > 1``.

    :return: list of ``(n, rho, lam)``
    """
    design = []
    for n in (100, 150):
        for rho in (1e-2, 10 ** -1.5, 1e-1):
            for lam in np.linspace(1.0, 5.0, 20):
                if rho * lam ** 2 <= 1:
                    design.append((n, rho, float(lam)))
    return design


def read_design(path):
    """ A design CSV with columns ``n, rho, lambda``. """
    table = pd.read_csv(path)
    missing = {'n', 'rho', 'lambda'} - set(table.columns)
    if missing:
        raise exception.BadConfig('design file lacks column(s) %s' % ', '.join(sorted(missing)), str(path))
    return [(int(r.n), float(r.rho), float(r['lambda'])) for _, r in table.iterrows()]


def _replicate(n, rho, lam, d, beta, seed, hyper, options):
    network, _ = simulate_network(SimConfig(n=n, rho=rho, lam=lam, d=d, beta=beta, seed=seed))
    fits = fit_model(network, hyper, seed=seed, options=options, strict=False)
    return summarize(fits, hyper, network)


def sweep(design, replicates, options=None, hyper=None, seed=0, threads=1, d=2, beta=None):
    """
    Simulate ``replicates`` networks per design cell, fit each and tabulate
    ``p(H0|Y)``. Replicates run on ``threads`` worker threads, each with a seed
    derived from ``(seed, cell, replicate)``; a failed replicate is recorded in
    the ``error`` column and the sweep goes on.

    :param design: list of ``(n, rho, lam)``
    :return: :class:`pandas.DataFrame` with columns :data:`SWEEP_COLUMNS`
    """
    design = list(design)
    if not design:
        raise exception.BadConfig('design is empty', 'design')
    if replicates < 1:
        raise exception.BadConfig('must be >= 1, got %r' % replicates, 'replicates')

    hyper = hyper or Hyperparameters()
    # parallelism is at the replicate level
    options = (options or FitOptions())._replace(threads=1)

    tasks, seeds = [], {}
    for c, (n, rho, lam) in enumerate(design):
        check_config(SimConfig(n=n, rho=rho, lam=lam, d=d, beta=beta))
        for r in range(replicates):
            s = seeds[(c, r)] = derive_seed(seed, c, r)
            tasks.append(((c, r), _replicate, (n, rho, lam, d, beta, s, hyper, options)))

    rows = []
    for (c, r), outcome in WorkerPool(threads).map(tasks):
        n, rho, lam = design[c]
        row = {'n': n, 'rho': rho, 'lambda': lam, 'replicate': r, 'seed': seeds[(c, r)],
               'runtime_s': outcome.runtime}
        if outcome.ok:
            result = outcome.value
            row.update(p_H0=result.p_H0,
                       bayes_factor=math.inf if result.bayes_factor_infinite else result.bayes_factor_01,
                       error=None)
        else:
            _log.warning('Replicate %d of cell (n=%d, rho=%g, lam=%g) failed: %s', r, n, rho, lam, outcome.error)
            row.update(p_H0=np.nan, bayes_factor=np.nan, error=str(outcome.error))
        rows.append(row)
        if r == replicates - 1:
            _log.info('Cell n=%d rho=%g lam=%g done', n, rho, lam)

    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)
