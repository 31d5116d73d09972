"""
Model-averaged posterior mean of the residual structure ``phi(u, v)``.

A block model with ``K`` blocks and stick positions
``0 = sigma_0 <= sigma_1 <= ... <= sigma_K = 1``, ``sigma_k = pi_1 + ... + pi_k``,
puts ``u`` in block ``k`` when ``sigma_{k-1} <= u < sigma_k`` (the last block
also takes ``u = 1``). Under ``pi ~ Dir(e)`` the probability that ``u`` falls
in block ``k`` and ``v`` in block ``l`` telescopes into the joint CDFs
``F_kl(u, v) = P(sigma_k <= u, sigma_l <= v)``::

    w_kl = F_{k-1,l-1} - F_{k,l-1} - F_{k-1,l} + F_{k,l}

with ``F_{K,.}`` and ``F_{.,K}`` taken as zero.
"""

import logging

import numpy as np
from scipy import stats
from scipy.special import expit

from . import exception, derive_seed
from .loop import WorkerPool
from .namedtuple import GraphonGrid

_log = logging.getLogger(__name__)

_default_graphon_params = dict(resolution=101, n_samples=100000)


class DirichletCDF():
    """
    Joint CDFs of the stick positions of ``Dir(e)``, estimated from one set of
    ``n_samples`` draws that is shared by every evaluation. With ``exact=True``
    (only for ``K <= 2``) Beta CDFs are used instead of samples.
    """

    def __init__(self, e, n_samples=100000, seed=0, exact=False):
        e = np.asarray(e, dtype=float)
        if e.ndim != 1 or e.size < 1 or np.any(e <= 0):
            raise exception.BadConfig('must be a positive vector', 'e')
        self._e = e
        self._exact = exact
        if exact:
            if e.size > 2:
                raise exception.BadConfig('exact joint CDF is only available for K <= 2', 'exact')
            self._sigma = None
            return

        if n_samples < 1:
            raise exception.BadConfig('must be >= 1, got %r' % n_samples, 'n_samples')
        rng = np.random.default_rng(seed)
        pi = rng.dirichlet(e, size=int(n_samples))
        sigma = np.zeros((int(n_samples), e.size + 1))
        sigma[:, 1:] = np.cumsum(pi, axis=1)
        sigma[:, -1] = 1.0
        sigma.setflags(write=False)
        self._sigma = sigma

    @property
    def K(self):
        return self._e.size

    @property
    def n_samples(self):
        return None if self._sigma is None else self._sigma.shape[0]

    def _marginal(self, k):
        """ ``sigma_k ~ Beta(e_1 + ... + e_k, e_{k+1} + ... + e_K)``; degenerate at the ends """
        K = self.K
        if k == 0:
            return lambda x: np.where(np.asarray(x) >= 0, 1.0, 0.0)
        if k == K:
            return lambda x: np.where(np.asarray(x) >= 1, 1.0, 0.0)
        return stats.beta(self._e[:k].sum(), self._e[k:].sum()).cdf

    def cdf(self, k, l, u, v):
        """ ``P(sigma_k <= u, sigma_l <= v)`` """
        K = self.K
        if not 0 <= k <= l <= K:
            raise exception.BadConfig('need 0 <= k <= l <= K, got k=%r l=%r K=%r' % (k, l, K), 'k')
        if self._exact:
            return float(self._exact_pair(k, l, np.array([u]), np.array([v]))[0, 0])
        s = self._sigma
        return float(np.mean((s[:, k] <= u) & (s[:, l] <= v)))

    def _exact_pair(self, k, l, us, vs):
        """ ``F_kl`` on the grid ``us x vs``, for ``K <= 2``. """
        if k == l:
            f = self._marginal(k)
            return f(np.minimum.outer(us, vs))
        # k < l and K <= 2: one of the two is a boundary and independent of the other
        return np.multiply.outer(self._marginal(k)(us), self._marginal(l)(vs))

    def cdf_table(self, us, vs):
        """
        ``F[k, l, a, b] = P(sigma_k <= us[a], sigma_l <= vs[b])`` for all ``0 <= k, l <= K``.

        ``us`` and ``vs`` must be sorted ascending.
        """
        us = np.asarray(us, dtype=float)
        vs = np.asarray(vs, dtype=float)
        K = self.K
        F = np.empty((K + 1, K + 1, us.size, vs.size))

        if self._exact:
            for k in range(K + 1):
                for l in range(K + 1):
                    F[k, l] = self._exact_pair(k, l, us, vs) if k <= l \
                        else self._exact_pair(l, k, vs, us).T
            return F

        s = self._sigma
        n = s.shape[0]
        iu = [np.searchsorted(us, s[:, k], side='left') for k in range(K + 1)]
        iv = [np.searchsorted(vs, s[:, l], side='left') for l in range(K + 1)]
        shape = (us.size + 1, vs.size + 1)
        for k in range(K + 1):
            for l in range(K + 1):
                counts = np.bincount(iu[k] * shape[1] + iv[l], minlength=shape[0] * shape[1]).reshape(shape)
                F[k, l] = counts.cumsum(axis=0).cumsum(axis=1)[:-1, :-1] / n
        return F

    def block_weights(self, us, vs):
        """
        ``w[k, l, a, b]``: probability that ``us[a]`` falls in block ``k`` and
        ``vs[b]`` in block ``l``. Sums to one over ``(k, l)``.
        """
        F = self.cdf_table(us, vs)
        F[-1, :] = 0.0
        F[:, -1] = 0.0
        return F[:-1, :-1] - F[1:, :-1] - F[:-1, 1:] + F[1:, 1:]


def dirichlet_joint_cdf(k, l, u, v, e, n_samples=100000, seed=0):
    """
    Monte Carlo estimate of ``P(sigma_k <= u, sigma_l <= v)`` for ``pi ~ Dir(e)``.

    For repeated evaluations build one :class:`DirichletCDF` and reuse it.
    """
    return DirichletCDF(e, n_samples, seed).cdf(k, l, u, v)


def identifiability_order(state):
    """
    Reorder the blocks of a fitted state so that the weighted row means
    ``sum_l e_l / sum(e) * m_alpha[k, l]`` are non-decreasing in ``k``; ties are
    broken by ascending ``e_k``.
    """
    order = np.lexsort((state.e_n, row_means(state)))
    return state.permuted(order)


def row_means(state):
    w = state.e_n / state.e_n.sum()
    return state.m_alpha @ w


def _phi_table(state, us, vs, n_samples, seed, use_prior_e, exact):
    e = np.full(state.K, state.hyper.e0) if use_prior_e else state.e_n
    w = DirichletCDF(e, n_samples, seed, exact=exact).block_weights(us, vs)
    return np.einsum('kl,klab->ab', state.m_alpha, w)


def _averaged(states, posterior):
    """ ``(K, weight, ordered state)`` for every model with posterior mass and a state """
    out = []
    for K in sorted(posterior):
        p = posterior[K]
        if p <= 0:
            continue
        if states.get(K) is None:
            _log.warning('No state for K=%d (posterior %.3g); left out of the average', K, p)
            continue
        out.append((K, p, identifiability_order(states[K])))
    total = sum(p for _, p, _ in out)
    if total <= 0:
        raise exception.ContractViolation('no fitted state carries posterior mass')
    return [(K, p / total, s) for K, p, s in out]


def residual_phi_at(u, v, states, posterior, n_samples=100000, seed=0, use_prior_e=False, exact=False):
    """
    Posterior mean of ``phi(u, v)``, averaged over models.

    :param states: ``{K: VariationalState}``
    :param posterior: ``{K: p(M_K | Y)}``
    :param use_prior_e:
        evaluate the stick CDFs at the prior concentration ``e0`` instead of
        the fitted ``e_n``
    :param exact: use Beta CDFs (``K <= 2`` only) instead of Monte Carlo
    """
    if u > v:
        u, v = v, u
    phi = 0.0
    for K, p, state in _averaged(states, posterior):
        table = _phi_table(state, np.array([u]), np.array([v]), n_samples,
                           derive_seed(seed, K), use_prior_e, exact and K <= 2)
        phi += p * table[0, 0]
    return float(phi)


def export_grid(states, posterior, resolution=None, n_samples=None, seed=0,
                use_prior_e=False, exact=False, threads=1):
    """
    Evaluate the averaged residual structure on a ``G x G`` grid of
    ``[0, 1]^2``, on the logit scale and through ``g``.

    :param resolution: ``G``, 101 by default; ``G = 1`` evaluates the single point ``(0, 0)``
    :param n_samples: Dirichlet draws shared within each ``K``
    :param threads: models are evaluated on this many worker threads

    :return: :class:`.GraphonGrid`
    """
    resolution = _default_graphon_params['resolution'] if resolution is None else int(resolution)
    n_samples = _default_graphon_params['n_samples'] if n_samples is None else int(n_samples)
    if resolution < 1:
        raise exception.BadConfig('must be >= 1, got %r' % resolution, 'resolution')
    if n_samples < 1:
        raise exception.BadConfig('must be >= 1, got %r' % n_samples, 'n_samples')

    grid = np.linspace(0.0, 1.0, resolution)
    models = _averaged(states, posterior)

    tasks = [(K, _phi_table, (state, grid, grid, n_samples, derive_seed(seed, K), use_prior_e, exact and K <= 2))
             for K, _, state in models]
    weights = {K: p for K, p, _ in models}

    phi = np.zeros((resolution, resolution))
    for K, outcome in WorkerPool(threads).map(tasks):
        if not outcome.ok:
            raise outcome.error
        phi += weights[K] * outcome.value

    upper = np.triu(phi)
    phi = upper + np.triu(phi, k=1).T

    _log.info('Residual grid %dx%d over K=%s', resolution, resolution, sorted(weights))
    return GraphonGrid(resolution=resolution, u=grid, v=grid.copy(), phi_hat=phi, g_phi_hat=expit(phi))
