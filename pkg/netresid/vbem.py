"""
Variational Bayes EM for the logistic regression model with a stochastic
block model residual term, for a fixed number of blocks ``K``.

One iteration of :func:`fit_single` runs the E step (``q(Z)``), the M sweep
(``q(pi)``, ``q(gamma)``, ``q(eta)``, ``q(beta)``, ``q(alpha)``, in that
order), records the closed-form lower bound, and finally re-optimizes the
logistic bound parameters ``xi``.

All sums over pairs run over ordered pairs ``i != j``.
"""

import collections
import logging
import math
import warnings

import numpy as np
from scipy import integrate, stats
from scipy.special import digamma, gammaln, log_expit
from sklearn.cluster import KMeans

from . import exception, derive_seed
from .loop import WorkerPool
from .namedtuple import Hyperparameters, FitOptions

_log = logging.getLogger(__name__)

_SMALL_XI = 1e-8

_default_fit_params = dict(tol=1e-6, max_iter=500, n_restarts=2, threads=1,
                           perturbation=0.3, tau_floor=1e-10)

# phases of a VariationalState
PHASE_INIT = 'init'
PHASE_E = 'e'
PHASE_PARTIAL = 'partial'
PHASE_M = 'm'
PHASE_XI = 'xi'


def logistic_lambda(xi):
    """
    ``lambda(xi) = (g(xi) - 1/2) / (2 xi)``, with its limit ``1/8`` for
    ``xi < 1e-8``. Accepts scalars or arrays.
    """
    a = np.asarray(xi, dtype=float)
    if np.any(a < 0):
        raise exception.BadConfig('xi must be nonnegative', 'xi')
    small = a < _SMALL_XI
    safe = np.where(small, 1.0, a)
    # g(x) - 1/2 = tanh(x/2) / 2
    out = np.where(small, 0.125, np.tanh(safe / 2.0) / (4.0 * safe))
    if np.ndim(xi) == 0:
        return float(out)
    return out


def check_hyperparameters(hyper):
    for name in ('a0', 'b0', 'c0', 'd0', 'e0'):
        v = getattr(hyper, name)
        if not v > 0 or not math.isfinite(v):
            raise exception.BadConfig('must be a positive real, got %r' % v, name)
    if hyper.k_max < 1:
        raise exception.BadConfig('must be >= 1, got %r' % hyper.k_max, 'k_max')
    if not 0 < hyper.p_h0 <= 1:
        raise exception.BadConfig('must lie in (0, 1], got %r' % hyper.p_h0, 'p_h0')
    if hyper.model_prior is not None:
        prior = np.asarray(hyper.model_prior, dtype=float)
        if prior.shape != (hyper.k_max,) or np.any(prior < 0) or not np.isclose(prior.sum(), 1.0):
            raise exception.BadConfig('must be a probability vector of length k_max', 'model_prior')
    return hyper


def model_prior(hyper):
    """
    Prior over ``K = 1..K_max``: ``p(M_1) = p(H0)`` and the remaining mass split
    equally over ``K >= 2``. An explicit ``hyper.model_prior`` takes precedence.

    :return: array of length ``K_max``; entry ``K - 1`` is ``p(M_K)``
    """
    if hyper.model_prior is not None:
        return np.asarray(hyper.model_prior, dtype=float)
    if hyper.k_max == 1:
        return np.ones(1)
    prior = np.full(hyper.k_max, (1.0 - hyper.p_h0) / (hyper.k_max - 1))
    prior[0] = hyper.p_h0
    return prior


def check_options(options):
    if options.tol <= 0:
        raise exception.BadConfig('must be positive', 'tol')
    if options.max_iter < 1:
        raise exception.BadConfig('must be >= 1', 'max_iter')
    if options.n_restarts < 1:
        raise exception.BadConfig('must be >= 1', 'n_restarts')
    if options.threads < 1:
        raise exception.BadConfig('must be >= 1', 'threads')
    if not 0 <= options.perturbation <= 1:
        raise exception.BadConfig('must lie in [0, 1]', 'perturbation')
    return options


class VariationalState():
    """
    Parameters of every variational factor for one ``K``:

    - ``tau`` (``n x K``): ``q(Z_i) = M(1, tau_i)``
    - ``e_n`` (``K``): ``q(pi) = Dir(e_n)``
    - ``m_beta`` (``d``), ``S_beta`` (``d x d``): ``q(beta) = N(m_beta, S_beta)``
    - ``a_n``, ``b_n``: ``q(gamma) = Gam(a_n, b_n)``
    - ``c_n``, ``d_n``: ``q(eta) = Gam(c_n, d_n)``
    - ``m_alpha``, ``sigma2_alpha`` (``K x K``, symmetric): independent Gaussians on ``alpha_kl``, ``k <= l``
    - ``xi`` (``n x n``, symmetric): logistic bound parameters

    ``S_beta_inv`` keeps the precision matrix ``q(beta)`` was computed from.
    A state is owned by one fit and is not thread-safe.
    """

    def __init__(self, hyper, tau, e_n, m_beta, S_beta, a_n, b_n, c_n, d_n,
                 m_alpha, sigma2_alpha, xi, S_beta_inv=None, phase=PHASE_INIT):
        self.hyper = hyper
        self.tau = np.asarray(tau, dtype=float)
        self.e_n = np.asarray(e_n, dtype=float)
        self.m_beta = np.asarray(m_beta, dtype=float)
        self.S_beta = np.asarray(S_beta, dtype=float)
        self.S_beta_inv = (np.linalg.inv(self.S_beta) if self.S_beta.size else self.S_beta.copy()) \
            if S_beta_inv is None else np.asarray(S_beta_inv, dtype=float)
        self.a_n = float(a_n)
        self.b_n = float(b_n)
        self.c_n = float(c_n)
        self.d_n = float(d_n)
        self.m_alpha = np.asarray(m_alpha, dtype=float)
        self.sigma2_alpha = np.asarray(sigma2_alpha, dtype=float)
        self.xi = np.asarray(xi, dtype=float)
        self.phase = phase

    @classmethod
    def from_prior(cls, network, K, hyper, tau):
        """
        A state whose parameter factors sit at their priors, with the given ``tau``.
        """
        d = network.d
        n = network.n
        return cls(hyper,
                   tau=tau,
                   e_n=update_pi(tau, hyper.e0),
                   m_beta=np.zeros(d),
                   S_beta=np.eye(d) * (hyper.d0 / hyper.c0),
                   a_n=hyper.a0, b_n=hyper.b0,
                   c_n=hyper.c0, d_n=hyper.d0,
                   m_alpha=np.zeros((K, K)),
                   sigma2_alpha=np.full((K, K), hyper.b0 / hyper.a0),
                   xi=np.ones((n, n)))

    @property
    def K(self):
        return self.tau.shape[1]

    @property
    def n(self):
        return self.tau.shape[0]

    @property
    def d(self):
        return self.m_beta.shape[0]

    @property
    def expected_alpha2(self):
        """ ``E[alpha_kl^2] = m_kl^2 + sigma2_kl`` """
        return self.m_alpha ** 2 + self.sigma2_alpha

    @property
    def expected_log_pi(self):
        return digamma(self.e_n) - digamma(self.e_n.sum())

    def copy(self):
        return VariationalState(self.hyper, self.tau.copy(), self.e_n.copy(), self.m_beta.copy(),
                                self.S_beta.copy(), self.a_n, self.b_n, self.c_n, self.d_n,
                                self.m_alpha.copy(), self.sigma2_alpha.copy(), self.xi.copy(),
                                self.S_beta_inv.copy(), self.phase)

    def permuted(self, order):
        """ A copy with blocks reordered so that new block ``k`` is old block ``order[k]``. """
        order = np.asarray(order)
        s = self.copy()
        s.tau = self.tau[:, order]
        s.e_n = self.e_n[order]
        s.m_alpha = self.m_alpha[np.ix_(order, order)]
        s.sigma2_alpha = self.sigma2_alpha[np.ix_(order, order)]
        return s

    def __repr__(self):
        return 'VariationalState(n=%d, K=%d, d=%d, phase=%r)' % (self.n, self.K, self.d, self.phase)


def _centered(network):
    r = network.adjacency - 0.5
    np.fill_diagonal(r, 0.0)
    return r


def _lam(xi):
    lam = logistic_lambda(xi)
    np.fill_diagonal(lam, 0.0)
    return lam


def _xb(network, m_beta):
    """ ``x_ij^T m_beta`` for every pair. """
    if network.d == 0:
        return np.zeros((network.n, network.n))
    return network.covariates @ m_beta


def e_step(state, network, floor=1e-10):
    """
    Update every ``q(Z_i)`` in turn (each update sees the rows already
    updated). Works in log space with max-subtraction; entries below ``floor``
    are raised to it and the row renormalized.

    :return: the new ``tau`` (also stored in ``state``)
    """
    K = state.K
    n = state.n
    if K == 1:
        state.tau = np.ones((n, 1))
        state.phase = PHASE_E
        return state.tau

    lam = _lam(state.xi)
    b = _centered(network) - 2.0 * lam * _xb(network, state.m_beta)
    m = state.m_alpha
    ea2 = state.expected_alpha2
    elog = state.expected_log_pi

    tau = state.tau.copy()
    for i in range(n):
        s = m @ (b[i] @ tau) - ea2 @ (lam[i] @ tau) + elog
        s -= s.max()
        t = np.exp(s)
        t /= t.sum()
        if floor:
            t = np.maximum(t, floor)
            t /= t.sum()
        tau[i] = t

    state.tau = tau
    state.phase = PHASE_E
    return tau


def update_pi(tau, e0):
    """ ``e_k = e0 + sum_i tau_ik`` """
    return e0 + np.asarray(tau).sum(axis=0)


def update_beta(state, network):
    """
    Gaussian factor of the regression coefficients.

    :return: ``(m_beta, S_beta, S_beta_inv)``; empty arrays when ``d = 0``
    """
    d = network.d
    if d == 0:
        return np.zeros(0), np.zeros((0, 0)), np.zeros((0, 0))

    x = network.covariates
    lam = _lam(state.xi)
    precision = (state.c_n / state.d_n) * np.eye(d) + np.einsum('ij,ijd,ije->de', lam, x, x)
    precision = 0.5 * (precision + precision.T)

    tmt = state.tau @ state.m_alpha @ state.tau.T
    coef = _centered(network) - 2.0 * lam * tmt
    rhs = 0.5 * np.einsum('ij,ijd->d', coef, x)

    S = np.linalg.inv(precision)
    S = 0.5 * (S + S.T)
    m = np.linalg.solve(precision, rhs)
    return m, S, precision


def update_gamma(state, K):
    """ :return: ``(a_n, b_n)`` """
    hyper = state.hyper
    iu = np.triu_indices(K)
    a_n = hyper.a0 + K * (K + 1) / 4.0
    b_n = hyper.b0 + 0.5 * state.expected_alpha2[iu].sum()
    return a_n, b_n


def update_eta(state, d):
    """ :return: ``(c_n, d_n)`` """
    hyper = state.hyper
    c_n = hyper.c0 + d / 2.0
    d_n = hyper.d0 + 0.5 * np.trace(state.S_beta) + 0.5 * state.m_beta @ state.m_beta
    return c_n, float(d_n)


def _alpha_statistics(state, network):
    """
    Likelihood precision ``P`` and linear coefficient ``h`` of every ``alpha_kl``
    (diagonal and off-diagonal conventions differ by a factor 2).
    """
    tau = state.tau
    lam = _lam(state.xi)
    b = _centered(network) - 2.0 * lam * _xb(network, state.m_beta)

    lam_blocks = tau.T @ lam @ tau
    lam_blocks = 0.5 * (lam_blocks + lam_blocks.T)
    h = tau.T @ b @ tau
    h = 0.5 * (h + h.T)

    P = 2.0 * lam_blocks
    diag = np.diag_indices(state.K)
    P[diag] = lam_blocks[diag]
    h[diag] *= 0.5
    return P, h


def update_alpha(state, network, K):
    """ :return: ``(m_alpha, sigma2_alpha)``, both symmetric """
    P, h = _alpha_statistics(state, network)
    sigma2 = 1.0 / (state.a_n / state.b_n + P)
    return sigma2 * h, sigma2


def m_sweep(state, network):
    """
    Update ``q(pi)``, ``q(gamma)``, ``q(eta)``, ``q(beta)`` and ``q(alpha)``
    in that order. Afterwards :func:`lower_bound` may be evaluated.
    """
    K, d = state.K, network.d
    state.phase = PHASE_PARTIAL
    state.e_n = update_pi(state.tau, state.hyper.e0)
    state.a_n, state.b_n = update_gamma(state, K)
    state.c_n, state.d_n = update_eta(state, d)
    state.m_beta, state.S_beta, state.S_beta_inv = update_beta(state, network)
    state.m_alpha, state.sigma2_alpha = update_alpha(state, network, K)
    state.phase = PHASE_M
    return state


def update_xi(state, network):
    """
    Optimal logistic bound parameters given every variational factor.
    Negative radicands (round-off) are clamped to zero with a warning.
    """
    tau = state.tau
    radicand = tau @ state.expected_alpha2 @ tau.T
    if network.d:
        x = network.covariates
        second = state.S_beta + np.outer(state.m_beta, state.m_beta)
        radicand = radicand + 2.0 * (tau @ state.m_alpha @ tau.T) * _xb(network, state.m_beta)
        radicand = radicand + np.einsum('ijd,de,ije->ij', x, second, x)

    off = ~np.eye(state.n, dtype=bool)
    negative = (radicand < 0) & off
    if negative.any():
        msg = 'clamped %d negative xi radicand(s), min %.3g' % (int(negative.sum()), radicand[negative].min())
        _log.warning(msg)
        warnings.warn(msg, RuntimeWarning)
    xi = np.sqrt(np.maximum(radicand, 0.0))
    return 0.5 * (xi + xi.T)


def _log_dirichlet_norm(x):
    """ ``log C(x) = sum_k log Gamma(x_k) - log Gamma(sum_k x_k)`` """
    return gammaln(x).sum() - gammaln(x.sum())


def _xi_terms(xi, lam):
    off = ~np.eye(xi.shape[0], dtype=bool)
    return 0.5 * np.sum((log_expit(xi) - xi / 2.0 + lam * xi ** 2)[off])


def _tau_entropy(tau):
    t = tau[tau > 0]
    return -np.sum(t * np.log(t))


def lower_bound(state, network, K=None):
    """
    Closed form of the variational lower bound, valid right after a full
    M sweep (:func:`m_sweep`) and before ``xi`` or ``tau`` change again.

    :raises ContractViolation: when called at any other point of the iteration
    """
    if state.phase != PHASE_M:
        raise exception.ContractViolation('lower_bound needs a completed M sweep (state phase is %r)' % state.phase)
    if K is not None and K != state.K:
        raise exception.ContractViolation('state has K=%d, not %d' % (state.K, K))

    hyper = state.hyper
    K = state.K
    iu = np.triu_indices(K)

    bound = _xi_terms(state.xi, _lam(state.xi))
    bound += _log_dirichlet_norm(state.e_n) - _log_dirichlet_norm(np.full(K, hyper.e0))
    bound += gammaln(state.a_n) - gammaln(hyper.a0) + gammaln(state.c_n) - gammaln(hyper.c0)
    bound += hyper.a0 * math.log(hyper.b0) + state.a_n * (1.0 - hyper.b0 / state.b_n - math.log(state.b_n))
    bound += hyper.c0 * math.log(hyper.d0) + state.c_n * (1.0 - hyper.d0 / state.d_n - math.log(state.d_n))
    bound += 0.5 * np.log(state.sigma2_alpha[iu]).sum()
    bound += _tau_entropy(state.tau)
    bound += 0.5 * np.sum(state.m_alpha[iu] ** 2 / state.sigma2_alpha[iu])

    if network.d:
        m = state.m_beta
        bound += 0.5 * np.linalg.slogdet(state.S_beta)[1]
        bound -= 0.5 * m @ state.S_beta_inv @ m
        bound += 0.5 * m @ np.einsum('ij,ijd->d', _centered(network), network.covariates)

    return float(bound)


def variational_bound(state, network):
    """
    The variational lower bound evaluated term by term, valid at any point of
    the iteration. It equals :func:`lower_bound` right after an M sweep.
    """
    hyper = state.hyper
    K, d = state.K, network.d
    iu = np.triu_indices(K)
    lam = _lam(state.xi)

    bound = _xi_terms(state.xi, lam)

    # pi and Z
    e0 = np.full(K, hyper.e0)
    bound += _log_dirichlet_norm(state.e_n) - _log_dirichlet_norm(e0)
    bound += np.sum((e0 + state.tau.sum(axis=0) - state.e_n) * state.expected_log_pi)
    bound += _tau_entropy(state.tau)

    # alpha and gamma
    P, h = _alpha_statistics(state, network)
    e_gamma = state.a_n / state.b_n
    m, s2 = state.m_alpha[iu], state.sigma2_alpha[iu]
    bound += np.sum(m * h[iu] - 0.5 * (P[iu] + e_gamma) * (m ** 2 + s2) + 0.5 * np.log(s2) + 0.5)
    n_alpha = K * (K + 1) / 2.0
    bound += gammaln(state.a_n) - gammaln(hyper.a0) + hyper.a0 * math.log(hyper.b0)
    bound += -state.a_n * math.log(state.b_n) + state.a_n - hyper.b0 * e_gamma
    bound += (hyper.a0 + n_alpha / 2.0 - state.a_n) * (digamma(state.a_n) - math.log(state.b_n))

    # beta and eta
    e_eta = state.c_n / state.d_n
    if d:
        x = network.covariates
        mb = state.m_beta
        precision = e_eta * np.eye(d) + np.einsum('ij,ijd,ije->de', lam, x, x)
        bound += 0.5 * mb @ np.einsum('ij,ijd->d', _centered(network), x)
        bound -= 0.5 * np.trace((state.S_beta + np.outer(mb, mb)) @ precision)
        bound += 0.5 * np.linalg.slogdet(state.S_beta)[1] + d / 2.0
    bound += gammaln(state.c_n) - gammaln(hyper.c0) + hyper.c0 * math.log(hyper.d0)
    bound += -state.c_n * math.log(state.d_n) + state.c_n - hyper.d0 * e_eta
    bound += (hyper.c0 + d / 2.0 - state.c_n) * (digamma(state.c_n) - math.log(state.d_n))

    return float(bound)


def initial_tau(network, K, rng, restart=0, perturbation=0.3, floor=1e-10):
    """
    k-means on the degree-normalized rows of the adjacency matrix; restarts
    after the first mix in Dirichlet(1) noise at rate ``perturbation``.
    """
    n = network.n
    if K == 1:
        return np.ones((n, 1))

    if n >= K:
        y = np.asarray(network.adjacency)
        degree = np.maximum(y.sum(axis=1), 1.0)
        rows = y / degree[:, None]
        with warnings.catch_warnings():
            # fewer distinct rows than clusters on degenerate graphs
            warnings.simplefilter('ignore')
            labels = KMeans(n_clusters=K, n_init=10,
                            random_state=int(rng.integers(2 ** 31 - 1))).fit_predict(rows)
    else:
        labels = rng.integers(K, size=n)

    tau = np.eye(K)[labels]
    if restart > 0:
        tau = (1.0 - perturbation) * tau + perturbation * rng.dirichlet(np.ones(K), size=n)
    tau = np.maximum(tau, floor)
    return tau / tau.sum(axis=1, keepdims=True)


def fit_single(network, K, hyper, init_seed, options=None, restart=0):
    """
    Run the three-step optimization for one ``K`` from one initialization.

    Before the first E step the parameter factors get one M sweep and ``xi``
    is refreshed, so the E step sees ``m_alpha`` fitted to the initial ``tau``.

    :return: ``(state, final_bound, bound_trace)``
    :raises FitFailed: on a non-finite bound
    """
    if K < 1:
        raise exception.BadConfig('K must be >= 1', 'K')
    options = options or FitOptions()
    rng = np.random.default_rng(init_seed)

    tau = initial_tau(network, K, rng, restart, options.perturbation, options.tau_floor)
    state = VariationalState.from_prior(network, K, hyper, tau)
    state.xi = update_xi(state, network)
    m_sweep(state, network)
    state.xi = update_xi(state, network)
    state.phase = PHASE_XI

    trace = []
    for it in range(options.max_iter):
        e_step(state, network, options.tau_floor)
        m_sweep(state, network)
        bound = lower_bound(state, network)
        if not math.isfinite(bound):
            raise exception.FitFailed(K, restart, 'non-finite bound at iteration %d' % (it + 1))
        trace.append(bound)
        state.xi = update_xi(state, network)
        state.phase = PHASE_XI

        _log.debug('K=%d restart=%d iteration %d: bound %.10g', K, restart, it + 1, bound)
        if len(trace) > 1 and abs(trace[-1] - trace[-2]) / (1.0 + abs(trace[-1])) < options.tol:
            break
    else:
        _log.info('K=%d restart=%d stopped after max_iter=%d iterations', K, restart, options.max_iter)

    return state, trace[-1], trace


SingleFit = collections.namedtuple('SingleFit', ['K', 'state', 'bound', 'trace', 'restart', 'runs'])
SingleFit.__doc__ = """
Best restart for one ``K``. ``runs`` lists every restart as a
:class:`RestartRun`; ``state`` is ``None`` and ``bound`` is ``-inf`` when
all restarts failed.
"""

RestartRun = collections.namedtuple('RestartRun', ['restart', 'seed', 'bound', 'iterations', 'runtime', 'error'])


def fit_model(network, hyper=None, n_restarts=None, seed=0, options=None, strict=True):
    """
    Fit every ``K = 1..K_max`` with ``n_restarts`` initializations each and
    keep, for every ``K``, the restart with the highest bound. Restarts and
    ``K`` values run on ``options.threads`` worker threads; every
    ``(K, restart)`` gets a seed derived from ``seed`` alone, so results do
    not depend on the number of threads.

    :param strict:
        when every restart fails for some ``K``, raise :class:`.FitFailed`
        naming it. Otherwise that ``K`` is kept with bound ``-inf``.

    :return: ``{K: SingleFit}``
    """
    hyper = check_hyperparameters(hyper or Hyperparameters())
    options = options or FitOptions()
    if n_restarts is not None:
        options = options._replace(n_restarts=n_restarts)
    options = check_options(options)

    tasks = []
    for K in range(1, hyper.k_max + 1):
        for r in range(options.n_restarts):
            s = derive_seed(seed, K, r)
            tasks.append(((K, r), fit_single, (network, K, hyper, s, options, r)))
    seeds = {key: args[3] for key, _, args in tasks}

    outcomes = WorkerPool(options.threads).map(tasks)

    fits = {}
    for K in range(1, hyper.k_max + 1):
        runs, best = [], None
        for (k, r), outcome in outcomes:
            if k != K:
                continue
            if outcome.ok:
                state, bound, trace = outcome.value
                runs.append(RestartRun(r, seeds[(k, r)], bound, len(trace), outcome.runtime, None))
                _log.info('K=%d restart=%d: bound %.6f after %d iterations (%.2fs)',
                          K, r, bound, len(trace), outcome.runtime)
                if best is None or bound > best.bound:
                    best = SingleFit(K, state, bound, trace, r, None)
            else:
                runs.append(RestartRun(r, seeds[(k, r)], None, 0, outcome.runtime, str(outcome.error)))
                _log.warning('K=%d restart=%d failed: %s', K, r, outcome.error)

        if best is None:
            reasons = '; '.join(run.error for run in runs)
            if strict:
                raise exception.FitFailed(K, None, reasons)
            _log.warning('Every restart failed for K=%d: %s', K, reasons)
            best = SingleFit(K, None, -np.inf, [], None, None)
        fits[K] = best._replace(runs=runs)

    return fits


def exact_log_evidence_h0(network, hyper=None):
    """
    ``log p(Y | M_1)`` for a network without covariates, by adaptive
    quadrature. ``gamma`` is integrated out analytically, leaving ``alpha``
    Student-t distributed with ``2 a0`` degrees of freedom and scale
    ``sqrt(b0 / a0)``. Meant for tiny graphs, as a reference for the
    variational bound.
    """
    hyper = hyper or Hyperparameters()
    if network.d:
        raise exception.BadConfig('only defined without covariates', 'd')

    n = network.n
    pairs = n * (n - 1) / 2.0
    edges = np.triu(network.adjacency, k=1).sum()
    prior = stats.t(df=2.0 * hyper.a0, scale=math.sqrt(hyper.b0 / hyper.a0))

    def log_integrand(a):
        return edges * log_expit(a) + (pairs - edges) * log_expit(-a) + prior.logpdf(a)

    # the log-likelihood part is concave, so the integrand has a single mode
    p = edges / pairs if pairs else 0.5
    mode = math.log(max(p, 1e-12) / max(1.0 - p, 1e-12)) if 0 < p < 1 else 0.0
    grid = np.linspace(mode - 30.0, mode + 30.0, 2001)
    shift = float(np.max(log_integrand(grid)))
    centre = float(grid[np.argmax(log_integrand(grid))])

    def f(a):
        return math.exp(log_integrand(a) - shift)

    left, _ = integrate.quad(f, -np.inf, centre, epsabs=0.0, epsrel=1e-11, limit=200)
    right, _ = integrate.quad(f, centre, np.inf, epsabs=0.0, epsrel=1e-11, limit=200)
    return shift + math.log(left + right)
