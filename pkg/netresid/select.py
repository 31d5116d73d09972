import logging
import math
import warnings

import numpy as np
from scipy.special import logsumexp

from . import exception
from .namedtuple import FitResult
from .vbem import model_prior


_log = logging.getLogger(__name__)


class InfiniteBayesFactorWarning(UserWarning):
    pass


def model_posterior(bounds, prior):
    """
    Approximate posterior over models, ``p(M_K | Y) ∝ p(M_K) exp(L_K)``.

    :param bounds: ``{K: bound}``; ``-inf`` marks a failed ``K``, which is left out with a warning
    :param prior: ``{K: p(M_K)}`` or a sequence indexed by ``K - 1``

    :return: ``{K: posterior}`` over the ``K`` values with a finite bound
    """
    if not isinstance(prior, dict):
        prior = {K: p for K, p in enumerate(prior, start=1)}

    keep = []
    for K in sorted(bounds):
        b = bounds[K]
        if b is None or not math.isfinite(b):
            msg = 'K=%d has no finite bound and is dropped from the model posterior' % K
            _log.warning(msg)
            warnings.warn(msg, RuntimeWarning)
            continue
        keep.append(K)

    if not keep:
        raise exception.ContractViolation('model_posterior needs at least one finite bound')

    with np.errstate(divide='ignore'):
        logp = np.array([math.log(prior[K]) if prior[K] > 0 else -np.inf for K in keep]) \
            + np.array([bounds[K] for K in keep])
    if not np.any(np.isfinite(logp)):
        raise exception.ContractViolation('every model with a finite bound has zero prior mass')

    post = np.exp(logp - logsumexp(logp))
    return {K: float(p) for K, p in zip(keep, post)}


def gof(posterior, prior=None):
    """
    :param posterior: ``{K: p(M_K | Y)}``
    :param prior: prior probability of ``H0`` (``K = 1``), 1/2 by default

    :return: ``(p_H0, bayes_factor_01)``; the Bayes factor is ``inf`` when ``p_H0 = 1``
    """
    p_h0 = float(posterior.get(1, 0.0))
    prior_h0 = 0.5 if prior is None else float(prior)

    if p_h0 >= 1.0:
        msg = 'p(H0|Y) = 1: the Bayes factor B01 is infinite'
        _log.warning(msg)
        warnings.warn(msg, InfiniteBayesFactorWarning)
        return 1.0, math.inf

    if prior_h0 >= 1.0:
        # H1' has no prior mass, so its posterior is zero and the odds are undefined
        return p_h0, math.inf

    return p_h0, (p_h0 / (1.0 - p_h0)) * ((1.0 - prior_h0) / prior_h0)


def summarize(fits, hyper, network=None, prior=None, manifest=None):
    """
    Build a :class:`.FitResult` from the per-``K`` fits of :func:`.vbem.fit_model`.

    :param prior: model prior as returned by :func:`.vbem.model_prior`; derived from ``hyper`` when omitted
    """
    if prior is None:
        prior = model_prior(hyper)
    prior = {K: float(p) for K, p in enumerate(prior, start=1)}

    bounds = {K: float(f.bound) for K, f in fits.items()}
    posterior = model_posterior(bounds, prior)
    p_h0, bf = gof(posterior, prior[1])

    kw = dict(bounds=bounds,
              posterior=posterior,
              p_H0=p_h0,
              bayes_factor_01=None if math.isinf(bf) else bf,
              bayes_factor_infinite=math.isinf(bf),
              hyper=hyper,
              seeds={K: [run.seed for run in f.runs] for K, f in fits.items()},
              runtimes={K: [run.runtime for run in f.runs] for K, f in fits.items()},
              manifest=manifest)

    if network is not None:
        kw.update(node_ids=list(network.node_ids),
                  n=network.n,
                  d=network.d,
                  density=network.density,
                  covariate_names=list(network.covariate_names))

    return FitResult(**kw)


def bayes_factor(result):
    """ ``B01`` of a :class:`.FitResult`, ``inf`` when flagged infinite. """
    return math.inf if result.bayes_factor_infinite else result.bayes_factor_01


def p_h1(result):
    """ Approximate posterior probability of residual structure, ``1 - p(H0|Y)``. """
    return 1.0 - result.p_H0


def residual_posterior(result):
    """
    The model posterior restricted to ``K >= 2`` and renormalized: which number
    of blocks explains the residual structure, given that there is some.
    Empty when all posterior mass sits on ``K = 1``.
    """
    rest = {K: p for K, p in result.posterior.items() if K >= 2}
    total = sum(rest.values())
    if total <= 0:
        return {}
    return {K: p / total for K, p in rest.items()}
