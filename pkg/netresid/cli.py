"""
Command-line front end::

    netresid fit edges.txt --covariates x.csv -o out/
    netresid gof out/
    netresid residual out/ -o grid/
    netresid simulate --n 150 --rho 0.1 --lambda 2 -o sim/
"""

import argparse
import logging
import os
import sys
import time
import warnings

import numpy as np

from . import __version__, exception, derive_seed
from .graph import read_network, write_edge_list, write_edge_covariates, SelfLoopWarning
from .graphon import export_grid, _default_graphon_params
from .namedtuple import Hyperparameters, FitOptions, SimConfig, RunManifest
from .select import summarize, bayes_factor, p_h1, residual_posterior, InfiniteBayesFactorWarning
from .simulate import simulate_network, sweep, calibration_design, read_design
from .store import write_fit, read_fit, read_manifest, write_grid, write_sweep, write_manifest
from .vbem import fit_model, model_prior, _default_fit_params

_log = logging.getLogger(__name__)

_input_errors = (exception.BadNetwork, exception.BadDescriptor, exception.BadConfig,
                 exception.CorruptResult, OSError)


class Router():
    """
    Map parsed arguments to a handler, using a key function and a routing
    table (dictionary).
    """

    def __init__(self, key_function, routing_table):
        self.key_function = key_function
        self.routing_table = routing_table

    def route(self, args):
        return self.routing_table[self.key_function(args)](args)


def _fit_arguments(p):
    g = p.add_argument_group('fitting')
    g.add_argument('--kmax', type=int, default=10, help='largest number of blocks (default: %(default)s)')
    g.add_argument('--restarts', type=int, default=_default_fit_params['n_restarts'],
                   help='initializations per K (default: %(default)s)')
    g.add_argument('--tol', type=float, default=_default_fit_params['tol'],
                   help='relative bound change that stops the iteration (default: %(default)s)')
    g.add_argument('--max-iter', type=int, default=_default_fit_params['max_iter'])
    g.add_argument('--threads', type=int, default=1)
    g.add_argument('--seed', type=int, default=0, help='master seed (default: %(default)s)')
    g.add_argument('--p-h0', type=float, default=0.5, help='prior probability of no residual structure')
    g.add_argument('--e0', type=float, default=1.0,
                   help='Dirichlet concentration on block proportions; 0.5 is the Jeffreys prior')


def _parser():
    p = argparse.ArgumentParser(prog='netresid',
                                description='Goodness-of-fit of logistic regression on networks.')
    p.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    p.add_argument('-v', '--verbose', action='count', default=0)
    p.add_argument('-q', '--quiet', action='store_true')
    sub = p.add_subparsers(dest='command', metavar='command')
    sub.required = True

    f = sub.add_parser('fit', help='fit K = 1..kmax and compute p(H0|Y)')
    f.add_argument('edges', help='edge list, one "i j" per line')
    f.add_argument('--covariates', help='edge covariate CSV (i, j, v1, ...)')
    f.add_argument('--nodes', help='node descriptor CSV, coded into edge covariates')
    f.add_argument('--n-nodes', type=int, help='declare nodes 1..N, for isolated nodes')
    f.add_argument('--impute-mean', action='store_true', help='fill missing quantitative descriptors')
    f.add_argument('--standardize', action='store_true', help='center and scale every covariate')
    f.add_argument('-o', '--output', required=True, help='result directory')
    _fit_arguments(f)

    g = sub.add_parser('gof', help='report the goodness-of-fit of a fit result')
    g.add_argument('result', help='result directory written by "fit"')
    g.add_argument('--timings', action='store_true', help='also report runtimes')

    r = sub.add_parser('residual', help='export the estimated residual structure on a grid')
    r.add_argument('result', help='result directory written by "fit"')
    r.add_argument('-o', '--output', help='output directory (default: the result directory)')
    r.add_argument('--grid', type=int, default=_default_graphon_params['resolution'])
    r.add_argument('--mc-samples', type=int, default=_default_graphon_params['n_samples'])
    r.add_argument('--seed', type=int, default=0)
    r.add_argument('--threads', type=int, default=1)
    r.add_argument('--prior-e', action='store_true',
                   help='evaluate stick CDFs at the prior concentration instead of the fitted one')
    cov = r.add_mutually_exclusive_group()
    cov.add_argument('--with-covariates', dest='covariates', action='store_true', default=True)
    cov.add_argument('--no-covariates', dest='covariates', action='store_false',
                     help='refit the same network without covariates first')

    s = sub.add_parser('simulate', help='simulate networks, or run a calibration sweep')
    s.add_argument('--n', type=int, default=100)
    s.add_argument('--rho', type=float, default=0.1)
    s.add_argument('--lambda', dest='lam', type=float, default=1.0)
    s.add_argument('--d', type=int, default=2, help='covariate dimension')
    s.add_argument('--beta', help='comma-separated regression coefficients (default: 0)')
    s.add_argument('--replicates', type=int, default=1)
    s.add_argument('--sweep', nargs='?', const='', metavar='DESIGN',
                   help='fit every replicate of a design CSV (n, rho, lambda); the full default grid without a file')
    s.add_argument('-o', '--output', required=True)
    _fit_arguments(s)

    return p


def _hyper(args):
    return Hyperparameters(k_max=args.kmax, p_h0=args.p_h0, e0=args.e0)


def _options(args):
    return FitOptions(tol=args.tol, max_iter=args.max_iter, n_restarts=args.restarts, threads=args.threads)


def _manifest(args, seed, runtimes=None):
    config = {k: v for k, v in vars(args).items() if k not in ('verbose', 'quiet')}
    return RunManifest(command=args.command, config=config, seed=seed, version=__version__,
                       runtimes=runtimes or {}, artifacts=[])


def _fit(network, args):
    hyper = _hyper(args)
    fits = fit_model(network, hyper, seed=args.seed, options=_options(args), strict=False)
    runtimes = {'%d/%d' % (K, run.restart): run.runtime for K, f in fits.items() for run in f.runs}
    return hyper, fits, runtimes


def cmd_fit(args):
    network = read_network(args.edges, args.covariates, args.nodes, args.n_nodes,
                           impute_mean=args.impute_mean, standardize_covariates=args.standardize)
    hyper, fits, runtimes = _fit(network, args)
    manifest = _manifest(args, args.seed, runtimes)
    result = summarize(fits, hyper, network, model_prior(hyper))
    write_fit(args.output, result, {K: f.state for K, f in fits.items()}, manifest)

    print('p(H0|Y) = %.4f  B01 = %s' % (result.p_H0, _format_bf(bayes_factor(result))))
    return 0


def _format_bf(bf):
    return 'inf' if np.isinf(bf) else '%.4g' % bf


def cmd_gof(args):
    result, _ = read_fit(args.result)
    print(gof_report(result, timings=args.timings))
    return 0


def gof_report(result, timings=False):
    lines = []
    if result.n is not None:
        lines.append('size %d  d %d  density %.4f' % (result.n, result.d, result.density))
    lines.append('p(H0|Y) %.4f  B01 %s' % (result.p_H0, _format_bf(bayes_factor(result))))
    lines.append('')
    lines.append('%4s  %16s  %10s' % ('K', 'bound', 'posterior'))
    for K in sorted(result.bounds):
        lines.append('%4d  %16.4f  %10.4f' % (K, result.bounds[K], result.posterior.get(K, 0.0)))
    lines.append('')

    if result.p_H0 >= 0.5:
        lines.append('no residual structure detected')
    else:
        lines.append('H0 rejected: residual structure detected (p(H1\'|Y) = %.4f)' % p_h1(result))
        rest = residual_posterior(result)
        if rest:
            K = max(rest, key=rest.get)
            lines.append('most probable number of blocks: %d (%.4f given residual structure)' % (K, rest[K]))
    lines.append('H0 is rejected when p(H0|Y) < 1/2')

    if timings and result.runtimes:
        per_k = {K: sum(r for r in rs if r is not None) for K, rs in result.runtimes.items()}
        lines.append('')
        lines.append('runtime %.2fs (%.2fs with one worker per K)' % (sum(per_k.values()), max(per_k.values())))
        for K in sorted(per_k):
            lines.append('%4d  %10.2fs' % (K, per_k[K]))

    return '\n'.join(lines)


def cmd_residual(args):
    result, states = read_fit(args.result)
    output = args.output or args.result
    posterior = result.posterior
    manifest = _manifest(args, args.seed)

    if not args.covariates:
        source = read_manifest(args.result).config
        network = read_network(source['edges'], source.get('covariates'), source.get('nodes'),
                               source.get('n_nodes'), impute_mean=source.get('impute_mean', False))
        network = network.without_covariates()
        refit = argparse.Namespace(**dict(source, threads=args.threads))
        hyper, fits, runtimes = _fit(network, refit)
        states = {K: f.state for K, f in fits.items()}
        result = summarize(fits, hyper, network, model_prior(hyper))
        posterior = result.posterior
        write_fit(os.path.join(output, 'no_covariates'), result, states, _manifest(refit, refit.seed, runtimes))
        _log.info('Refit without covariates: p(H0|Y) = %.4f', result.p_H0)

    grid = export_grid(states, posterior, args.grid, args.mc_samples, args.seed,
                       use_prior_e=args.prior_e, threads=args.threads)
    write_grid(output, grid, manifest)
    print('wrote %dx%d grid to %s' % (grid.resolution, grid.resolution, output))
    return 0


def _beta(args):
    if args.beta is None:
        return None
    try:
        return tuple(float(b) for b in args.beta.split(','))
    except ValueError:
        raise exception.BadConfig('not a comma-separated list of numbers: %r' % args.beta, 'beta')


def cmd_simulate(args):
    beta = _beta(args)
    os.makedirs(args.output, exist_ok=True)

    if args.sweep is not None:
        design = read_design(args.sweep) if args.sweep else calibration_design()
        start = time.perf_counter()
        table = sweep(design, args.replicates, _options(args), _hyper(args), args.seed,
                      threads=args.threads, d=args.d, beta=beta)
        path = write_sweep(os.path.join(args.output, 'sweep.csv'), table)
        manifest = _manifest(args, args.seed, {'sweep': time.perf_counter() - start})
        write_manifest(args.output, manifest._replace(artifacts=[os.path.basename(path)]))
        print(table.groupby(['n', 'rho', 'lambda'])['p_H0'].median().to_string())
        return 0

    if args.replicates < 1:
        raise exception.BadConfig('must be >= 1, got %r' % args.replicates, 'replicates')

    artifacts = []
    for r in range(args.replicates):
        seed = derive_seed(args.seed, r)
        config = SimConfig(n=args.n, rho=args.rho, lam=args.lam, d=args.d, beta=beta, seed=seed)
        network, U = simulate_network(config)

        edges = os.path.join(args.output, 'network_%d.txt' % r)
        write_edge_list(edges, network)
        artifacts.append(os.path.basename(edges))
        if network.d:
            cov = os.path.join(args.output, 'covariates_%d.csv' % r)
            write_edge_covariates(cov, network)
            artifacts.append(os.path.basename(cov))
        latent = os.path.join(args.output, 'latent_%d.csv' % r)
        np.savetxt(latent, np.column_stack([np.arange(1, network.n + 1), U]),
                   fmt=['%d', '%.12g'], delimiter=',', header='node,u', comments='')
        artifacts.append(os.path.basename(latent))

        print('replicate %d: seed %d  density %.4f' % (r, seed, network.density))

    write_manifest(args.output, _manifest(args, args.seed)._replace(artifacts=artifacts))
    return 0


def _configure_logging(args):
    level = logging.ERROR if args.quiet else max(logging.DEBUG, logging.WARNING - 10 * args.verbose)
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')
    # these are logged as well
    for category in (SelfLoopWarning, InfiniteBayesFactorWarning, RuntimeWarning):
        warnings.filterwarnings('ignore', category=category)


def main(argv=None):
    args = _parser().parse_args(argv)
    _configure_logging(args)

    router = Router(lambda a: a.command, {
                 'fit': cmd_fit,
                 'gof': cmd_gof,
                 'residual': cmd_residual,
                 'simulate': cmd_simulate,
             })

    try:
        return router.route(args)
    except _input_errors as e:
        print('netresid: error: %s' % e, file=sys.stderr)
        return 2
    except exception.NetresidException as e:
        print('netresid: error: %s' % e, file=sys.stderr)
        return 1
