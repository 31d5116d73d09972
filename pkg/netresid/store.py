"""
Result files.

A fit directory holds ``fit.json`` (the :class:`.FitResult`), one
``state_K<K>.npz`` per fitted ``K`` and ``manifest.json``. Residual grids go
to ``grid.csv`` and ``grid.json`` with their own ``grid_manifest.json``, so a
grid written into a fit directory leaves the fit manifest alone; sweeps to a single CSV.
"""

import json
import logging
import math
import os
import zipfile

import numpy as np
import pandas as pd

from . import exception
from .namedtuple import FitResult, GraphonGrid, RunManifest, Hyperparameters
from .vbem import VariationalState, PHASE_XI

_log = logging.getLogger(__name__)

FIT_FILE = 'fit.json'
MANIFEST_FILE = 'manifest.json'
GRID_CSV = 'grid.csv'
GRID_JSON = 'grid.json'
GRID_MANIFEST = 'grid_manifest.json'

_array_fields = ('tau', 'e_n', 'm_beta', 'S_beta', 'S_beta_inv', 'm_alpha', 'sigma2_alpha', 'xi')
_scalar_fields = ('a_n', 'b_n', 'c_n', 'd_n')


def state_file(K):
    return 'state_K%d.npz' % K


def _finite_or_none(v):
    return v if v is not None and math.isfinite(v) else None


def _dump(path, obj):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(obj, f, indent=2, allow_nan=False)
        f.write('\n')


def _load(path):
    try:
        with open(path, encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        raise exception.CorruptResult(path, 'file not found')
    except (ValueError, UnicodeDecodeError) as e:
        raise exception.CorruptResult(path, 'not valid JSON: %s' % e)


def manifest_to_dict(manifest):
    d = manifest._asdict()
    d['runtimes'] = {str(k): v for k, v in (manifest.runtimes or {}).items()}
    return d


def write_manifest(directory, manifest, name=MANIFEST_FILE):
    path = os.path.join(directory, name)
    _dump(path, manifest_to_dict(manifest))
    return path


def read_manifest(directory, name=MANIFEST_FILE):
    path = os.path.join(directory, name)
    return RunManifest(**_load(path))


def fit_to_dict(result):
    """ The JSON form of a :class:`.FitResult`. Failed ``K`` values get a ``null`` bound. """
    d = result._asdict()
    d['bounds'] = {str(K): _finite_or_none(b) for K, b in result.bounds.items()}
    d['posterior'] = {str(K): p for K, p in result.posterior.items()}
    d['hyper'] = dict(result.hyper._asdict())
    d['seeds'] = {str(K): s for K, s in (result.seeds or {}).items()}
    d['runtimes'] = {str(K): r for K, r in (result.runtimes or {}).items()}
    if d['bayes_factor_01'] is not None and not math.isfinite(d['bayes_factor_01']):
        d['bayes_factor_01'] = None
        d['bayes_factor_infinite'] = True
    return d


def fit_from_dict(d, path=FIT_FILE):
    try:
        d = dict(d)
        d['bounds'] = {K: -math.inf if b is None else b for K, b in d['bounds'].items()}
        result = FitResult(**d)
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise exception.CorruptResult(path, 'malformed fit record: %r' % e)

    total = sum(result.posterior.values())
    if not math.isclose(total, 1.0, abs_tol=1e-6):
        raise exception.CorruptResult(path, 'posterior sums to %.8g, not 1' % total)
    if not math.isclose(result.p_H0, result.posterior.get(1, 0.0), abs_tol=1e-12):
        raise exception.CorruptResult(path, 'p_H0 disagrees with the posterior of K=1')
    return result


def write_fit(directory, result, states, manifest=None):
    """
    :param states: ``{K: VariationalState}``; ``None`` entries (failed ``K``) are skipped
    :return: list of written paths
    """
    os.makedirs(directory, exist_ok=True)
    written = []

    for K, state in sorted(states.items()):
        if state is None:
            continue
        path = os.path.join(directory, state_file(K))
        arrays = {name: getattr(state, name) for name in _array_fields}
        arrays.update({name: np.float64(getattr(state, name)) for name in _scalar_fields})
        np.savez_compressed(path, **arrays)
        written.append(path)

    d = fit_to_dict(result)
    if manifest is not None:
        d['manifest'] = MANIFEST_FILE
    path = os.path.join(directory, FIT_FILE)
    _dump(path, d)
    written.append(path)

    if manifest is not None:
        manifest = manifest._replace(artifacts=[os.path.basename(p) for p in written])
        written.append(write_manifest(directory, manifest))

    _log.info('Wrote fit results to %s', directory)
    return written


def read_fit(directory):
    """
    :return: ``(FitResult, {K: VariationalState})``
    :raises CorruptResult: when a file is missing, unreadable or inconsistent
    """
    path = os.path.join(directory, FIT_FILE)
    result = fit_from_dict(_load(path), path)
    hyper = result.hyper or Hyperparameters()

    states = {}
    for K in sorted(result.bounds):
        spath = os.path.join(directory, state_file(K))
        if not os.path.exists(spath):
            if math.isfinite(result.bounds[K]):
                raise exception.CorruptResult(spath, 'state file missing for K=%d' % K)
            continue
        try:
            with np.load(spath) as z:
                arrays = {name: z[name] for name in _array_fields}
                scalars = {name: float(z[name]) for name in _scalar_fields}
        except (OSError, KeyError, ValueError, zipfile.BadZipFile) as e:
            raise exception.CorruptResult(spath, 'cannot read state: %s' % e)
        state = VariationalState(hyper, phase=PHASE_XI, **arrays, **scalars)
        if state.K != K:
            raise exception.CorruptResult(spath, 'holds %d blocks, expected %d' % (state.K, K))
        states[K] = state

    return result, states


def grid_frame(grid):
    """ Long form: one ``(u, v, phi, g_phi)`` row per grid cell. """
    uu, vv = np.meshgrid(grid.u, grid.v, indexing='ij')
    return pd.DataFrame({'u': uu.ravel(),
                         'v': vv.ravel(),
                         'phi': np.asarray(grid.phi_hat).ravel(),
                         'g_phi': np.asarray(grid.g_phi_hat).ravel()})


def write_grid(directory, grid, manifest=None):
    os.makedirs(directory, exist_ok=True)
    csv_path = os.path.join(directory, GRID_CSV)
    json_path = os.path.join(directory, GRID_JSON)

    grid_frame(grid).to_csv(csv_path, index=False, encoding='utf-8', float_format='%.12g')
    d = {'resolution': grid.resolution,
         'u': np.asarray(grid.u).tolist(),
         'v': np.asarray(grid.v).tolist(),
         'phi_hat': np.asarray(grid.phi_hat).tolist(),
         'g_phi_hat': np.asarray(grid.g_phi_hat).tolist()}
    if manifest is not None:
        d['manifest'] = GRID_MANIFEST
    _dump(json_path, d)
    written = [csv_path, json_path]

    if manifest is not None:
        artifacts = list(manifest.artifacts or []) + [GRID_CSV, GRID_JSON]
        written.append(write_manifest(directory, manifest._replace(artifacts=artifacts), GRID_MANIFEST))
    return written


def read_grid(directory):
    path = os.path.join(directory, GRID_JSON)
    d = _load(path)
    d.pop('manifest', None)
    try:
        return GraphonGrid(resolution=d['resolution'],
                           u=np.asarray(d['u']), v=np.asarray(d['v']),
                           phi_hat=np.asarray(d['phi_hat']), g_phi_hat=np.asarray(d['g_phi_hat']))
    except KeyError as e:
        raise exception.CorruptResult(path, 'missing field %s' % e)


def write_sweep(path, table):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    table.to_csv(path, index=False, encoding='utf-8')
    return path
