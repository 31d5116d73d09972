import json
import math
import os

import numpy.testing as npt
import pytest

from netresid import exception
from netresid.namedtuple import Hyperparameters, FitOptions, RunManifest, SimConfig
from netresid.select import summarize
from netresid.simulate import simulate_network
from netresid.store import write_fit, read_fit, write_grid, read_grid, read_manifest, FIT_FILE, GRID_CSV
from netresid.graphon import export_grid
from netresid.vbem import fit_model


@pytest.fixture(scope='module')
def fitted():
    network, _ = simulate_network(SimConfig(n=25, rho=0.2, lam=2.0, d=1, seed=3))
    hyper = Hyperparameters(k_max=3)
    fits = fit_model(network, hyper, seed=4, options=FitOptions(n_restarts=1, max_iter=100))
    return network, fits, summarize(fits, hyper, network)


def manifest():
    return RunManifest(command='fit', config={'kmax': 3}, seed=4, version='test',
                       runtimes={'1/0': 0.1}, artifacts=[])


def test_fit_files(tmp_path, fitted):
    _, fits, result = fitted
    written = write_fit(str(tmp_path), result, {K: f.state for K, f in fits.items()}, manifest())
    names = sorted(os.path.basename(p) for p in written)
    assert names == ['fit.json', 'manifest.json', 'state_K1.npz', 'state_K2.npz', 'state_K3.npz']

    m = read_manifest(str(tmp_path))
    assert 'fit.json' in m.artifacts
    assert json.loads((tmp_path / FIT_FILE).read_text())['manifest'] == 'manifest.json'


def test_fit_read_back(tmp_path, fitted):
    network, fits, result = fitted
    write_fit(str(tmp_path), result, {K: f.state for K, f in fits.items()})
    back, states = read_fit(str(tmp_path))
    assert back.bounds == result.bounds
    assert back.posterior == result.posterior
    assert back.p_H0 == result.p_H0
    assert back.hyper == result.hyper
    assert back.node_ids == list(network.node_ids)
    npt.assert_array_equal(states[2].m_alpha, fits[2].state.m_alpha)
    npt.assert_array_equal(states[3].tau, fits[3].state.tau)
    assert states[2].a_n == fits[2].state.a_n


def test_infinite_bayes_factor(tmp_path, fitted):
    _, fits, result = fitted
    result = result._replace(posterior={1: 1.0}, p_H0=1.0, bayes_factor_01=math.inf,
                             bounds={1: result.bounds[1]})
    write_fit(str(tmp_path), result, {1: fits[1].state})
    d = json.loads((tmp_path / FIT_FILE).read_text())
    assert d['bayes_factor_01'] is None
    assert d['bayes_factor_infinite'] is True
    back, _ = read_fit(str(tmp_path))
    assert back.bayes_factor_infinite


def test_failed_k_written_as_null(tmp_path, fitted):
    _, fits, result = fitted
    bounds = dict(result.bounds)
    bounds[3] = -math.inf
    post = {1: result.posterior[1], 2: 1 - result.posterior[1]}
    result = result._replace(bounds=bounds, posterior=post)
    states = {1: fits[1].state, 2: fits[2].state, 3: None}
    write_fit(str(tmp_path), result, states)
    assert json.loads((tmp_path / FIT_FILE).read_text())['bounds']['3'] is None
    back, back_states = read_fit(str(tmp_path))
    assert back.bounds[3] == -math.inf
    assert 3 not in back_states


def test_corrupt_json(tmp_path):
    (tmp_path / FIT_FILE).write_text('{"bounds": ')
    with pytest.raises(exception.CorruptResult):
        read_fit(str(tmp_path))


def test_inconsistent_posterior(tmp_path, fitted):
    _, fits, result = fitted
    write_fit(str(tmp_path), result, {K: f.state for K, f in fits.items()})
    d = json.loads((tmp_path / FIT_FILE).read_text())
    d['posterior']['1'] += 0.5
    (tmp_path / FIT_FILE).write_text(json.dumps(d))
    with pytest.raises(exception.CorruptResult):
        read_fit(str(tmp_path))


def test_missing_state(tmp_path, fitted):
    _, fits, result = fitted
    write_fit(str(tmp_path), result, {K: f.state for K, f in fits.items()})
    os.remove(str(tmp_path / 'state_K2.npz'))
    with pytest.raises(exception.CorruptResult):
        read_fit(str(tmp_path))


def test_unknown_field_warns(tmp_path, fitted):
    _, fits, result = fitted
    write_fit(str(tmp_path), result, {K: f.state for K, f in fits.items()})
    d = json.loads((tmp_path / FIT_FILE).read_text())
    d['something_new'] = 1
    (tmp_path / FIT_FILE).write_text(json.dumps(d))
    with pytest.warns(UserWarning, match='something_new'):
        read_fit(str(tmp_path))


def test_grid_files(tmp_path, fitted):
    _, fits, result = fitted
    grid = export_grid({K: f.state for K, f in fits.items()}, result.posterior, resolution=4, n_samples=500)
    write_grid(str(tmp_path), grid)
    lines = (tmp_path / GRID_CSV).read_text().splitlines()
    assert lines[0] == 'u,v,phi,g_phi'
    assert len(lines) == 1 + 16
    back = read_grid(str(tmp_path))
    assert back.resolution == 4
    npt.assert_allclose(back.phi_hat, grid.phi_hat)
