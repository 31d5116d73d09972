import numpy as np
import numpy.testing as npt
import pytest
from scipy.special import expit

from netresid import exception
from netresid.graphon import (DirichletCDF, dirichlet_joint_cdf, identifiability_order, row_means,
                              residual_phi_at, export_grid)
from netresid.namedtuple import Hyperparameters
from netresid.vbem import VariationalState


def make_state(m_alpha, e_n, n=4):
    m_alpha = np.asarray(m_alpha, dtype=float)
    K = m_alpha.shape[0]
    rng = np.random.default_rng(K)
    return VariationalState(Hyperparameters(),
                            tau=rng.dirichlet(np.ones(K), size=n),
                            e_n=np.asarray(e_n, dtype=float),
                            m_beta=np.zeros(0), S_beta=np.zeros((0, 0)),
                            a_n=1.0, b_n=1.0, c_n=1.0, d_n=1.0,
                            m_alpha=m_alpha,
                            sigma2_alpha=np.full((K, K), 0.1) + np.arange(K)[:, None] + np.arange(K)[None, :],
                            xi=np.ones((n, n)))


# joint CDF

def test_cdf_lower_boundary():
    cdf = DirichletCDF([1.0, 2.0, 1.5], n_samples=5000, seed=1)
    for l in range(4):
        for v in (0.1, 0.5, 0.9):
            assert cdf.cdf(0, l, 0.3, v) == cdf.cdf(l, l, v, v)


def test_cdf_upper_corner():
    cdf = DirichletCDF([0.5, 1.0, 3.0], n_samples=2000, seed=2)
    for k in range(4):
        for l in range(k, 4):
            assert cdf.cdf(k, l, 1.0, 1.0) == 1.0


def test_cdf_uniform_stick():
    n = 20000
    p = dirichlet_joint_cdf(1, 1, 0.5, 0.5, [1.0, 1.0], n_samples=n, seed=3)
    assert abs(p - 0.5) < 3 * np.sqrt(0.25 / n)


def test_cdf_bad_arguments():
    with pytest.raises(exception.BadConfig):
        dirichlet_joint_cdf(1, 1, 0.5, 0.5, [1.0, 1.0], n_samples=0)
    with pytest.raises(exception.BadConfig):
        dirichlet_joint_cdf(2, 1, 0.5, 0.5, [1.0, 1.0])
    with pytest.raises(exception.BadConfig):
        DirichletCDF([1.0, 1.0, 1.0], exact=True)


def test_cdf_table_matches_pointwise():
    cdf = DirichletCDF([1.0, 2.0, 0.7], n_samples=3000, seed=4)
    grid = np.linspace(0, 1, 7)
    F = cdf.cdf_table(grid, grid)
    for k in range(4):
        for l in range(k, 4):
            for a in (0, 2, 6):
                for b in (1, 3, 6):
                    assert F[k, l, a, b] == pytest.approx(cdf.cdf(k, l, grid[a], grid[b]), abs=1e-12)


def test_exact_matches_monte_carlo():
    grid = np.linspace(0, 1, 11)
    exact = DirichletCDF([1.0, 1.0], exact=True).cdf_table(grid, grid)
    mc = DirichletCDF([1.0, 1.0], n_samples=50000, seed=5).cdf_table(grid, grid)
    npt.assert_allclose(mc, exact, atol=0.015)


def test_monte_carlo_within_three_standard_errors():
    # sigma_1 is uniform under Dir(1, 1), so F_11(u, v) = min(u, v)
    grid = np.linspace(0, 1, 5)
    n_samples = 100000
    F = DirichletCDF([1.0, 1.0], n_samples=n_samples, seed=7).cdf_table(grid, grid)[1, 1]
    p = np.minimum.outer(grid, grid)
    se = np.sqrt(p * (1 - p) / n_samples)
    assert np.all(np.abs(F - p) <= 3 * se + 1e-12)


@pytest.mark.parametrize('exact', [False, True])
def test_block_weights_sum_to_one(exact):
    cdf = DirichletCDF([1.0, 3.0], n_samples=4000, seed=6, exact=exact)
    grid = np.linspace(0, 1, 9)
    w = cdf.block_weights(grid, grid)
    npt.assert_allclose(w.sum(axis=(0, 1)), 1.0, atol=1e-12)
    assert np.all(w >= -1e-12)


# identifiability

def test_order_single_block():
    state = make_state([[0.7]], [3.0])
    ordered = identifiability_order(state)
    npt.assert_array_equal(ordered.m_alpha, state.m_alpha)
    npt.assert_array_equal(ordered.tau, state.tau)


def test_order_swaps_blocks():
    # weighted row means (0.3, -0.1) with e = (1, 1)
    state = make_state([[0.6, 0.0], [0.0, -0.2]], [1.0, 1.0])
    npt.assert_allclose(row_means(state), [0.3, -0.1])
    ordered = identifiability_order(state)
    npt.assert_allclose(ordered.m_alpha, [[-0.2, 0.0], [0.0, 0.6]])
    npt.assert_array_equal(ordered.tau, state.tau[:, ::-1])
    npt.assert_array_equal(ordered.sigma2_alpha, state.sigma2_alpha[::-1, ::-1])


def test_order_idempotent_and_sorted():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(4, 4))
    state = make_state(m + m.T, rng.uniform(1, 5, size=4))
    once = identifiability_order(state)
    twice = identifiability_order(once)
    npt.assert_array_equal(once.m_alpha, twice.m_alpha)
    npt.assert_array_equal(once.e_n, twice.e_n)
    assert np.all(np.diff(row_means(once)) >= 0)


def test_order_ties_by_e():
    state = make_state([[0.0, 0.0], [0.0, 0.0]], [3.0, 1.0])
    npt.assert_array_equal(identifiability_order(state).e_n, [1.0, 3.0])


# residual structure

def test_single_block_is_constant():
    states = {1: make_state([[-1.3]], [5.0]), 2: make_state([[0.0, 2.0], [2.0, 1.0]], [2.0, 2.0])}
    posterior = {1: 1.0, 2: 0.0}
    for u, v in [(0.0, 0.0), (0.2, 0.9), (1.0, 1.0)]:
        assert residual_phi_at(u, v, states, posterior, n_samples=500) == pytest.approx(-1.3)


def test_concentrated_stick_gives_step_function():
    # e = (1e6, 1e6) pins sigma_1 at 1/2
    state = make_state([[-1.0, 0.0], [0.0, 1.0]], [1e6, 1e6])
    states, posterior = {2: state}, {2: 1.0}
    assert residual_phi_at(0.2, 0.3, states, posterior, exact=True) == pytest.approx(-1.0, abs=1e-6)
    assert residual_phi_at(0.2, 0.8, states, posterior, exact=True) == pytest.approx(0.0, abs=1e-6)
    assert residual_phi_at(0.7, 0.9, states, posterior, exact=True) == pytest.approx(1.0, abs=1e-6)


def test_uniform_stick_exact_surface():
    # sigma_1 ~ U(0, 1): P(u, v both in block 1) = 1 - max(u, v), both in block 2 = min(u, v)
    state = make_state([[2.0, 0.0], [0.0, 4.0]], [1.0, 1.0])
    u, v = 0.3, 0.6
    phi = residual_phi_at(u, v, {2: state}, {2: 1.0}, exact=True)
    assert phi == pytest.approx(2.0 * (1 - v) + 4.0 * u)


def test_phi_symmetric():
    states = {2: make_state([[0.5, -0.4], [-0.4, 1.2]], [2.0, 3.0]),
              3: make_state([[0.1, 0.2, 0.3], [0.2, 0.5, -1.0], [0.3, -1.0, 2.0]], [1.0, 2.0, 2.0])}
    posterior = {2: 0.3, 3: 0.7}
    a = residual_phi_at(0.15, 0.8, states, posterior, n_samples=2000, seed=9)
    b = residual_phi_at(0.8, 0.15, states, posterior, n_samples=2000, seed=9)
    assert a == b


def test_prior_e_reading():
    # fitted e_n is concentrated, the prior is uniform
    state = make_state([[-1.0, 0.0], [0.0, 1.0]], [1e6, 1e6])
    fitted = residual_phi_at(0.2, 0.3, {2: state}, {2: 1.0}, exact=True)
    prior = residual_phi_at(0.2, 0.3, {2: state}, {2: 1.0}, exact=True, use_prior_e=True)
    assert prior == pytest.approx(-1.0 * 0.7 + 1.0 * 0.2)
    assert fitted != pytest.approx(prior)


def test_constant_alpha_telescopes():
    c = 0.37
    states = {3: make_state(np.full((3, 3), c), [1.0, 2.0, 0.5])}
    grid = export_grid(states, {3: 1.0}, resolution=6, n_samples=3000, seed=1)
    npt.assert_allclose(grid.phi_hat, c, atol=1e-12)


def test_grid_single_cell():
    states = {2: make_state([[0.5, -0.4], [-0.4, 1.2]], [2.0, 3.0])}
    grid = export_grid(states, {2: 1.0}, resolution=1, n_samples=1000, seed=2)
    assert grid.phi_hat.shape == (1, 1)
    expected = residual_phi_at(0.0, 0.0, states, {2: 1.0}, n_samples=1000, seed=2)
    assert grid.phi_hat[0, 0] == pytest.approx(expected, abs=1e-12)
    assert grid.g_phi_hat[0, 0] == pytest.approx(expit(expected))


def test_grid_symmetric_and_reproducible():
    states = {1: make_state([[0.2]], [4.0]),
              2: make_state([[0.5, -0.4], [-0.4, 1.2]], [2.0, 3.0])}
    posterior = {1: 0.4, 2: 0.6}
    a = export_grid(states, posterior, resolution=11, n_samples=2000, seed=3)
    b = export_grid(states, posterior, resolution=11, n_samples=2000, seed=3, threads=2)
    npt.assert_array_equal(a.phi_hat, a.phi_hat.T)
    npt.assert_array_equal(a.phi_hat, b.phi_hat)
    npt.assert_allclose(a.g_phi_hat, expit(a.phi_hat))
    npt.assert_array_equal(a.u, np.linspace(0, 1, 11))


def test_grid_without_mass():
    with pytest.raises(exception.ContractViolation):
        export_grid({2: None}, {2: 1.0}, resolution=3)


def test_grid_bad_resolution():
    with pytest.raises(exception.BadConfig):
        export_grid({1: make_state([[0.0]], [1.0])}, {1: 1.0}, resolution=0)
