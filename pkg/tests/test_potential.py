import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levywave.exponents import GaugeFunction, LevyExponent, gauge_eval
from levywave.potential import (
    EMPTY_SET,
    KAPPA,
    DiscreteMeasure,
    GridSet,
    capacity,
    capacity_from_kernel,
    capacity_positive,
    dimension_by_capacity,
    energy,
    exhaustive_simplex_min,
    kernel_matrix,
    minimize_on_simplex,
    q_energy,
    q_energy_finite,
    refinement_test,
    riesz_capacity_positive,
    sym_diff_area,
    sym_diff_bounds,
)

SQUARE = GridSet([[1, 2, 1, 2]], 1 / 8)
HALF = GaugeFunction(LevyExponent.isotropic(1, 2.0, 1.0))  # d / alpha = 0.5
pos = st.floats(0.01, 5.0)


# --- symmetric-difference metric -------------------------------------------------

def test_sym_diff_examples():
    assert sym_diff_area(2.0, 5.0) == 3.0
    assert sym_diff_area([1.0, 1.0], [2.0, 2.0]) == 3.0


def test_sym_diff_monte_carlo():
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 2, (10**6, 2))
    inside = lambda p: np.all(pts <= p, axis=1)
    mc = 4.0 * np.mean(inside([1.0, 1.0]) ^ inside([2.0, 2.0]))
    assert mc == pytest.approx(3.0, rel=0.01)


@given(pos, pos, pos, pos)
def test_sym_diff_metric_properties(a, b, c, d):
    s, t = np.array([a, b]), np.array([c, d])
    assert sym_diff_area(s, s) == 0.0
    assert sym_diff_area(s, t) == pytest.approx(sym_diff_area(t, s), rel=1e-12)
    assert sym_diff_area(s, t) >= 0


def test_sym_diff_bounds_positive_on_compact():
    a, b = sym_diff_bounds([1, 1], [2, 2], 20000, 1)
    assert 0 < a <= b < np.inf
    # with every coordinate >= 1, l(s, t) >= |s - t|_1 >= |s - t|
    assert a >= 1.0 - 1e-9


def test_sym_diff_rejects_negative():
    with pytest.raises(ValueError):
        sym_diff_area([-1.0, 1.0], [1.0, 1.0])


# --- grid sets and kernels -------------------------------------------------------

def test_gridset_json_and_points():
    G = GridSet.from_json('{"boxes": [[1, 2, 1, 1.5]], "spacing": 0.25}')
    assert GridSet.from_json(G.to_json()) == G
    assert len(G.points()) == 4 * 2
    seg = GridSet([[1, 2, 1, 1]], 0.25)
    assert np.all(seg.points()[:, 1] == 1.0) and len(seg.points()) == 4


@pytest.mark.parametrize("bad", [{"boxes": [[0, 1, 1, 2]], "spacing": 0.1},
                                 {"boxes": [[1, 2, 1, 2]], "spacing": 0},
                                 {"boxes": [[2, 1, 1, 2]], "spacing": 0.1},
                                 {"spacing": 0.1}])
def test_gridset_rejects(bad):
    with pytest.raises(ValueError):
        GridSet.from_json(bad)


@pytest.mark.parametrize("e", [LevyExponent.isotropic(1, 2.0), LevyExponent.isotropic(3, 1.5),
                               LevyExponent.components([1.0, 2.0]),
                               LevyExponent.isotropic(2, 0.8)])
@pytest.mark.parametrize("G", [GridSet([[1, 2, 1, 2]], 1 / 8), GridSet([[1, 2, 1, 2]], 1 / 16),
                               GridSet([[1, 3, 1, 1.5]], 1 / 8),
                               GridSet([[1, 2, 1, 1.25], [1.5, 2, 1.5, 2.5]], 1 / 8)])
def test_kernel_positive_semidefinite(e, G):
    K = kernel_matrix(G.points(), GaugeFunction(e), G.spacing)
    assert len(K) <= 400
    assert np.linalg.eigvalsh(K).min() >= -1e-8


def test_kernel_diagonal_surrogate():
    K = kernel_matrix(SQUARE.points(), HALF, SQUARE.spacing)
    np.testing.assert_allclose(np.diag(K), gauge_eval(HALF, KAPPA / 8))


# --- energies --------------------------------------------------------------------

def test_energy_examples():
    mu = DiscreteMeasure([[1.0, 1.0]], [1.0], spacing=0.1)
    assert energy(mu, HALF) == pytest.approx(gauge_eval(HALF, KAPPA * 0.1))
    two = DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5])
    assert energy(two, np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(1.5)


def test_energy_translation_invariant():
    pts = SQUARE.points()
    w = np.random.default_rng(2).dirichlet(np.ones(len(pts)))
    a = energy(DiscreteMeasure(pts, w, SQUARE.spacing), HALF)
    b = energy(DiscreteMeasure(pts + [3.0, 0.5], w, SQUARE.spacing), HALF)
    assert a == pytest.approx(b, rel=1e-12)


def test_q_energy_continuity_at_zero():
    mu = DiscreteMeasure.uniform(SQUARE.points(), SQUARE.spacing)
    assert q_energy(mu, HALF, 1e-12) == pytest.approx(energy(mu, HALF), rel=1e-9)


def test_q_energy_integrable_case_stabilizes():
    # |s-t|^-1.5 is integrable on a square: the uniform-measure energy converges,
    # with relative changes shrinking under each refinement
    vals = [q_energy(DiscreteMeasure.uniform(SQUARE.refined(2**k).points(), SQUARE.spacing / 2**k),
                     HALF, 1.0) for k in range(3)]
    changes = [b / a - 1 for a, b in zip(vals, vals[1:])]
    assert changes[1] < 0.1 and changes[1] < changes[0]
    assert q_energy_finite(SQUARE, HALF, 1.0).finite


def test_q_energy_nonintegrable_case_grows():
    res = q_energy_finite(SQUARE, HALF, 1.8)
    assert res.finite is False
    assert all(r >= 1.2 for r in res.ratios)


def test_refinement_methods():
    with pytest.raises(ValueError):
        refinement_test(lambda g: np.eye(1), SQUARE, levels=2, method="increment")
    with pytest.raises(ValueError):
        refinement_test(lambda g: np.eye(1), SQUARE, method="other")
    kfor = lambda grid: kernel_matrix(grid.points(), HALF, grid.spacing, 1.0)
    assert refinement_test(kfor, SQUARE, method="increment").finite
    kfor = lambda grid: kernel_matrix(grid.points(), HALF, grid.spacing, 1.8)
    assert not refinement_test(kfor, SQUARE, method="increment").finite


# --- Frank-Wolfe and capacity ----------------------------------------------------

def test_two_point_capacity():
    res = capacity_from_kernel(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert res.capacity == 2 / 3
    np.testing.assert_array_equal(res.measure.weights, [0.5, 0.5])


def test_singleton_capacity():
    G = GridSet([[1, 1, 1, 1]], 0.1)
    assert capacity(G, HALF).capacity == pytest.approx(1 / gauge_eval(HALF, KAPPA * 0.1))


def test_capacity_translation_exact():
    a = capacity(GridSet([[1, 2, 1, 1.5]], 1 / 8), HALF)
    b = capacity(GridSet([[3, 4, 2, 2.5]], 1 / 8), HALF)
    assert a.capacity == b.capacity


def test_frank_wolfe_monotone_and_converged():
    K = kernel_matrix(SQUARE.points(), HALF, SQUARE.spacing)
    sol = minimize_on_simplex(K, record=True)
    assert sol.converged
    assert np.all(np.diff(sol.history) <= 1e-15 * sol.history[0])
    assert sol.weights.min() >= 0 and sol.weights.sum() == pytest.approx(1.0)


def _brute_simplex_min(K, m):
    n = len(K)
    best = np.inf
    for k in itertools.product(range(m + 1), repeat=n - 1):
        if sum(k) <= m:
            w = np.array(k + (m - sum(k),)) / m
            best = min(best, w @ K @ w)
    return best


def test_exhaustive_oracle_matches_brute_force():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        A = rng.normal(size=(n, n))
        K = A @ A.T + 0.1 * np.eye(n)
        e, w = exhaustive_simplex_min(K, resolution=0.05)
        assert e == pytest.approx(_brute_simplex_min(K, 20), rel=1e-12)
        assert w @ K @ w == pytest.approx(e, rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6))
def test_frank_wolfe_below_grid_oracle(n, seed):
    # the best grid point is within res of the optimum, so the oracle exceeds the
    # true minimum by at most lambda_max * n * res^2
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    K = A @ A.T + 0.05 * np.eye(n)
    fw = capacity_from_kernel(K, tol=1e-10).energy
    ex, _ = exhaustive_simplex_min(K, 0.01)
    assert -1e-12 <= ex - fw <= np.linalg.eigvalsh(K).max() * n * 1e-4 + 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 6), st.integers(1, 3), st.floats(0.5, 2.0), st.integers(0, 10**6))
def test_frank_wolfe_matches_oracle_on_gauge_kernels(n, d, alpha, seed):
    pts = np.random.default_rng(seed).uniform(1, 2, (n, 2))
    K = kernel_matrix(pts, GaugeFunction(LevyExponent.isotropic(d, alpha)), 0.1)
    fw = capacity_from_kernel(K).energy
    ex, _ = exhaustive_simplex_min(K, 0.01)
    assert fw == pytest.approx(ex, rel=1e-3)


# --- positivity and capacity dimension ------------------------------------------

def test_riesz_positivity():
    assert riesz_capacity_positive(SQUARE, 1.5).finite
    assert riesz_capacity_positive(SQUARE, 2.5).finite is False


@pytest.mark.parametrize("d, alpha", [(1, 2.0), (3, 2.0), (4, 2.0), (5, 2.0)])
def test_capacity_positivity_matches_riesz(d, alpha):
    g = GaugeFunction(LevyExponent.isotropic(d, alpha))
    assert bool(capacity_positive(SQUARE, g).finite) == bool(
        riesz_capacity_positive(SQUARE, d / alpha).finite)


def test_capacity_dimension_segment():
    res = dimension_by_capacity(GridSet([[1, 2, 1, 1]], 1 / 16), HALF)
    assert res.bracketed
    assert res.value == pytest.approx(0.5, abs=0.1)


def test_capacity_dimension_empty_set():
    g = GaugeFunction(LevyExponent.isotropic(5, 2.0))
    assert dimension_by_capacity(SQUARE, g).value == EMPTY_SET
