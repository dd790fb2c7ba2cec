import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from levywave.exponents import (
    GaugeFunction,
    LevyExponent,
    Verdict,
    dimension_formula,
    exponent_from_json,
    gauge_eval,
    psi_eval,
    scaling_witness,
    upper_index,
    zero_criterion,
)

alphas = st.floats(0.3, 2.0)
dims = st.integers(1, 5)


def test_psi_examples():
    assert psi_eval(LevyExponent.isotropic(1, 2.0, 0.5), 2.0) == pytest.approx(2.0)
    assert psi_eval(LevyExponent.components([1, 2], 1.0), [3.0, 2.0]) == pytest.approx(7.0)
    for e in (LevyExponent.isotropic(3, 1.3), LevyExponent.components([0.5, 2.0]),
              LevyExponent.quadratic(np.eye(2))):
        assert psi_eval(e, np.zeros(e.d)) == 0.0


def test_psi_vectorized_shape():
    e = LevyExponent.isotropic(2, 1.5)
    xi = np.random.default_rng(0).normal(size=(4, 5, 2))
    assert psi_eval(e, xi).shape == (4, 5)
    assert psi_eval(LevyExponent.isotropic(1, 2.0), np.linspace(0, 1, 7)).shape == (7,)


@given(dims, alphas, st.floats(0.1, 3.0), st.integers(0, 10**6))
def test_psi_symmetric_nonnegative_homogeneous(d, a, c, seed):
    e = LevyExponent.isotropic(d, a, 0.7)
    xi = np.random.default_rng(seed).normal(size=d)
    p = psi_eval(e, xi)
    assert p >= 0
    assert psi_eval(e, -xi) == pytest.approx(p, rel=1e-12)
    assert psi_eval(e, c * xi) == pytest.approx(c**a * p, rel=1e-10)


def test_quadratic_matches_isotropic_gaussian():
    xi = np.random.default_rng(1).normal(size=(10, 3))
    iso = LevyExponent.isotropic(3, 2.0, 0.5)
    q = LevyExponent.quadratic(0.5 * np.eye(3))
    np.testing.assert_allclose(psi_eval(q, xi), psi_eval(iso, xi), rtol=1e-12)


@pytest.mark.parametrize("bad, field", [
    ({"family": "isotropic_stable", "d": 1, "alpha": 2.5}, "alpha"),
    ({"family": "isotropic_stable", "d": 0, "alpha": 1.0}, "d"),
    ({"family": "isotropic_stable", "d": 1, "alpha": 1.0, "chi": -1}, "chi"),
    ({"family": "stable_components", "d": 2, "alpha": [1.0]}, "alpha"),
    ({"family": "quadratic_form", "d": 2, "Q": [1, 2, 3, 4]}, "Q"),
    ({"family": "quadratic_form", "d": 2, "Q": [1, 0, 0, -1]}, "Q"),
    ({"family": "nope", "d": 1}, "family"),
    ({"d": 1}, "family"),
])
def test_invalid_exponents_name_field(bad, field):
    with pytest.raises(ValueError, match=field):
        exponent_from_json(bad)


def test_json_round_trip():
    for e in (LevyExponent.isotropic(2, 1.5, 0.3), LevyExponent.components([1.0, 2.0], 2.0),
              LevyExponent.quadratic([[2.0, 0.5], [0.5, 1.0]])):
        assert exponent_from_json(json.dumps(e.to_json())) == e


# --- gauge: closed forms against independent oracles ------------------------------

def test_gauge_examples():
    g = GaugeFunction(LevyExponent.isotropic(1, 2.0, 0.5))
    assert gauge_eval(g, 1.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-12)
    assert gauge_eval(g, 4.0) == pytest.approx(0.5 / math.sqrt(2 * math.pi), rel=1e-12)
    g2 = GaugeFunction(LevyExponent.components([2, 2], 0.5))
    assert gauge_eval(g2, 1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-12)


@given(dims, st.floats(0.05, 3.0), st.floats(0.01, 100.0))
def test_gauge_gaussian_density_oracle(d, chi, lam):
    # exp(-lam chi |xi|^2) is the char. fn. of N(0, 2 lam chi I); phi is its density at 0
    g = GaugeFunction(LevyExponent.isotropic(d, 2.0, chi))
    assert gauge_eval(g, lam) == pytest.approx((4 * math.pi * lam * chi) ** (-d / 2), rel=1e-12)


def test_gauge_cauchy_density_oracle():
    g = GaugeFunction(LevyExponent.isotropic(1, 1.0, 0.8))
    for lam in (0.1, 1.0, 7.0):
        assert gauge_eval(g, lam) == pytest.approx(1 / (math.pi * lam * 0.8), rel=1e-12)


def test_gauge_quadratic_form_oracle():
    Q = np.array([[2.0, 0.3], [0.3, 1.0]])
    g = GaugeFunction(LevyExponent.quadratic(Q))
    # density at 0 of N(0, 2 lam Q)
    lam = 0.7
    expect = 1 / (2 * math.pi * math.sqrt(np.linalg.det(2 * lam * Q)))
    assert gauge_eval(g, lam) == pytest.approx(expect, rel=1e-12)


def test_gauge_cartesian_quadrature_oracle():
    # Cartesian 2-D integral, independent of the radial reduction
    e = LevyExponent.isotropic(2, 1.5, 1.0)
    R = 30.0
    val, _ = integrate.dblquad(lambda y, x: math.exp(-math.hypot(x, y) ** 1.5), -R, R, -R, R,
                               epsabs=1e-12, epsrel=1e-10)
    assert gauge_eval(GaugeFunction(e), 1.0) == pytest.approx(val / (2 * math.pi) ** 2, rel=1e-6)
    c = LevyExponent.components([0.8, 1.6], 1.3)
    one = [integrate.quad(lambda x, a=a: math.exp(-1.3 * abs(x) ** a), -np.inf, np.inf)[0]
           for a in (0.8, 1.6)]
    assert gauge_eval(GaugeFunction(c), 1.0) == pytest.approx(
        one[0] * one[1] / (2 * math.pi) ** 2, rel=1e-7)


@pytest.mark.parametrize("e", [
    LevyExponent.isotropic(1, 0.7, 0.5), LevyExponent.isotropic(3, 1.5, 2.0),
    LevyExponent.components([0.6, 1.9, 1.0], 0.4),
    LevyExponent.quadratic([[1.5, -0.2], [-0.2, 0.5]]),
])
def test_gauge_closed_vs_quadrature(e):
    closed, quad = GaugeFunction(e), GaugeFunction(e, mode="quadrature")
    for lam in (1e-3, 0.1, 1.0, 30.0):
        assert gauge_eval(quad, lam) == pytest.approx(gauge_eval(closed, lam), rel=1e-6)


@given(dims, alphas, st.floats(0.01, 10), st.floats(1.01, 5))
def test_gauge_positive_decreasing(d, a, lam, factor):
    g = GaugeFunction(LevyExponent.isotropic(d, a, 1.0))
    assert 0 < gauge_eval(g, lam * factor) < gauge_eval(g, lam)


def test_gauge_rejects_nonpositive_lambda():
    g = GaugeFunction(LevyExponent.isotropic(1, 2.0))
    for lam in (0.0, -1.0, [1.0, 0.0]):
        with pytest.raises(ValueError):
            gauge_eval(g, lam)


# --- index, criterion, dimension --------------------------------------------------

def test_upper_index_examples():
    assert upper_index(GaugeFunction(LevyExponent.isotropic(1, 2.0))) == pytest.approx(0.5)
    assert upper_index(GaugeFunction(LevyExponent.components([1, 2]))) == pytest.approx(1.5)
    assert upper_index(GaugeFunction(LevyExponent.quadratic(np.eye(3)))) == pytest.approx(1.5)


def test_upper_index_quadrature_fit():
    for e, idx in ((LevyExponent.isotropic(2, 1.5), 2 / 1.5), (LevyExponent.components([1, 2]), 1.5)):
        assert upper_index(GaugeFunction(e, mode="quadrature")) == pytest.approx(idx, abs=1e-4)


def test_zero_criterion_examples():
    assert zero_criterion(GaugeFunction(LevyExponent.isotropic(3, 2.0))) == Verdict.ZEROS_EXIST
    assert zero_criterion(GaugeFunction(LevyExponent.isotropic(4, 2.0))) == Verdict.NO_ZEROS
    assert zero_criterion(GaugeFunction(LevyExponent.components([1, 1]))) == Verdict.NO_ZEROS


def test_zero_criterion_quadrature_boundary_inconclusive():
    g = GaugeFunction(LevyExponent.isotropic(2, 1.0), mode="quadrature")
    assert zero_criterion(g) == Verdict.INCONCLUSIVE
    g = GaugeFunction(LevyExponent.isotropic(1, 1.0), mode="quadrature")
    assert zero_criterion(g) == Verdict.ZEROS_EXIST


def test_zero_criterion_matches_integral():
    # int_0^1 lam phi(lam) dlam is finite iff the power is below 2
    for d, a in ((1, 0.8), (2, 1.5), (3, 1.0)):
        g = GaugeFunction(LevyExponent.isotropic(d, a))
        p = g.exponent_sum
        finite = p < 2
        assert (zero_criterion(g) == Verdict.ZEROS_EXIST) == finite


def test_dimension_formula_examples():
    assert dimension_formula(GaugeFunction(LevyExponent.isotropic(1, 2.0)), 2) == pytest.approx(1.5)
    assert dimension_formula(GaugeFunction(LevyExponent.components([1, 2])), 2) == pytest.approx(0.5)
    assert dimension_formula(GaugeFunction(LevyExponent.isotropic(4, 2.0)), 2) == pytest.approx(0.0)
    assert dimension_formula(GaugeFunction(LevyExponent.isotropic(5, 2.0)), 2) < 0


def test_scaling_witness_examples():
    assert scaling_witness(LevyExponent.isotropic(1, 1.5), 2).A_a == pytest.approx(2**1.5)
    assert scaling_witness(LevyExponent.components([1, 2]), 0.5).A_a == pytest.approx(0.25)
    for e in (LevyExponent.isotropic(2, 0.9), LevyExponent.components([1.2, 0.4]),
              LevyExponent.quadratic(np.eye(2))):
        assert scaling_witness(e, 1.0).A_a == 1.0


@settings(max_examples=30)
@given(st.lists(st.floats(0.3, 2.0), min_size=1, max_size=4), st.floats(0.05, 20))
def test_scaling_witness_holds(alist, a):
    w = scaling_witness(LevyExponent.components(alist), a, verify=2000, rng=0)
    assert w.empirical_min_ratio >= w.A_a * (1 - 1e-12)
