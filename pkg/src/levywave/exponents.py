"""Symmetric Lévy exponents, their gauge functions, and the zero-set criteria.

Three exponent families are supported:

* ``isotropic_stable``:  psi(xi) = chi * |xi|^alpha
* ``stable_components``: psi(xi) = chi * sum_j |xi_j|^alpha_j
* ``quadratic_form``:    psi(xi) = xi' Q xi

The gauge function is phi(lam) = (2 pi)^-d * int exp(-lam psi(xi)) dxi, i.e. the
density at the origin of the associated Lévy process at time ``lam``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, special, stats

ISOTROPIC = "isotropic_stable"
COMPONENTS = "stable_components"
QUADRATIC = "quadratic_form"
FAMILIES = (ISOTROPIC, COMPONENTS, QUADRATIC)

# geometric lambda grid used by the numeric upper-index fit
INDEX_GRID = (1e-6, 1e-2, 25)
INDEX_MIN_R2 = 0.999
BOUNDARY_BAND = 0.05


class IndexUnresolved(ValueError):
    """The log-log fit of the gauge did not look like a power law."""


class QuadratureError(RuntimeError):
    pass


class Verdict(str, enum.Enum):
    ZEROS_EXIST = "ZerosExist"
    NO_ZEROS = "NoZeros"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class LevyExponent:
    family: str
    d: int
    alpha: float | tuple[float, ...] | None = None
    chi: float = 1.0
    Q: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family: unknown exponent family {self.family!r}")
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise ValueError(f"d: must be a positive integer, got {self.d!r}")
        if not (self.chi > 0 and math.isfinite(self.chi)):
            raise ValueError(f"chi: must be positive, got {self.chi!r}")
        if self.family == ISOTROPIC:
            a = float(self.alpha)
            if not 0 < a <= 2:
                raise ValueError(f"alpha: must lie in (0, 2], got {a}")
            object.__setattr__(self, "alpha", a)
        elif self.family == COMPONENTS:
            a = tuple(float(v) for v in np.atleast_1d(self.alpha))
            if len(a) != self.d:
                raise ValueError(f"alpha: need {self.d} indices, got {len(a)}")
            if not all(0 < v <= 2 for v in a):
                raise ValueError(f"alpha: every index must lie in (0, 2], got {a}")
            object.__setattr__(self, "alpha", a)
        else:
            q = np.asarray(self.Q, dtype=float)
            if q.size != self.d * self.d:
                raise ValueError(f"Q: need {self.d}x{self.d} entries, got {q.size}")
            q = q.reshape(self.d, self.d)
            if not np.allclose(q, q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(q).max())):
                raise ValueError("Q: matrix must be symmetric")
            if np.linalg.eigvalsh(q).min() <= 0:
                raise ValueError("Q: matrix must be positive definite")
            object.__setattr__(self, "Q", tuple(tuple(row) for row in q))
            object.__setattr__(self, "alpha", 2.0)

    # convenience constructors
    @classmethod
    def isotropic(cls, d: int, alpha: float, chi: float = 1.0) -> "LevyExponent":
        return cls(ISOTROPIC, d, alpha=alpha, chi=chi)

    @classmethod
    def components(cls, alphas: Sequence[float], chi: float = 1.0) -> "LevyExponent":
        return cls(COMPONENTS, len(alphas), alpha=tuple(alphas), chi=chi)

    @classmethod
    def quadratic(cls, Q) -> "LevyExponent":
        q = np.atleast_2d(np.asarray(Q, dtype=float))
        return cls(QUADRATIC, q.shape[0], Q=q)

    @property
    def q_matrix(self) -> np.ndarray:
        return np.array(self.Q, dtype=float)

    @property
    def alphas(self) -> np.ndarray:
        """Per-component stability indices (length d)."""
        if self.family == COMPONENTS:
            return np.array(self.alpha)
        return np.full(self.d, float(self.alpha))

    def __call__(self, xi) -> np.ndarray:
        return psi_eval(self, xi)

    def to_json(self) -> dict:
        out: dict = {"family": self.family, "d": int(self.d)}
        if self.family == QUADRATIC:
            out["Q"] = [v for row in self.Q for v in row]
        else:
            out["alpha"] = list(self.alpha) if self.family == COMPONENTS else self.alpha
            out["chi"] = self.chi
        return out


def exponent_from_json(obj: dict | str) -> LevyExponent:
    """Build an exponent from its JSON object (or a JSON string)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValueError("exponent: expected a JSON object")
    for key in ("family", "d"):
        if key not in obj:
            raise ValueError(f"{key}: missing required field")
    family = obj["family"]
    if family not in FAMILIES:
        raise ValueError(f"family: unknown exponent family {family!r}")
    d = obj["d"]
    if isinstance(d, bool) or not isinstance(d, int):
        raise ValueError(f"d: must be an integer, got {d!r}")
    if family == QUADRATIC:
        if "Q" not in obj:
            raise ValueError("Q: missing required field for quadratic_form")
        return LevyExponent(QUADRATIC, d, Q=np.asarray(obj["Q"], dtype=float))
    if "alpha" not in obj:
        raise ValueError("alpha: missing required field")
    chi = obj.get("chi", 1.0)
    if not isinstance(chi, (int, float)) or isinstance(chi, bool):
        raise ValueError(f"chi: must be a number, got {chi!r}")
    alpha = obj["alpha"]
    if family == ISOTROPIC and not isinstance(alpha, (int, float)):
        raise ValueError(f"alpha: must be a number for isotropic_stable, got {alpha!r}")
    if family == COMPONENTS and isinstance(alpha, (int, float)):
        alpha = [alpha] * d
    return LevyExponent(family, d, alpha=alpha, chi=float(chi))


def psi_eval(exp: LevyExponent, xi) -> np.ndarray | float:
    """Evaluate psi at ``xi``; the last axis of ``xi`` has length d.

    For d = 1 a scalar or a 1-D array of scalars is also accepted.
    """
    xi = np.asarray(xi, dtype=float)
    if exp.d == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
        xi = xi[..., None]
    if xi.shape[-1] != exp.d:
        raise ValueError(f"xi: expected last dimension {exp.d}, got {xi.shape[-1]}")
    if exp.family == ISOTROPIC:
        out = exp.chi * np.linalg.norm(xi, axis=-1) ** exp.alpha
    elif exp.family == COMPONENTS:
        out = exp.chi * np.sum(np.abs(xi) ** exp.alphas, axis=-1)
    else:
        out = np.einsum("...i,ij,...j->...", xi, exp.q_matrix, xi)
    return out[()] if out.ndim == 0 else out


def _sphere_area(d: int) -> float:
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass(frozen=True)
class GaugeFunction:
    """phi(lam) for a given exponent, by closed form or by 1-D quadrature.

    The quadrature path reduces to radial (isotropic) or product (components,
    quadratic form after diagonalising Q) integrals before integrating.
    """

    exponent: LevyExponent
    mode: str = "closed"
    rtol: float = 1e-8
    tail_tol: float = 1e-12
    max_extensions: int = 200
    _prefactor: float = field(init=False, repr=False, default=0.0)

    def __post_init__(self):
        if self.mode not in ("closed", "quadrature"):
            raise ValueError(f"mode: expected 'closed' or 'quadrature', got {self.mode!r}")
        e = self.exponent
        if e.family == ISOTROPIC:
            a, d = e.alpha, e.d
            c = _sphere_area(d) * (2 * math.pi) ** -d * math.gamma(d / a) / a
            c *= e.chi ** (-d / a)
        elif e.family == COMPONENTS:
            c = 1.0
            for a in e.alphas:
                c *= 2 * math.gamma(1 / a) / a / (2 * math.pi) * e.chi ** (-1 / a)
        else:
            c = (4 * math.pi) ** (-e.d / 2) / math.sqrt(np.linalg.det(e.q_matrix))
        object.__setattr__(self, "_prefactor", c)

    @property
    def exponent_sum(self) -> float:
        """Power p with phi(lam) = prefactor * lam^-p for the homogeneous families."""
        e = self.exponent
        if e.family == ISOTROPIC:
            return e.d / e.alpha
        if e.family == COMPONENTS:
            return float(np.sum(1 / e.alphas))
        return e.d / 2

    def __call__(self, lam):
        return gauge_eval(self, lam)

    def closed_form(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self._prefactor * lam ** (-self.exponent_sum)

    def quadrature(self, lam: float) -> float:
        e = self.exponent
        if e.family == ISOTROPIC:
            return (_sphere_area(e.d) * (2 * math.pi) ** -e.d
                    * self._radial(lambda r: lam * e.chi * r**e.alpha, e.d - 1,
                                   (lam * e.chi) ** (-1 / e.alpha)))
        if e.family == COMPONENTS:
            out = 1.0
            for a in e.alphas:
                scale = (lam * e.chi) ** (-1 / a)
                out *= 2 * self._radial(lambda r, a=a: lam * e.chi * r**a, 0, scale)
                out /= 2 * math.pi
            return out
        out = 1.0
        for ev in np.linalg.eigvalsh(e.q_matrix):
            scale = (lam * ev) ** -0.5
            out *= 2 * self._radial(lambda r, ev=ev: lam * ev * r * r, 0, scale) / (2 * math.pi)
        return out

    def _radial(self, expo, power: int, scale: float) -> float:
        """int_0^inf r^power exp(-expo(r)) dr, extended until the tail is negligible."""
        def f(u):
            return u**power * math.exp(-expo(u * scale))

        total, _ = integrate.quad(f, 0, 1.0, epsrel=self.rtol, epsabs=0, limit=200)
        lo = 1.0
        for _ in range(self.max_extensions):
            piece, _ = integrate.quad(f, lo, 2 * lo, epsrel=self.rtol, epsabs=0, limit=200)
            total += piece
            lo *= 2
            if piece <= self.tail_tol * total:
                return total * scale ** (power + 1)
        raise QuadratureError("radial integral did not converge; cutoff too small")


def gauge_eval(g: GaugeFunction, lam):
    """phi(lam) for scalar or array ``lam`` > 0."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(~(lam_arr > 0)):
        raise ValueError("lambda must be strictly positive")
    if g.mode == "closed":
        out = g.closed_form(lam_arr)
    else:
        out = np.vectorize(g.quadrature, otypes=[float])(lam_arr)
    return float(out) if out.ndim == 0 else out


def _loglog_fit(g: GaugeFunction):
    lo, hi, n = INDEX_GRID
    lam = np.geomspace(lo, hi, n)
    phi = gauge_eval(g, lam)
    fit = stats.linregress(np.log(lam), np.log(phi))
    r2 = fit.rvalue**2
    if r2 < INDEX_MIN_R2:
        raise IndexUnresolved(f"log-log fit R^2 = {r2:.6f} below {INDEX_MIN_R2}")
    return fit.slope


def upper_index(g: GaugeFunction) -> float:
    """limsup of log phi(lam) / log(1/lam) as lam -> 0."""
    if g.mode == "closed":
        return g.exponent_sum
    return -_loglog_fit(g)


def zero_criterion(g: GaugeFunction) -> Verdict:
    """Decide whether int_0^1 lam phi(lam) dlam is finite."""
    if g.mode == "closed":
        # homogeneous gauges are exact power laws; index == 2 diverges logarithmically
        return Verdict.ZEROS_EXIST if g.exponent_sum < 2 else Verdict.NO_ZEROS
    s = 1 + _loglog_fit(g)
    if abs(s + 1) < BOUNDARY_BAND:
        return Verdict.INCONCLUSIVE
    return Verdict.ZEROS_EXIST if s > -1 else Verdict.NO_ZEROS


def dimension_formula(g: GaugeFunction, N: int = 2) -> float:
    """N minus the upper index; a negative value means the zero set is empty."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return N - upper_index(g)


@dataclass(frozen=True)
class ScalingWitness:
    a: float
    A_a: float
    empirical_min_ratio: float | None = None


def scaling_witness(exp: LevyExponent, a: float, verify: int = 0, rng=None) -> ScalingWitness:
    """Constant A_a with psi(a xi) >= A_a psi(xi).

    With ``verify`` > 0 the bound is also checked on that many random xi and the
    smallest observed ratio is reported.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    if exp.family == COMPONENTS:
        A = float(np.min(a ** exp.alphas))
    else:
        A = float(a ** float(exp.alpha))
    if not verify:
        return ScalingWitness(a, A)
    rng = np.random.default_rng(rng)
    xi = rng.standard_normal((verify, exp.d)) * np.exp(rng.uniform(-5, 5, (verify, 1)))
    ratio = float(np.min(psi_eval(exp, a * xi) / psi_eval(exp, xi)))
    if A - ratio > 1e-12 * max(1.0, A):
        raise AssertionError(f"scaling witness violated: ratio {ratio} < A_a {A}")
    return ScalingWitness(a, A, ratio)
