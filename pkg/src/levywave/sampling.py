"""Exact samplers for symmetric stable and Gaussian increments.

Every sampler takes an ``rng`` that may be a :class:`numpy.random.Generator`,
an :class:`RngStream`, or anything :func:`numpy.random.default_rng` accepts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .exponents import COMPONENTS, ISOTROPIC, QUADRATIC, LevyExponent


@dataclass(frozen=True)
class RngStream:
    """A reproducible, independent random stream keyed by (seed, stream_id)."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)


def sample_stable_1d(alpha: float, rng, size=None) -> np.ndarray | float:
    """Symmetric alpha-stable draws with characteristic function exp(-|xi|^alpha).

    Chambers-Mallows-Stuck; alpha = 2 is sqrt(2) times a standard normal.
    """
    if not 0 < alpha <= 2:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    rng = as_generator(rng)
    if alpha == 2:
        return np.sqrt(2.0) * rng.standard_normal(size)
    v = rng.uniform(-np.pi / 2, np.pi / 2, size)
    if alpha == 1:
        return np.tan(v)
    w = rng.exponential(size=size)
    return (np.sin(alpha * v) / np.cos(v) ** (1 / alpha)
            * (np.cos((1 - alpha) * v) / w) ** ((1 - alpha) / alpha))


def sample_positive_stable(beta: float, rng, size=None) -> np.ndarray | float:
    """Positive beta-stable draws with Laplace transform exp(-u^beta) (Kanter)."""
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    rng = as_generator(rng)
    u = rng.uniform(0, np.pi, size)
    e = rng.exponential(size=size)
    a = (np.sin(beta * u) ** (beta / (1 - beta)) * np.sin((1 - beta) * u)
         / np.sin(u) ** (1 / (1 - beta)))
    return (a / e) ** ((1 - beta) / beta)


def unit_draws(exp: LevyExponent, rng, shape=()) -> np.ndarray:
    """Draws with exponent psi at unit area, chi folded out (shape + (d,)).

    For the stable families the returned X has characteristic function
    exp(-psi(xi)/chi); scaling by (area*chi)^(1/alpha_j) gives area*psi.
    For the quadratic form X is already N(0, 2Q).
    """
    rng = as_generator(rng)
    shape = (int(shape),) if np.ndim(shape) == 0 and shape != () else tuple(shape)
    d = exp.d
    if exp.family == QUADRATIC:
        chol = np.linalg.cholesky(2 * exp.q_matrix)
        return rng.standard_normal(shape + (d,)) @ chol.T
    if exp.family == COMPONENTS:
        cols = [sample_stable_1d(a, rng, shape) for a in exp.alphas]
        return np.stack(cols, axis=-1)
    a = exp.alpha
    if a == 2:
        return np.sqrt(2.0) * rng.standard_normal(shape + (d,))
    if d == 1:
        return np.asarray(sample_stable_1d(a, rng, shape))[..., None]
    s = sample_positive_stable(a / 2, rng, shape)
    return np.sqrt(2 * s)[..., None] * rng.standard_normal(shape + (d,))


def area_scale(exp: LevyExponent, area) -> np.ndarray:
    """Per-component factor turning unit draws into increments of the given area."""
    area = np.asarray(area, dtype=float)[..., None]
    if exp.family == QUADRATIC:
        return np.sqrt(area)
    return (area * exp.chi) ** (1 / exp.alphas)


def sample_increment(exp: LevyExponent, area, rng) -> np.ndarray:
    """Noise mass of a region of Lebesgue measure ``area``.

    ``area`` may be an array; the result then has shape area.shape + (d,).
    Zero areas give exact zeros.
    """
    area = np.asarray(area, dtype=float)
    if np.any(area < 0):
        raise ValueError("area must be nonnegative")
    return unit_draws(exp, rng, area.shape) * area_scale(exp, area)


# --- simple-function integrals -------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo, hi] in R^N."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or any(h < l for l, h in zip(lo, hi)):
            raise ValueError(f"invalid box {lo} -> {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def area(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def polygon(self):
        from shapely.geometry import box
        return box(self.lo[0], self.lo[1], self.hi[0], self.hi[1])


@dataclass(frozen=True)
class HalfBox:
    """Right triangle cut from a planar box along one diagonal.

    ``corner`` is the box corner (0..3 for lower-left, lower-right, upper-right,
    upper-left) that carries the right angle.
    """

    lo: tuple[float, float]
    hi: tuple[float, float]
    corner: int = 0

    def __post_init__(self):
        Box(self.lo, self.hi)
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if self.corner not in (0, 1, 2, 3) or len(self.lo) != 2:
            raise ValueError("half-boxes are planar with corner in 0..3")

    dim = 2

    @property
    def area(self) -> float:
        return 0.5 * (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])

    def polygon(self):
        from shapely.geometry import Polygon
        (x0, y0), (x1, y1) = self.lo, self.hi
        pts = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
        del pts[(self.corner + 2) % 4]
        return Polygon(pts)


def _overlap(r1, r2) -> bool:
    if r1.dim != r2.dim:
        raise ValueError("regions live in different dimensions")
    if isinstance(r1, Box) and isinstance(r2, Box):
        return all(min(h1, h2) > max(l1, l2)
                   for l1, h1, l2, h2 in zip(r1.lo, r1.hi, r2.lo, r2.hi))
    return r1.polygon().intersection(r2.polygon()).area > 1e-14 * max(r1.area, r2.area)


@dataclass(frozen=True)
class SimpleFunction:
    """phi = sum_j c_j 1_{A_j} with pairwise disjoint regions A_j."""

    terms: tuple[tuple[Box | HalfBox, float], ...]

    def __post_init__(self):
        terms = tuple((r, float(c)) for r, c in self.terms)
        if not all(np.isfinite(c) for _, c in terms):
            raise ValueError("coefficients must be finite")
        regions = [r for r, _ in terms]
        for i in range(len(regions)):
            for j in range(i + 1, len(regions)):
                if _overlap(regions[i], regions[j]):
                    raise ValueError(f"regions {i} and {j} overlap")
        object.__setattr__(self, "terms", terms)

    def __add__(self, other: "SimpleFunction") -> "SimpleFunction":
        return SimpleFunction(self.terms + other.terms)

    def __rmul__(self, a: float) -> "SimpleFunction":
        return SimpleFunction(tuple((r, a * c) for r, c in self.terms))

    def log_charfn(self, exp: LevyExponent, xi) -> float:
        """-sum_j area(A_j) psi(c_j xi), the log characteristic function."""
        xi = np.asarray(xi, dtype=float)
        return -sum(r.area * float(exp(c * xi)) for r, c in self.terms)


class IsoLevyNoise:
    """One realization of the noise, sampled lazily region by region.

    Regions already drawn are cached, so integrals of different simple
    functions built from the same regions share the same noise.  A new region
    must be disjoint from every region drawn so far.
    """

    def __init__(self, exp: LevyExponent, rng):
        self.exponent = exp
        self._rng = as_generator(rng)
        self._drawn: dict[Hashable, np.ndarray] = {}

    def mass(self, region) -> np.ndarray:
        if region not in self._drawn:
            for other in self._drawn:
                if _overlap(region, other):
                    raise ValueError("region overlaps a previously drawn region")
            self._drawn[region] = sample_increment(self.exponent, region.area, self._rng)
        return self._drawn[region]

    def integrate(self, phi: SimpleFunction) -> np.ndarray:
        out = np.zeros(self.exponent.d)
        for region, c in phi.terms:
            out = out + c * self.mass(region)
        return out


def integrate_simple(exp: LevyExponent, phi: SimpleFunction, rng) -> np.ndarray:
    """Integral of a simple function against a fresh noise realization."""
    return IsoLevyNoise(exp, rng).integrate(phi)


def simple_function(regions: Sequence, coefficients: Sequence[float]) -> SimpleFunction:
    return SimpleFunction(tuple(zip(regions, coefficients)))
