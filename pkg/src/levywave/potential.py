"""Energies and capacities of compact parameter sets.

Measures live on finite point sets.  The kernel phi(|s - t|) is infinite on the
diagonal, so a discrete point is treated as mass spread over its cell and gets
the self-energy phi(kappa * h) with kappa = 1/2.  Finiteness of a continuum
energy is judged by refining the grid and watching the minimized discrete energy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exponents import GaugeFunction, gauge_eval

KAPPA = 0.5
FW_TOL = 1e-6
FW_MAX_ITER = 100_000
DIVERGENCE_RATIO = 1.2
EMPTY_SET = -math.inf


def sym_diff_area(s, t) -> float | np.ndarray:
    """Lebesgue measure of [0, s] symmetric-difference [0, t]."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise ValueError("points must lie in the nonnegative orthant")
    if s.ndim == 0:
        s, t = s[None], t[None]
    out = np.prod(s, -1) + np.prod(t, -1) - 2 * np.prod(np.minimum(s, t), -1)
    return out[()] if np.ndim(out) == 0 else out


def sym_diff_bounds(lo, hi, n_pairs: int, rng=None) -> tuple[float, float]:
    """Empirical constants a, b with a|s-t| <= l(s,t) <= b|s-t| on the box [lo, hi]."""
    rng = np.random.default_rng(rng)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    s = rng.uniform(lo, hi, (n_pairs, len(lo)))
    t = rng.uniform(lo, hi, (n_pairs, len(lo)))
    ratio = sym_diff_area(s, t) / np.linalg.norm(s - t, axis=-1)
    return float(ratio.min()), float(ratio.max())


@dataclass
class DiscreteMeasure:
    support: np.ndarray
    weights: np.ndarray
    spacing: float | None = None

    def __post_init__(self):
        self.support = np.atleast_2d(np.asarray(self.support, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if len(self.weights) != len(self.support):
            raise ValueError("one weight per support point")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        if abs(self.weights.sum() - 1) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {self.weights.sum()!r}")
        if len(np.unique(self.support, axis=0)) != len(self.support):
            raise ValueError("support points must be distinct")

    @classmethod
    def uniform(cls, support, spacing=None):
        support = np.atleast_2d(support)
        return cls(support, np.full(len(support), 1 / len(support)), spacing)

    def to_json(self) -> dict:
        return {"support": self.support.tolist(), "weights": self.weights.tolist(),
                "spacing": self.spacing}


@dataclass
class GridSet:
    """Finite union of boxes in (0, inf)^N discretized at cell centers.

    A box is [lo_1, hi_1, lo_2, hi_2, ...]; a degenerate side (lo == hi) gives a
    single coordinate, so lower-dimensional pieces embed naturally.
    """

    boxes: list
    spacing: float

    def __post_init__(self):
        boxes = [np.asarray(b, dtype=float).reshape(-1, 2) for b in self.boxes]
        if not boxes:
            raise ValueError("boxes: need at least one box")
        dims = {len(b) for b in boxes}
        if len(dims) != 1:
            raise ValueError("boxes: all boxes must have the same dimension")
        for b in boxes:
            if np.any(b[:, 1] < b[:, 0]):
                raise ValueError("boxes: each side needs lo <= hi")
            if np.any(b[:, 0] <= 0):
                raise ValueError("boxes: the set must stay away from the coordinate axes")
        if not self.spacing > 0:
            raise ValueError("spacing: must be positive")
        self.boxes = [b.ravel().tolist() for b in boxes]
        self._boxes = boxes

    @property
    def dim(self) -> int:
        return len(self._boxes[0])

    @classmethod
    def from_json(cls, obj: dict | str) -> "GridSet":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if "boxes" not in obj:
            raise ValueError("boxes: missing required field")
        if "spacing" not in obj:
            raise ValueError("spacing: missing required field")
        return cls(obj["boxes"], float(obj["spacing"]))

    def to_json(self) -> dict:
        return {"boxes": self.boxes, "spacing": self.spacing}

    def refined(self, factor: int = 2) -> "GridSet":
        return GridSet(self.boxes, self.spacing / factor)

    def points(self) -> np.ndarray:
        pts = []
        h = self.spacing
        for b in self._boxes:
            axes = []
            for lo, hi in b:
                n = max(int(round((hi - lo) / h)), 0)
                axes.append(np.array([lo]) if n == 0 else lo + (np.arange(n) + 0.5) * (hi - lo) / n)
            pts.append(np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(b)))
        pts = np.concatenate(pts)
        return np.unique(np.round(pts, 12), axis=0)


def _distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _radial_kernel(fn: Callable, points: np.ndarray, spacing: float) -> np.ndarray:
    r = _distances(points)
    np.fill_diagonal(r, KAPPA * spacing)
    # evaluate on distinct distances only
    key = np.round(r, 12)
    uniq, inv = np.unique(key, return_inverse=True)
    return np.asarray(fn(uniq), dtype=float)[inv].reshape(r.shape)


def kernel_matrix(points, g: GaugeFunction, spacing: float, q: float = 0.0) -> np.ndarray:
    """K_ij = phi(r)/r^q with r = |s_i - s_j|, and r = kappa*h on the diagonal."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return _radial_kernel(lambda r: gauge_eval(g, r) / r**q, points, spacing)


def riesz_kernel(points, beta: float, spacing: float) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return _radial_kernel(lambda r: r ** (-beta), points, spacing)


def quadratic_energy(K: np.ndarray, w: np.ndarray) -> float:
    if not np.all(np.isfinite(K[np.ix_(w > 0, w > 0)])):
        return math.inf
    return float(w @ K @ w)


def energy(mu: DiscreteMeasure, g) -> float:
    """Discrete energy of ``mu``; ``g`` is a gauge or a precomputed kernel matrix."""
    K = g if isinstance(g, np.ndarray) else kernel_matrix(mu.support, g, _spacing(mu))
    return quadratic_energy(K, mu.weights)


def q_energy(mu: DiscreteMeasure, g: GaugeFunction, q: float) -> float:
    n = mu.support.shape[1]
    if not 0 < q < n:
        raise ValueError(f"q must lie in (0, {n})")
    return quadratic_energy(kernel_matrix(mu.support, g, _spacing(mu), q), mu.weights)


def _spacing(mu: DiscreteMeasure) -> float:
    if mu.spacing is None:
        raise ValueError("measure needs a grid spacing for the diagonal term")
    return mu.spacing


@dataclass
class SimplexSolution:
    weights: np.ndarray
    energy: float
    iterations: int
    gap: float
    converged: bool
    history: list = field(default_factory=list, repr=False)


def minimize_on_simplex(K: np.ndarray, tol: float = FW_TOL, max_iter: int = FW_MAX_ITER,
                        w0=None, record: bool = False) -> SimplexSolution:
    """min_w w'Kw over the probability simplex by away-step Frank-Wolfe.

    Uses exact line search; the reported gap is the Frank-Wolfe gap
    2 (w'Kw - min_k (Kw)_k), and the loop stops once gap <= tol * energy.
    """
    K = np.asarray(K, dtype=float)
    n = len(K)
    if n == 0:
        raise ValueError("empty support")
    w = np.full(n, 1 / n) if w0 is None else np.asarray(w0, dtype=float).copy()
    Kw = K @ w
    f = float(w @ Kw)
    history = [f] if record else []
    gap = math.inf
    it = 0
    diag = np.diag(K)
    for it in range(1, max_iter + 1):
        k = int(np.argmin(Kw))
        gap = 2 * (f - Kw[k])
        if gap <= tol * f:
            break
        active = np.flatnonzero(w > 0)
        j = active[np.argmax(Kw[active])]
        away_gap = 2 * (Kw[j] - f)
        if gap >= away_gap or w[j] >= 1:
            # toward vertex k: w + g (e_k - w)
            num = Kw[k] - f
            den = diag[k] - 2 * Kw[k] + f
            gamma = 1.0 if den <= 0 else min(1.0, max(0.0, -num / den))
            w *= 1 - gamma
            w[k] += gamma
            Kw = (1 - gamma) * Kw + gamma * K[:, k]
        else:
            # away from vertex j: w + g (w - e_j), g <= w_j / (1 - w_j)
            gmax = w[j] / (1 - w[j])
            num = f - Kw[j]
            den = f - 2 * Kw[j] + diag[j]
            gamma = gmax if den <= 0 else min(gmax, max(0.0, -num / den))
            w *= 1 + gamma
            w[j] -= gamma
            if gamma == gmax:
                w[j] = 0.0
            Kw = (1 + gamma) * Kw - gamma * K[:, j]
        w = np.maximum(w, 0)
        w /= w.sum()
        f_new = float(w @ Kw)
        # exact line search cannot increase f; guard against rounding drift
        if f_new > f:
            Kw = K @ w
            f_new = min(float(w @ Kw), f)
        f = f_new
        if record:
            history.append(f)
    k = int(np.argmin(Kw))
    gap = max(2 * (f - Kw[k]), 0.0)
    return SimplexSolution(w, f, it, gap, gap <= tol * f, history)


@dataclass
class CapacityResult:
    capacity: float
    measure: DiscreteMeasure
    energy: float
    iterations: int
    gap: float
    converged: bool

    def to_json(self) -> dict:
        return {"capacity": self.capacity, "energy": self.energy,
                "iterations": self.iterations, "gap": self.gap,
                "converged": self.converged, "measure": self.measure.to_json()}


def capacity_from_kernel(K: np.ndarray, support=None, spacing=None, tol: float = FW_TOL,
                         max_iter: int = FW_MAX_ITER) -> CapacityResult:
    K = np.asarray(K, dtype=float)
    if support is None:
        support = np.arange(len(K), dtype=float)[:, None]
    sol = minimize_on_simplex(K, tol, max_iter)
    cap = 0.0 if not math.isfinite(sol.energy) else 1 / sol.energy
    mu = DiscreteMeasure(support, sol.weights, spacing)
    return CapacityResult(cap, mu, sol.energy, sol.iterations, sol.gap, sol.converged)


def capacity(G: GridSet, g: GaugeFunction, tol: float = FW_TOL,
             max_iter: int = FW_MAX_ITER) -> CapacityResult:
    """Discrete capacity [min_mu I(mu)]^-1 of the grid points of G."""
    pts = G.points()
    return capacity_from_kernel(kernel_matrix(pts, g, G.spacing), pts, G.spacing, tol, max_iter)


# --- finiteness by refinement -----------------------------------------------------

@dataclass
class RefinementTest:
    finite: bool | None
    energies: list
    ratios: list
    spacings: list
    inconclusive: bool = False
    method: str = "ratio"


def refinement_test(kernel_for: Callable[[GridSet], np.ndarray], G: GridSet, levels: int = 3,
                    threshold: float = DIVERGENCE_RATIO, tol: float = 1e-4,
                    method: str = "ratio") -> RefinementTest:
    """Minimized energy on successively halved grids; infinite if it keeps growing.

    ``method="ratio"``: infinite when the ratio of consecutive energies
    exceeds ``threshold`` at every refinement, finite when no ratio does,
    inconclusive otherwise.

    ``method="increment"``: compares consecutive energy increments.  They
    shrink geometrically when the continuum energy is finite, grow when it
    blows up like a power of 1/h and stay level at the logarithmic borderline,
    so the last increment ratio is tested against 1.  Needs three levels.
    """
    if method not in ("ratio", "increment"):
        raise ValueError(f"unknown method {method!r}")
    if levels < (3 if method == "increment" else 2):
        raise ValueError("too few refinement levels")
    energies, spacings = [], []
    grid = G
    for _ in range(levels):
        K = kernel_for(grid)
        energies.append(minimize_on_simplex(K, tol).energy)
        spacings.append(grid.spacing)
        grid = grid.refined()
    if method == "increment":
        inc = np.diff(energies)
        ratios = [b / a if a > 0 else 0.0 for a, b in zip(inc, inc[1:])]
        return RefinementTest(not ratios[-1] > 1.0, energies, ratios, spacings, method=method)
    ratios = [b / a for a, b in zip(energies, energies[1:])]
    big = [r > threshold for r in ratios]
    if all(big):
        return RefinementTest(False, energies, ratios, spacings)
    if not any(big):
        return RefinementTest(True, energies, ratios, spacings)
    return RefinementTest(None, energies, ratios, spacings, inconclusive=True)


def q_energy_finite(G: GridSet, g: GaugeFunction, q: float, **kw) -> RefinementTest:
    return refinement_test(lambda grid: kernel_matrix(grid.points(), g, grid.spacing, q), G, **kw)


def capacity_positive(G: GridSet, g: GaugeFunction, **kw) -> RefinementTest:
    return q_energy_finite(G, g, 0.0, **kw)


def riesz_capacity_positive(G: GridSet, beta: float, **kw) -> RefinementTest:
    """Positivity of the beta-dimensional Riesz capacity of G, by refinement."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    return refinement_test(lambda grid: riesz_kernel(grid.points(), beta, grid.spacing), G, **kw)


@dataclass
class CapacityDimension:
    value: float
    bracketed: bool
    steps: list = field(default_factory=list, repr=False)


def dimension_by_capacity(G: GridSet, g: GaugeFunction, tol: float = 0.02,
                          levels: int = 4, q_min: float = 1e-3,
                          method: str = "increment") -> CapacityDimension:
    """sup{q in (0, N): the minimized q-energy is finite}, by bisection.

    Returns EMPTY_SET when even q -> 0 has infinite energy.  If the energy is
    still finite near q = N the result is the upper endpoint, flagged as not
    bracketed.
    """
    n = G.dim
    steps = []

    def finite(q):
        res = q_energy_finite(G, g, q, levels=levels, method=method)
        steps.append((q, res.finite, res.ratios))
        # an inconclusive trend is treated as divergence
        return bool(res.finite)

    lo, hi = q_min, n - q_min
    if not finite(lo):
        return CapacityDimension(EMPTY_SET, False, steps)
    if finite(hi):
        return CapacityDimension(hi, False, steps)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if finite(mid):
            lo = mid
        else:
            hi = mid
    return CapacityDimension((lo + hi) / 2, True, steps)


def _bounded_tuples(length: int, total: int) -> np.ndarray:
    """All nonnegative integer tuples of the given length with sum <= total."""
    out = np.zeros((1, 0), dtype=np.int64)
    for _ in range(length):
        sums = out.sum(axis=1)
        parts = [np.column_stack([out[sums <= total - v], np.full((sums <= total - v).sum(), v)])
                 for v in range(total + 1)]
        out = np.concatenate(parts)
    return out


def exhaustive_simplex_min(K: np.ndarray, resolution: float = 0.01) -> tuple[float, np.ndarray]:
    """Minimum of w'Kw over the simplex grid {w = k/m, sum k = m}, m = 1/resolution.

    Enumerates every grid value of the first n-2 weights; along the remaining
    edge the energy is a quadratic in one integer variable, minimized exactly by
    checking the endpoints and the two integers around its vertex.
    """
    K = np.asarray(K, dtype=float)
    n = len(K)
    m = int(round(1 / resolution))
    if n == 1:
        return float(K[0, 0]), np.ones(1)
    p, q = n - 2, n - 1
    heads = _bounded_tuples(p, m).astype(float)
    r = m - heads.sum(axis=1)
    Kh = K[:p, :p]
    c2 = K[p, p] - 2 * K[p, q] + K[q, q]
    c1 = 2 * heads @ (K[:p, p] - K[:p, q]) + 2 * (K[p, q] - K[q, q]) * r
    c0 = np.einsum("ij,jk,ik->i", heads, Kh, heads) + 2 * r * (heads @ K[:p, q]) + K[q, q] * r**2
    if c2 > 0:
        vertex = np.clip(-c1 / (2 * c2), 0, r)
        cands = [np.zeros_like(r), r, np.floor(vertex), np.ceil(vertex)]
    else:
        cands = [np.zeros_like(r), r]
    A = np.stack(cands, axis=1)
    E = c0[:, None] + c1[:, None] * A + c2 * A**2
    i, j = np.unravel_index(int(np.argmin(E)), E.shape)
    a = A[i, j]
    w = np.concatenate([heads[i], [a, r[i] - a]]) / m
    return float(E[i, j]) / m**2, w
