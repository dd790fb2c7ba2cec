"""Approximate zero sets of simulated wave solutions and their statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .exponents import GaugeFunction, LevyExponent, Verdict, gauge_eval, zero_criterion
from .fields import RotatedLattice, SolutionField, sample_apex, simulate_wave
from .sampling import RngStream, area_scale, as_generator

# zero-detection threshold in units of the one-cell increment scale; calibrated so
# the Gaussian d=1 zero set reproduces box dimension 1.5 (then held fixed)
EPS_FACTOR = 2.0
MIN_BOXES = 10
MIN_SCALES = 4

# hit-frequency profile thresholds, frozen from pilot sweeps
SUBCRITICAL_MIN_HIT = 0.95
SUPERCRITICAL_MAX_HIT = 0.1
DECAY_FACTOR = 1.5
DECAY_REGIME = 0.5


class EmptyZeroSet(ValueError):
    """No zero set at this resolution."""


@dataclass
class ZeroSetSample:
    epsilon: float | np.ndarray
    points: np.ndarray      # (k, 2) apex coordinates (t, x)
    indices: np.ndarray     # (k, 2) window-relative rotated node indices (m, n)
    h: float
    window: tuple[int, int]  # number of apex nodes along each rotated axis

    @classmethod
    def from_indices(cls, indices, h: float = 1.0, window=None, epsilon=np.inf):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1, 2)
        if window is None:
            window = tuple(int(v) for v in idx.max(axis=0) + 1) if len(idx) else (0, 0)
        t = (idx[:, 0] + idx[:, 1]) * h / 2
        x = (idx[:, 1] - idx[:, 0]) * h / 2
        return cls(epsilon, np.column_stack([t, x]), idx, h, window)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass
class DimensionEstimate:
    slope: float
    stderr: float
    r_squared: float
    scale_range: tuple[float, float]
    scales: np.ndarray
    counts: np.ndarray


def lattice_epsilon(exp: LevyExponent, lattice: RotatedLattice, factor: float = EPS_FACTOR):
    """Per-apex threshold: factor times the typical one-cell increment of u.

    Moving an apex by one lattice step adds a strip of area about t*h, so the
    typical change of u is half the increment scale of that area.
    """
    t, _ = lattice.apex_grid()
    area = np.maximum(t, lattice.h) * lattice.h
    return factor * 0.5 * area_scale(exp, area).max(axis=-1)


def detect_zeros(field: SolutionField, epsilon, t_min: float = 0.0) -> ZeroSetSample:
    """Apexes with t > 0 (and t >= t_min) where the Euclidean norm of u is <= epsilon.

    ``epsilon`` is a scalar or an array over the apex grid.
    """
    if field.replicas is not None:
        raise ValueError("detect_zeros expects a single realization")
    eps = np.asarray(epsilon, dtype=float)
    if np.any(~(eps >= 0)):
        raise ValueError("epsilon must be nonnegative")
    t, x = field.coordinates()
    norm = np.linalg.norm(field.values, axis=-1)
    keep = field.valid & (t > 0) & (t >= t_min) & (norm <= eps)
    idx = np.argwhere(keep)
    return ZeroSetSample(epsilon, np.column_stack([t[keep], x[keep]]), idx,
                         field.lattice.h, tuple(norm.shape))


def default_scales(window_side: int) -> np.ndarray:
    """Dyadic box sides (in lattice cells) from 4 up to a window side over 8."""
    s = [4]
    while s[-1] * 2 <= window_side / 8:
        s.append(s[-1] * 2)
    return np.array(s)


def box_counting_dimension(sample: ZeroSetSample, scales=None) -> DimensionEstimate:
    """Least-squares slope of log N(delta) against log(1/delta).

    Scales are box sides in lattice cells; scales holding fewer than ten
    occupied boxes are dropped.
    """
    if len(sample) == 0:
        raise EmptyZeroSet("no zero set at this resolution")
    if scales is None:
        scales = default_scales(min(sample.window) - 1)
    scales = np.asarray(scales, dtype=np.int64)
    if np.any(scales < 2):
        raise ValueError("box sides must be at least two lattice cells")
    # a window of W nodes spans W - 1 cells; the last node joins the last box
    last = np.maximum((np.asarray(sample.window) - 1) // scales[:, None], 1) - 1
    counts = np.array([len(np.unique(np.minimum(sample.indices // s, cap), axis=0))
                       for s, cap in zip(scales, last)])
    ok = counts >= MIN_BOXES
    scales, counts = scales[ok], counts[ok]
    if len(scales) < MIN_SCALES:
        raise ValueError(f"degenerate scale range: only {len(scales)} usable scales")
    delta = scales * sample.h
    fit = stats.linregress(np.log(1 / delta), np.log(counts))
    return DimensionEstimate(float(fit.slope), float(fit.stderr), float(fit.rvalue**2),
                             (float(delta.min()), float(delta.max())), delta, counts)


def small_ball_probability(exp: LevyExponent, t: float, x: float, epsilon: float,
                           replicas: int, rng, batch: int = 20000, h: float | None = None):
    """Empirical P{|u(t, x)| <= epsilon} and its binomial standard error."""
    if replicas < 100:
        raise ValueError("need at least 100 replicas")
    gen = as_generator(rng)
    hits = 0
    done = 0
    while done < replicas:
        n = min(batch, replicas - done)
        u = sample_apex(exp, t, x, n, gen, h=h)
        hits += int(np.count_nonzero(np.linalg.norm(u, axis=-1) <= epsilon))
        done += n
    p = hits / replicas
    return p, math.sqrt(max(p * (1 - p), 0.0) / replicas)


def small_ball_limit(g: GaugeFunction, t: float, epsilon: float) -> float:
    """v_d eps^d times the density of u(t, x) at 0, which is 2^d phi(t^2)."""
    d = g.exponent.d
    v_d = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
    return v_d * epsilon**d * 2**d * gauge_eval(g, t * t)


# --- existence dichotomy ----------------------------------------------------------

@dataclass
class DichotomyCase:
    exponent: LevyExponent
    lattice: RotatedLattice
    epsilons: tuple[float, ...]
    t_min: float = 0.0
    name: str = ""

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if len(eps) < 2 or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilon schedule must be strictly decreasing")
        self.epsilons = eps
        if not self.name:
            self.name = f"{self.exponent.family}(d={self.exponent.d}, alpha={self.exponent.alpha})"


@dataclass
class DichotomyRow:
    name: str
    verdict: Verdict
    epsilons: tuple[float, ...]
    hit_freq: np.ndarray
    stderr: np.ndarray
    profile: str
    agree: bool
    min_norms: np.ndarray = field(repr=False, default=None)


def hit_profile(freqs) -> str:
    """Classify a hit-frequency sequence over a halving epsilon schedule."""
    f = np.asarray(freqs, dtype=float)
    if np.all(f >= SUBCRITICAL_MIN_HIT):
        return "subcritical"
    decaying = f[-1] < SUPERCRITICAL_MAX_HIT and np.all(np.diff(f) <= 0)
    for prev, nxt in zip(f, f[1:]):
        if prev <= DECAY_REGIME and not (nxt <= prev / DECAY_FACTOR or prev == nxt == 0):
            decaying = False
    return "supercritical" if decaying else "unclear"


def _batch_means(hits: np.ndarray, n_batches: int) -> np.ndarray:
    return np.array([b.mean() for b in np.array_split(hits, n_batches)])


def case_batch_minima(case: DichotomyCase, case_index: int, batch_index: int, size: int,
                      seed: int) -> np.ndarray:
    """min over eligible apexes of |u| for one batch of replicas of one case."""
    lat = case.lattice
    t, _ = lat.apex_grid()
    keep = lat.apex_valid() & (t > 0) & (t >= case.t_min)
    stream = RngStream(seed, case_index * 2**20 + batch_index)
    sol = simulate_wave(case.exponent, lat, stream, size)
    return np.linalg.norm(sol.values, axis=-1)[:, keep].min(axis=1)


def dichotomy_sweep(cases, replicas: int, seed: int, batch: int = 50,
                    heavy_tail_batches: int = 8, mapper=map) -> list[DichotomyRow]:
    """Hit frequencies of {exists apex: |u| <= eps} versus the analytic verdict.

    Replicas are simulated in fixed-size batches, batch k of case c drawing
    from RngStream(seed, c * 2**20 + k), so results do not depend on how the
    work is split.  ``mapper`` (e.g. an executor's ``map``) runs the batches
    and must preserve order.  For alpha < 2 the frequency is a median of
    batch means.
    """
    if replicas < 1:
        raise ValueError("replicas must be at least 1")
    cases = list(cases)
    jobs = [(ci, k, min(batch, replicas - start))
            for ci in range(len(cases)) for k, start in enumerate(range(0, replicas, batch))]
    minima = list(mapper(case_batch_minima, [cases[ci] for ci, _, _ in jobs],
                         [ci for ci, _, _ in jobs], [k for _, k, _ in jobs],
                         [n for _, _, n in jobs], [seed] * len(jobs)))
    rows = []
    for ci, case in enumerate(cases):
        mins = np.concatenate([m for (c, _, _), m in zip(jobs, minima) if c == ci])
        eps = np.array(case.epsilons)
        hits = mins[:, None] <= eps[None, :]
        if np.min(case.exponent.alphas) < 2:
            nb = min(heavy_tail_batches, replicas)
            means = np.stack([_batch_means(hits[:, j], nb) for j in range(len(eps))], axis=1)
            freq = np.median(means, axis=0)
        else:
            freq = hits.mean(axis=0)
        se = np.sqrt(freq * (1 - freq) / replicas)
        verdict = zero_criterion(GaugeFunction(case.exponent))
        profile = hit_profile(freq)
        expected = {Verdict.ZEROS_EXIST: "subcritical", Verdict.NO_ZEROS: "supercritical"}
        agree = expected.get(verdict) == profile
        rows.append(DichotomyRow(case.name, verdict, case.epsilons, freq, se, profile,
                                 agree, mins))
    return rows
