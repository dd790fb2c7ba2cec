"""Lattice realizations of Lévy sheets, additive Lévy processes and the wave solution.

The wave solution is u(t, x) = 1/2 * noise(C(t, x)) where C(t, x) is the backward
light cone.  Under the rotation (a, b) = (t - x, t + x) the cone becomes the
quadrant {a' <= a, b' <= b} cut by the half-plane {a' + b' >= 0}, so on a lattice
of h x h cells in (a, b) coordinates every lattice-aligned cone is an exact union
of full cells (original area h^2/2) and diagonal half cells (area h^2/4).

A lattice keeps an explicit window of cells [i0, i1) x [j0, j1).  Everything
below or left of the window that a cone can reach is kept in aggregated form: one
increment per column strip, one per row strip and one for the corner.  The law of
a noise increment depends on its region only through the area, so aggregation is
exact and windows far from t = 0 stay cheap.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exponents import LevyExponent, exponent_from_json
from .sampling import as_generator, sample_increment


def rotate(t, x):
    return t - x, t + x


def rotate_inv(a, b):
    return (b + a) / 2, (b - a) / 2


def light_cone_contains(t, x, s, y) -> bool | np.ndarray:
    return (0 <= s) & (s <= t) & (x - (t - s) <= y) & (y <= x + (t - s))


def cone_area(t: float) -> float:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return float(t) ** 2


def region_S(x0, t, x) -> bool | np.ndarray:
    """True when (x0, 0) lies in the light cone of (t, x)."""
    return t >= np.abs(x - x0)


def _tri(k):
    k = np.asarray(k, dtype=float)
    return np.where(k >= 0, (k + 1) * (k + 2) / 2, 0.0)


@dataclass(frozen=True)
class RotatedLattice:
    h: float
    i0: int
    i1: int
    j0: int
    j1: int

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.i1 <= self.i0 or self.j1 <= self.j0:
            raise ValueError("empty lattice window")

    @classmethod
    def covering(cls, h: float, t_max: float, x_max: float, full: bool = False):
        """Smallest lattice whose apex nodes cover t <= t_max, |x| <= x_max.

        With ``full`` the window is widened so that no aggregated strip carries
        any area (every cell of every cone is explicit).
        """
        lo = int(np.floor(-x_max / h + 1e-9))
        hi = int(np.ceil((t_max + x_max) / h - 1e-9))
        if full:
            lo = min(lo, -hi)
        return cls(h, lo, hi, lo, hi)

    @classmethod
    def window(cls, h: float, a0: float, b0: float, size: int):
        i0 = int(round(a0 / h))
        j0 = int(round(b0 / h))
        return cls(h, i0, i0 + size, j0, j0 + size)

    @property
    def shape(self) -> tuple[int, int]:
        return self.i1 - self.i0, self.j1 - self.j0

    def cell_index(self):
        i = np.arange(self.i0, self.i1)[:, None]
        j = np.arange(self.j0, self.j1)[None, :]
        return i, j

    def cell_areas(self) -> np.ndarray:
        """Original-coordinate areas of the window cells (0 below the diagonal)."""
        i, j = self.cell_index()
        s = i + j
        h2 = self.h**2
        return np.where(s >= 0, h2 / 2, np.where(s == -1, h2 / 4, 0.0))

    def column_strip_areas(self) -> np.ndarray:
        """Area of cells (i, j < j0) above the diagonal, one per window column i."""
        i = np.arange(self.i0, self.i1)
        k = i + self.j0
        h2 = self.h**2
        return np.maximum(k, 0) * h2 / 2 + (k >= 0) * h2 / 4

    def row_strip_areas(self) -> np.ndarray:
        j = np.arange(self.j0, self.j1)
        k = j + self.i0
        h2 = self.h**2
        return np.maximum(k, 0) * h2 / 2 + (k >= 0) * h2 / 4

    def corner_area(self) -> float:
        k = self.i0 + self.j0
        h2 = self.h**2
        return float(_tri(k - 2) * h2 / 2 + max(k, 0) * h2 / 4)

    def apex_grid(self):
        """(t, x) coordinates of every apex node, shape (Mi+1, Mj+1)."""
        a = np.arange(self.i0, self.i1 + 1)[:, None] * self.h
        b = np.arange(self.j0, self.j1 + 1)[None, :] * self.h
        return rotate_inv(a, b)

    def apex_valid(self) -> np.ndarray:
        m = np.arange(self.i0, self.i1 + 1)[:, None]
        n = np.arange(self.j0, self.j1 + 1)[None, :]
        return (m + n) >= 0

    def node_of(self, t: float, x: float) -> tuple[int, int]:
        """Window-relative apex index of (t, x); raises if off-lattice or outside."""
        a, b = rotate(t, x)
        fm, fn = a / self.h, b / self.h
        m, n = int(round(fm)), int(round(fn))
        if abs(fm - m) > 1e-9 or abs(fn - n) > 1e-9:
            raise ValueError(f"apex ({t}, {x}) is not a lattice node")
        if not (self.i0 <= m <= self.i1 and self.j0 <= n <= self.j1):
            raise ValueError(f"apex ({t}, {x}) outside lattice coverage")
        if m + n < 0:
            raise ValueError("apex has t < 0")
        return m - self.i0, n - self.j0

    def prefix_areas(self) -> np.ndarray:
        """Total noise area of every apex cone, computed like the solution itself."""
        return _prefix(self.cell_areas(), self.column_strip_areas(),
                       self.row_strip_areas(), np.float64(self.corner_area()))

    def cell_centroids(self):
        """Centroids, in (s, y) coordinates, of the noise-carrying part of each window cell."""
        i, j = self.cell_index()
        h = self.h
        ca = (i + 0.5) * h
        cb = (j + 0.5) * h
        half = (i + j) == -1
        # centroid of the upper-right triangle of the cell
        ca = np.where(half, (i + 2 / 3) * h, ca)
        cb = np.where(half, (j + 2 / 3) * h, cb)
        return rotate_inv(ca, cb)


def _prefix(cells, col, row, corner, lead: int = 0):
    """corner + cumsum(col) + cumsum(row) + 2-D cumsum(cells), zero-bordered.

    Shapes: cells (L, Mi, Mj, T), col (L, Mi, T), row (L, Mj, T), corner (L, T),
    where L are ``lead`` replica axes and T any trailing component axes.
    """
    corner = np.asarray(corner, dtype=float)
    r = lead
    s = np.cumsum(np.cumsum(cells, axis=r), axis=r + 1)
    pad = [(0, 0)] * s.ndim
    pad[r] = pad[r + 1] = (1, 0)
    s = np.pad(s, pad)
    pad1 = [(0, 0)] * np.ndim(col)
    pad1[r] = (1, 0)
    c = np.expand_dims(np.pad(np.cumsum(col, axis=r), pad1), r + 1)
    w = np.expand_dims(np.pad(np.cumsum(row, axis=r), pad1), r)
    k = corner.reshape(corner.shape[:r] + (1, 1) + corner.shape[r:])
    return k + c + w + s


@dataclass
class NoiseField:
    lattice: RotatedLattice
    exponent: LevyExponent
    cells: np.ndarray        # (R?, Mi, Mj, d)
    columns: np.ndarray      # (R?, Mi, d)
    rows: np.ndarray         # (R?, Mj, d)
    corner: np.ndarray       # (R?, d)
    replicas: int | None = None
    seed: object = None
    _table: np.ndarray | None = field(default=None, repr=False)

    def prefix_table(self) -> np.ndarray:
        """Noise mass of the cone quadrant at every apex node (cached)."""
        if self._table is None:
            lead = 0 if self.replicas is None else 1
            self._table = _prefix(self.cells, self.columns, self.rows, self.corner, lead)
        return self._table

    def quadrant_sum(self, a: float, b: float) -> np.ndarray:
        """Noise mass of {a' <= a, b' <= b, a' + b' >= 0}, looked up by rotated node."""
        m, n = self.lattice.node_of(*rotate_inv(a, b))
        p = self.prefix_table()
        return p[..., m, n, :] if self.replicas is None else p[:, m, n, :]

    def brute_cone_sum(self, t: float, x: float) -> np.ndarray:
        """Cone mass by testing each window cell's centroid; requires empty strips."""
        lat = self.lattice
        if (lat.column_strip_areas().any() or lat.row_strip_areas().any()
                or lat.corner_area() > 0):
            raise ValueError("brute-force sum needs a lattice without aggregated strips")
        s, y = lat.cell_centroids()
        inside = light_cone_contains(t, x, s, y) & (lat.cell_areas() > 0)
        if self.replicas is None:
            return self.cells[inside].sum(axis=0)
        return self.cells[:, inside].sum(axis=1)


def simulate_noise(exp: LevyExponent, lattice: RotatedLattice, rng,
                   replicas: int | None = None) -> NoiseField:
    """Independent cell increments with the exact area of each cell and strip."""
    seed = rng if not isinstance(rng, np.random.Generator) else None
    gen = as_generator(rng)
    lead = () if replicas is None else (int(replicas),)

    def draw(area):
        area = np.broadcast_to(area, lead + np.shape(area))
        return sample_increment(exp, area, gen)

    corner = draw(np.float64(lattice.corner_area()))
    columns = draw(lattice.column_strip_areas())
    rows = draw(lattice.row_strip_areas())
    cells = draw(lattice.cell_areas())
    return NoiseField(lattice, exp, cells, columns, rows, corner, replicas, seed)


@dataclass
class SolutionField:
    lattice: RotatedLattice
    exponent: LevyExponent
    values: np.ndarray       # (R?, Mi+1, Mj+1, d), indexed by rotated apex node
    replicas: int | None = None
    seed: object = None
    nu: float = 0.5

    @property
    def valid(self) -> np.ndarray:
        return self.lattice.apex_valid()

    def coordinates(self):
        return self.lattice.apex_grid()

    def at(self, t: float, x: float) -> np.ndarray:
        m, n = self.lattice.node_of(t, x)
        return self.values[..., m, n, :] if self.replicas is None else self.values[:, m, n, :]

    @property
    def bounds(self) -> dict:
        t, x = self.coordinates()
        v = self.valid
        return {"t_min": float(t[v].min()), "t_max": float(t[v].max()),
                "x_min": float(x[v].min()), "x_max": float(x[v].max())}


def solve_wave(noise: NoiseField) -> SolutionField:
    """u at every lattice apex: half the noise mass of its light cone."""
    return SolutionField(noise.lattice, noise.exponent, 0.5 * noise.prefix_table(),
                         noise.replicas, noise.seed)


def u_by_rotation(noise: NoiseField, t: float, x: float) -> np.ndarray:
    """u(t, x) = 1/2 * (quadrant sum) evaluated at rotate(t, x)."""
    return 0.5 * noise.quadrant_sum(*rotate(t, x))


def simulate_wave(exp: LevyExponent, lattice: RotatedLattice, rng,
                  replicas: int | None = None) -> SolutionField:
    return solve_wave(simulate_noise(exp, lattice, rng, replicas))


def sample_apex(exp: LevyExponent, t: float, x: float, replicas: int, rng,
                h: float | None = None, cells: int = 2) -> np.ndarray:
    """Replicas of u(t, x) from a small lattice window ending at the apex.

    Returns shape (replicas, d).
    """
    a, b = rotate(t, x)
    if h is None:
        h = t / cells
    lat = RotatedLattice.window(h, a - cells * h, b - cells * h, cells)
    return simulate_wave(exp, lat, rng, replicas).at(t, x)


# --- binary dump -----------------------------------------------------------------

_MAGIC = b"LWSF"


def dump_solution(field: SolutionField, path, seed=None) -> None:
    """Header (JSON) followed by row-major little-endian float64 values."""
    if field.replicas is not None:
        raise ValueError("dump expects a single realization")
    lat = field.lattice
    header = {
        "domain": field.bounds,
        "h": lat.h,
        "window": [lat.i0, lat.i1, lat.j0, lat.j1],
        "shape": list(field.values.shape),
        "exponent": field.exponent.to_json(),
        "seed": seed if seed is not None else field.seed,
    }
    blob = json.dumps(header, sort_keys=True, default=str).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def load_solution(path) -> tuple[SolutionField, dict]:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a solution dump")
        (n,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(n))
        values = np.frombuffer(fh.read(), dtype="<f8").reshape(header["shape"]).copy()
    i0, i1, j0, j1 = header["window"]
    lat = RotatedLattice(header["h"], i0, i1, j0, j1)
    return SolutionField(lat, exponent_from_json(header["exponent"]), values), header


# --- Lévy sheets, additive processes, perturbed field ----------------------------

def _node_index(grid_step: float, n_nodes: int, coord: float) -> int:
    f = coord / grid_step
    k = int(round(f))
    if abs(f - k) > 1e-9 or not 0 <= k < n_nodes:
        raise ValueError(f"coordinate {coord} is not a grid node")
    return k


@dataclass
class SheetField:
    """L(t) = noise([0, t]) at the nodes of a rectangular grid in R_+^N."""

    exponent: LevyExponent
    spacing: tuple[float, ...]
    table: np.ndarray          # (R?, n_1+1, ..., n_N+1, d)
    replicas: int | None = None

    @property
    def N(self) -> int:
        return len(self.spacing)

    def index(self, t: Sequence[float]) -> tuple[int, ...]:
        if len(t) != self.N:
            raise ValueError(f"expected {self.N} coordinates")
        off = 0 if self.replicas is None else 1
        return tuple(_node_index(h, self.table.shape[off + k], tk)
                     for k, (h, tk) in enumerate(zip(self.spacing, t)))

    def __call__(self, t) -> np.ndarray:
        return sheet_eval(self, t)


def simulate_sheet(exp: LevyExponent, cells: Sequence[int], spacing: Sequence[float], rng,
                   replicas: int | None = None) -> SheetField:
    cells = tuple(int(c) for c in cells)
    spacing = tuple(float(h) for h in spacing)
    if len(cells) != len(spacing):
        raise ValueError("cells and spacing must have the same length")
    lead = () if replicas is None else (int(replicas),)
    area = np.full(lead + cells, float(np.prod(spacing)))
    inc = sample_increment(exp, area, as_generator(rng))
    r = len(lead)
    table = inc
    for ax in range(len(cells)):
        table = np.cumsum(table, axis=r + ax)
    pad = [(0, 0)] * table.ndim
    for ax in range(len(cells)):
        pad[r + ax] = (1, 0)
    return SheetField(exp, spacing, np.pad(table, pad), replicas)


def sheet_eval(sheet: SheetField, t) -> np.ndarray:
    idx = sheet.index(t)
    if sheet.replicas is None:
        return sheet.table[idx]
    return sheet.table[(slice(None),) + idx]


def rectangle_increment(sheet: SheetField, s, t) -> np.ndarray:
    """noise((s, t]) by inclusion-exclusion over the 2^N corners."""
    n = sheet.N
    out = 0.0
    for mask in range(2**n):
        corner = [t[k] if not (mask >> k) & 1 else s[k] for k in range(n)]
        sign = -1 if bin(mask).count("1") % 2 else 1
        out = out + sign * sheet_eval(sheet, corner)
    return out


@dataclass
class AdditiveField:
    """X(t) = X_1(t_1) + ... + X_N(t_N) on per-axis grids; each X_j has exponent rate*psi."""

    exponent: LevyExponent
    grids: tuple[np.ndarray, ...]
    paths: tuple[np.ndarray, ...]   # each (R?, n_j, d), value at grid nodes
    rate: float = 1.0
    replicas: int | None = None

    def __call__(self, t) -> np.ndarray:
        if len(t) != len(self.grids):
            raise ValueError(f"expected {len(self.grids)} coordinates")
        out = 0.0
        for grid, path, tk in zip(self.grids, self.paths, t):
            hit = np.flatnonzero(np.isclose(grid, tk, rtol=0, atol=1e-12))
            if not hit.size:
                raise ValueError(f"coordinate {tk} is not a grid node")
            out = out + path[..., hit[0], :]
        return out


def simulate_additive(exp: LevyExponent, grids: Sequence, rng, rate: float = 1.0,
                      replicas: int | None = None) -> AdditiveField:
    """Independent Lévy paths on each grid; a grid must start at 0."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    gen = as_generator(rng)
    lead = () if replicas is None else (int(replicas),)
    grids = tuple(np.asarray(g, dtype=float) for g in grids)
    paths = []
    for g in grids:
        if g[0] != 0 or np.any(np.diff(g) <= 0):
            raise ValueError("grids must start at 0 and increase")
        area = np.broadcast_to(rate * np.diff(g), lead + (len(g) - 1,))
        inc = sample_increment(exp, area, gen)
        path = np.cumsum(inc, axis=len(lead))
        pad = [(0, 0)] * path.ndim
        pad[len(lead)] = (1, 0)
        paths.append(np.pad(path, pad))
    return AdditiveField(exp, grids, tuple(paths), rate, replicas)


@dataclass
class PerturbedField:
    sheet: SheetField
    additive: AdditiveField
    nu: float

    def __call__(self, t) -> np.ndarray:
        return sheet_eval(self.sheet, t) + self.additive(t)


def perturbed_field(sheet: SheetField, additive: AdditiveField, nu: float) -> PerturbedField:
    """F = L + X where X is the additive process with exponent nu*psi."""
    if not nu > 0:
        raise ValueError("nu must be positive")
    if not np.isclose(additive.rate, nu):
        raise ValueError(f"additive field was simulated with rate {additive.rate}, not nu={nu}")
    if sheet.exponent != additive.exponent:
        raise ValueError("sheet and additive field use different exponents")
    return PerturbedField(sheet, additive, nu)
