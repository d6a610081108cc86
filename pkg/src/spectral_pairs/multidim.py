"""
Regions in R^d built from grid cells, their product spectra, translational
tilings, and polygon folding modulo Z^2.
"""
from __future__ import annotations

import dataclasses
import itertools
import json
import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .exact_core import as_rational, integer_set
from .finite_spectral import RationalSpectrum, _block_peels, enumerate_spectra
from .interval_sets import QuasiLattice, unit_interval_ft


class NonConstantSliceError(ValueError):
    """Fibers of a region are not translates of one another."""


# ---------------------------------------------------------------------------
# regions


@dataclasses.dataclass(frozen=True)
class BoxUnionRegion:
    """Union of cells ``cell_size * (c + [0, 1]^d)`` for integer vectors ``c``."""

    cell_size: tuple
    cells: tuple

    def __post_init__(self):
        size = tuple(as_rational(s) for s in self.cell_size)
        if any(s <= 0 for s in size):
            raise ValueError("cell sizes must be positive")
        cells = tuple(tuple(int(c) for c in cell) for cell in self.cells)
        if not cells:
            raise ValueError("region has no cells")
        if len(set(cells)) != len(cells):
            raise ValueError("repeated cell")
        if any(len(c) != len(size) for c in cells):
            raise ValueError("cell dimension does not match cell_size")
        object.__setattr__(self, "cell_size", size)
        object.__setattr__(self, "cells", tuple(sorted(cells)))

    @property
    def dim(self) -> int:
        return len(self.cell_size)

    @property
    def volume(self) -> Fraction:
        return len(self.cells) * math.prod(self.cell_size)

    def ft(self, xi):
        return region_ft(self, xi)

    def _axis_tables(self):
        cells = np.array(self.cells)
        uniq = [np.unique(cells[:, i]) for i in range(self.dim)]
        T = np.zeros([len(u) for u in uniq])
        idx = tuple(np.searchsorted(uniq[i], cells[:, i]) for i in range(self.dim))
        T[idx] = 1.0
        return uniq, T

    def parseval_sums(self, spectrum, xs: np.ndarray, radius: float):
        """Fast partial sums for a product spectrum in three dimensions; generic otherwise."""
        if not isinstance(spectrum, ProductSpectrum) or self.dim != 3:
            pts = np.asarray(spectrum.points_within(radius), dtype=float).reshape(-1, self.dim)
            xs = np.atleast_2d(xs)
            sums = [float(np.sum(np.abs(self.ft(x + pts)) ** 2)) for x in xs]
            return sums, len(pts)
        axes = spectrum.axis_points(radius)
        uniq, T = self._axis_tables()
        size = [float(s) for s in self.cell_size]
        norm = float(len(self.cells)) ** 2
        sums = []
        for x in np.atleast_2d(xs):
            E = []
            for i in range(3):
                t = x[i] + axes[i]
                phase = np.exp(2j * np.pi * np.mod(np.multiply.outer(t * size[i], uniq[i]), 1.0))
                E.append(phase * unit_interval_ft(size[i] * t)[:, None])
            sums.append(_kernels.grid_power_sum(E[0], E[1], E[2], T) / norm)
        return sums, int(np.prod([len(a) for a in axes]))

    def to_json(self) -> dict:
        return {"cell_size": [str(s) for s in self.cell_size], "cells": [list(c) for c in self.cells]}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data) -> "BoxUnionRegion":
        if isinstance(data, str):
            data = json.loads(data)
        unknown = set(data) - {"cell_size", "cells"}
        if unknown:
            raise ValueError(f"unknown region fields: {sorted(unknown)}")
        return cls(tuple(as_rational(s) for s in data["cell_size"]), tuple(tuple(c) for c in data["cells"]))


STAIRCASE_CUBES = (
    (0, 0, 0), (1, 0, 1), (2, 0, 2), (2, 1, 3), (1, 1, 4), (0, 1, 5),
    (0, 0, 6), (1, 0, 7), (2, 0, 8), (2, 1, 9), (1, 1, 10), (0, 1, 11),
)


def staircase() -> BoxUnionRegion:
    """Twelve unit cubes climbing in steps of 1/3, as 36 cells of size (1, 1, 1/3)."""
    cells = [(x, y, k + j) for x, y, k in STAIRCASE_CUBES for j in range(3)]
    return BoxUnionRegion((Fraction(1), Fraction(1), Fraction(1, 3)), tuple(cells))


def unit_cube(d: int) -> BoxUnionRegion:
    return BoxUnionRegion(tuple(Fraction(1) for _ in range(d)), (tuple(0 for _ in range(d)),))


def interval_union_region(A: Iterable[int]) -> BoxUnionRegion:
    return BoxUnionRegion((Fraction(1),), tuple((a,) for a in integer_set(A)))


def region_ft(region: BoxUnionRegion, xi):
    """Fourier transform of normalized Lebesgue measure on ``region``.

    Each cell contributes ``prod_i exp(2*pi*i*s_i*c_i*xi_i) * phi(s_i*xi_i)`` with
    ``phi`` the unit-interval transform.
    """
    xi = np.asarray(xi, dtype=float)
    single = xi.ndim == 1
    xi = np.atleast_2d(xi)
    if xi.shape[-1] != region.dim:
        raise ValueError("dimension mismatch")
    size = np.array([float(s) for s in region.cell_size])
    cells = np.array(region.cells, dtype=float)
    scaled = xi * size
    envelope = np.prod(unit_interval_ft(scaled), axis=-1)
    phase = np.mod(scaled @ cells.T, 1.0)
    value = envelope * np.exp(2j * np.pi * phase).mean(axis=-1)
    return complex(value[0]) if single else value


# ---------------------------------------------------------------------------
# product spectra


@dataclasses.dataclass(frozen=True)
class ProductSpectrum:
    factors: tuple

    @property
    def dim(self) -> int:
        return len(self.factors)

    def axis_points(self, radius) -> list[np.ndarray]:
        return [np.asarray(f.points_within(radius), dtype=float) for f in self.factors]

    def elements(self, radius) -> list[tuple]:
        return list(itertools.product(*[f.elements(radius) for f in self.factors]))

    def points_within(self, radius) -> np.ndarray:
        axes = self.axis_points(radius)
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def __str__(self) -> str:
        return " x ".join(str(f) for f in self.factors)

    def to_json(self) -> dict:
        return {"type": "product", "factors": [f.to_json() for f in self.factors]}


def product_spectrum(factors: Sequence) -> ProductSpectrum:
    """Cartesian product of enumerable one-dimensional spectra."""
    factors = tuple(factors)
    if not factors:
        raise ValueError("need at least one factor")
    for f in factors:
        if not hasattr(f, "elements"):
            raise TypeError(f"factor {f!r} is not an enumerable spectrum")
    return ProductSpectrum(factors)


def _interval_union_spectrum(offsets: Sequence[int], unit: Fraction) -> QuasiLattice:
    """Spectrum of ``unit * (offsets + [0, 1])`` with the block structure read off first."""
    shift = min(offsets)
    cells = tuple(sorted(o - shift for o in offsets))
    blocks = _block_peels(cells)
    b = blocks[0] if blocks else 1
    A = tuple(sorted({c // b for c in cells}))
    spectra = enumerate_spectra(A)
    if not spectra:
        raise NonConstantSliceError(f"fiber offsets {A} have no rational spectrum")
    scale = 1 / (b * unit)
    L = spectra[0]
    return QuasiLattice(RationalSpectrum([scale * p for p in L.points]), scale)


def slice_region(region: BoxUnionRegion, axis: int, index: int) -> BoxUnionRegion:
    """The cells with coordinate ``index`` along ``axis``, with that axis dropped."""
    keep = [i for i in range(region.dim) if i != axis]
    cells = [tuple(c[i] for i in keep) for c in region.cells if c[axis] == index]
    if not cells:
        raise ValueError("empty slice")
    return BoxUnionRegion(tuple(region.cell_size[i] for i in keep), tuple(cells))


def derive_product_spectrum(region: BoxUnionRegion) -> ProductSpectrum:
    """Spectrum of a region whose fibers along the last axis are translates of one fiber.

    Fibering over the base (the projection to the other axes), the product of
    a base spectrum and the common fiber spectrum is a spectrum. The base is
    treated the same way recursively. Raises :class:`NonConstantSliceError`
    when the fibers differ.
    """
    d = region.dim
    last = d - 1
    fibers: dict[tuple, list] = {}
    for c in region.cells:
        fibers.setdefault(c[:last], []).append(c[last])
    shapes = {tuple(sorted(v - min(vs) for v in vs)) for vs in fibers.values()}
    if len(shapes) != 1:
        raise NonConstantSliceError(f"fibers along axis {last} are not translates: {sorted(shapes)}")
    shape = shapes.pop()
    fiber_spec = _interval_union_spectrum(shape, region.cell_size[last])
    if d == 1:
        return ProductSpectrum((fiber_spec,))
    base = BoxUnionRegion(region.cell_size[:last], tuple(fibers))
    return ProductSpectrum(derive_product_spectrum(base).factors + (fiber_spec,))


# ---------------------------------------------------------------------------
# translational tilings


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Upper-triangular row HNF of a full-rank integer lattice basis."""
    H = [list(map(int, r)) for r in rows]
    n = len(H)
    for col in range(n):
        for r in range(col + 1, n):
            if H[r][col] == 0:
                continue
            g, x, y = _xgcd(H[col][col], H[r][col])
            a, b = H[col][col] // g, H[r][col] // g
            top = [x * u + y * v for u, v in zip(H[col], H[r])]
            bot = [-b * u + a * v for u, v in zip(H[col], H[r])]
            H[col], H[r] = top, bot
        if H[col][col] == 0:
            raise ValueError("lattice basis is singular")
        if H[col][col] < 0:
            H[col] = [-v for v in H[col]]
    for col in range(n):
        for r in range(col):
            q = H[r][col] // H[col][col]
            if q:
                H[r] = [u - q * v for u, v in zip(H[r], H[col])]
    return H


def reduce_mod_lattice(v: Sequence[int], H: Sequence[Sequence[int]]) -> tuple:
    v = list(v)
    for i, row in enumerate(H):
        q = v[i] // row[i]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


@dataclasses.dataclass(frozen=True)
class TilingReport:
    tiles: bool
    lattice_hnf: tuple
    offsets: tuple
    classes: int
    coverage: dict
    volume_balance: bool

    @property
    def uncovered(self) -> int:
        return self.classes - len(self.coverage)

    def to_json(self) -> dict:
        counts: dict[int, int] = {}
        for c in self.coverage.values():
            counts[c] = counts.get(c, 0) + 1
        if self.uncovered:
            counts[0] = self.uncovered
        return {
            "tiles": self.tiles,
            "lattice_hnf": [list(r) for r in self.lattice_hnf],
            "offsets": [list(o) for o in self.offsets],
            "classes": self.classes,
            "coverage_histogram": {str(k): v for k, v in sorted(counts.items())},
            "volume_balance": self.volume_balance,
        }


def _to_cell_units(vec: Sequence, size: Sequence[Fraction]) -> tuple:
    out = []
    for v, s in zip(vec, size):
        q = as_rational(v) / s
        if q.denominator != 1:
            raise ValueError(f"translation {list(map(str, vec))} is incommensurate with the cell grid")
        out.append(int(q))
    return tuple(out)


def check_translation_tiling(
    region: BoxUnionRegion,
    periods: Sequence[Sequence],
    offsets: Optional[Sequence[Sequence]] = None,
    fundamental_box: Optional[Sequence] = None,
) -> TilingReport:
    """Exact test that ``region + offsets + lattice(periods)`` tiles space.

    Everything is converted to cell units; every cell of ``region + offset`` is
    reduced modulo the lattice (Hermite normal form) and each of the
    ``det(lattice)`` classes must be hit exactly once. ``fundamental_box``, when
    given, must have the lattice covolume.
    """
    d = region.dim
    size = region.cell_size
    if len(periods) != d:
        raise ValueError(f"need {d} lattice periods")
    basis = [_to_cell_units(p, size) for p in periods]
    offsets = [tuple(0 for _ in range(d))] if offsets is None else list(offsets)
    shifts = [_to_cell_units(o, size) for o in offsets]
    H = hermite_normal_form(basis)
    classes = math.prod(H[i][i] for i in range(d))
    if fundamental_box is not None:
        box_volume = math.prod(as_rational(b) for b in fundamental_box)
        if box_volume != classes * math.prod(size):
            raise ValueError("fundamental box volume differs from the lattice covolume")
    coverage: dict[tuple, int] = {}
    for s in shifts:
        for c in region.cells:
            key = reduce_mod_lattice([a + b for a, b in zip(c, s)], H)
            coverage[key] = coverage.get(key, 0) + 1
    balance = len(region.cells) * len(shifts) == classes
    tiles = balance and len(coverage) == classes and all(v == 1 for v in coverage.values())
    return TilingReport(tiles, tuple(tuple(r) for r in H), tuple(shifts), classes, coverage, balance)


@dataclasses.dataclass(frozen=True)
class LatticeSearchResult:
    lattices: tuple
    candidates: int
    bound: Fraction
    covolume_cells: int

    def to_json(self) -> dict:
        return {
            "lattices": [[[str(v) for v in row] for row in L] for L in self.lattices],
            "candidates_checked": self.candidates,
            "basis_bound": str(self.bound),
            "covolume_in_cells": self.covolume_cells,
            "scope": "bounded search: upper-triangular Hermite bases on the cell grid with entries <= bound",
        }


def _hnf_lattices(n: int, d: int):
    def diagonals(rem, k):
        if k == 1:
            yield (rem,)
            return
        for a in range(1, rem + 1):
            if rem % a == 0:
                for rest in diagonals(rem // a, k - 1):
                    yield (a,) + rest

    for diag in diagonals(n, d):
        slots = [(i, j) for i in range(d) for j in range(i + 1, d)]
        for vals in itertools.product(*[range(diag[j]) for _, j in slots]):
            H = [[0] * d for _ in range(d)]
            for i in range(d):
                H[i][i] = diag[i]
            for (i, j), v in zip(slots, vals):
                H[i][j] = v
            yield H


def lattice_tiling_search(region: BoxUnionRegion, basis_bound=4) -> LatticeSearchResult:
    """Every lattice of covolume ``vol(region)`` on the cell grid, with Hermite basis
    entries at most ``basis_bound`` in absolute size, that tiles with ``region``.

    An empty answer is a bounded refutation only.
    """
    bound = as_rational(basis_bound)
    d = region.dim
    n = len(region.cells)
    size = region.cell_size
    found, checked = [], 0
    for H in _hnf_lattices(n, d):
        if any(abs(H[i][j] * size[j]) > bound for i in range(d) for j in range(d)):
            continue
        checked += 1
        reps = {reduce_mod_lattice(c, H) for c in region.cells}
        if len(reps) == n:
            found.append(tuple(tuple(H[i][j] * size[j] for j in range(d)) for i in range(d)))
    return LatticeSearchResult(tuple(found), checked, bound, n)


# ---------------------------------------------------------------------------
# folding polygons modulo Z^2


def _clip(poly: list, axis: int, bound: Fraction, keep_below: bool) -> list:
    """Sutherland-Hodgman against the half-plane ``x[axis] <= bound`` (or ``>=``)."""
    if not poly:
        return []

    def inside(p):
        return p[axis] <= bound if keep_below else p[axis] >= bound

    out = []
    for k in range(len(poly)):
        cur, nxt = poly[k], poly[(k + 1) % len(poly)]
        if inside(cur):
            out.append(cur)
        if inside(cur) != inside(nxt):
            t = (bound - cur[axis]) / (nxt[axis] - cur[axis])
            out.append(tuple(c + t * (n - c) for c, n in zip(cur, nxt)))
    return out


def _clip_box(poly, x0, x1, y0, y1):
    for axis, lo, hi in ((0, x0, x1), (1, y0, y1)):
        poly = _clip(poly, axis, lo, False)
        poly = _clip(poly, axis, hi, True)
    return poly


def polygon_area(poly: Sequence) -> Fraction:
    s = Fraction(0)
    for k in range(len(poly)):
        (x0, y0), (x1, y1) = poly[k], poly[(k + 1) % len(poly)]
        s += x0 * y1 - x1 * y0
    return abs(s) / 2


def fold_mod_z2(polygons: Sequence[Sequence], resolution: int = 64) -> dict:
    """Area of the union of ``polygons`` reduced mod Z^2 in each cell of a ``resolution``
    grid on the unit square, in units of the cell area (exact)."""
    cell = Fraction(1, resolution)
    totals: dict[tuple, Fraction] = {}
    for poly in polygons:
        poly = [tuple(as_rational(c) for c in p) for p in poly]
        xs = [p[0] for p in poly]
        ys = [p[1] for p in poly]
        for X in range(math.floor(min(xs)), math.ceil(max(xs))):
            for Y in range(math.floor(min(ys)), math.ceil(max(ys))):
                piece = _clip_box(poly, X, X + 1, Y, Y + 1)
                if len(piece) < 3:
                    continue
                piece = [(x - X, y - Y) for x, y in piece]
                px = [p[0] for p in piece]
                py = [p[1] for p in piece]
                for i in range(math.floor(min(px) / cell), math.ceil(max(px) / cell)):
                    for j in range(math.floor(min(py) / cell), math.ceil(max(py) / cell)):
                        sub = _clip_box(piece, i * cell, (i + 1) * cell, j * cell, (j + 1) * cell)
                        if len(sub) >= 3:
                            a = polygon_area(sub)
                            if a:
                                totals[(i, j)] = totals.get((i, j), Fraction(0)) + a / cell**2
    return totals


def fold_is_unit_square(polygons: Sequence[Sequence], resolution: int = 64) -> bool:
    totals = fold_mod_z2(polygons, resolution)
    return len(totals) == resolution**2 and all(v == 1 for v in totals.values())


@dataclasses.dataclass(frozen=True)
class RearrangedCube:
    p: int
    upper: tuple
    lower: tuple
    fold_ok: bool
    upper_alone_ok: bool
    lower_alone_ok: bool
    resolution: int

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "upper_triangle": [[str(c) for c in v] for v in self.upper],
            "lower_triangle": [[str(c) for c in v] for v in self.lower],
            "fold_congruent_to_unit_square": self.fold_ok,
            "upper_component_alone": self.upper_alone_ok,
            "lower_component_alone": self.lower_alone_ok,
            "grid_resolution": self.resolution,
            "spectrum": "Z^2" if self.fold_ok else None,
        }


def rearranged_cube(p: int, resolution: int = 64) -> RearrangedCube:
    """Split the unit square along its diagonal and move the lower triangle by ``(p, 0)``.

    The region is congruent to the unit square mod Z^2 (so ``Z^2`` is a
    spectrum); neither triangle alone is.
    """
    if p == 0:
        raise ValueError("p must be a nonzero integer")
    F = Fraction
    upper = ((F(0), F(0)), (F(1), F(1)), (F(0), F(1)))
    lower = ((F(p), F(0)), (F(p + 1), F(0)), (F(p + 1), F(1)))
    return RearrangedCube(
        p,
        upper,
        lower,
        fold_is_unit_square([upper, lower], resolution),
        fold_is_unit_square([upper], resolution),
        fold_is_unit_square([lower], resolution),
        resolution,
    )
