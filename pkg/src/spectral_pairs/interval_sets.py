"""
Unions of unit intervals ``A + [0, 1]`` with integer offsets ``A``.

Their spectra are the quasi-lattices ``Z + L`` for ``L`` a spectrum of ``A``,
they tile the line exactly when ``A`` complements in some ``Z_n``, and a
complement of ``A`` to an interval turns the union into a self-affine tile.
"""
from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .exact_core import as_rational, delta_hat, integer_set
from .finite_spectral import (
    RationalSpectrum,
    TileCertificate,
    check_direct_sum,
    enumerate_spectra,
    find_complement,
)

_TAYLOR_CUTOFF = 1e-6


@dataclasses.dataclass(frozen=True)
class IntervalUnion:
    offsets: tuple

    def __post_init__(self):
        object.__setattr__(self, "offsets", integer_set(self.offsets, require_zero=True))

    @property
    def length(self) -> int:
        return len(self.offsets)

    def intervals(self) -> list[tuple[int, int]]:
        return [(a, a + 1) for a in self.offsets]

    def ft(self, t):
        return interval_union_ft(self.offsets, t)


@dataclasses.dataclass(frozen=True)
class QuasiLattice:
    """``finite_part (+) step*Z``; the finite part is reduced modulo ``step``."""

    finite_part: RationalSpectrum
    step: Fraction = Fraction(1)

    def __post_init__(self):
        step = as_rational(self.step)
        if step <= 0:
            raise ValueError("lattice step must be positive")
        reduced = [p - step * math.floor(p / step) for p in self.finite_part]
        if len(set(reduced)) != len(reduced):
            raise ValueError("finite part has points congruent modulo the lattice")
        object.__setattr__(self, "step", step)

    def elements(self, radius) -> list[Fraction]:
        radius = Fraction(radius)
        out = []
        for f in self.finite_part:
            k_lo = math.floor((-radius - f) / self.step)
            k_hi = math.ceil((radius - f) / self.step)
            for k in range(k_lo, k_hi + 1):
                p = f + k * self.step
                if abs(p) < radius:
                    out.append(p)
        return sorted(out)

    def points_within(self, radius) -> np.ndarray:
        return np.array([float(p) for p in self.elements(radius)])

    def __str__(self) -> str:
        lat = "Z" if self.step == 1 else f"{self.step}Z"
        return f"{lat} + {{{', '.join(str(p) for p in self.finite_part)}}}"

    def to_json(self) -> dict:
        return {
            "type": "quasi-lattice",
            "finite_part": [str(p) for p in self.finite_part],
            "step": str(self.step),
        }


def unit_interval_ft(t):
    """``(exp(2*pi*i*t) - 1) / (2*pi*i*t)``, equal to 1 at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    z = 2j * np.pi * t
    small = np.abs(t) < _TAYLOR_CUTOFF
    safe = np.where(small, 1.0, z)
    out = np.where(small, 0.0, (np.exp(safe) - 1.0) / safe)
    # sum_{k<6} z**k / (k+1)!
    series = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(6):
        series = series + term / math.factorial(k + 1)
        term = term * z
    out = np.where(small, series, out)
    return complex(out) if out.ndim == 0 else out


def interval_union_ft(A: Iterable[int], t):
    """Fourier transform of normalized Lebesgue measure on ``A + [0, 1]``."""
    A = integer_set(A)
    t_arr = np.asarray(t, dtype=float)
    value = unit_interval_ft(t_arr) * delta_hat(A, t_arr)
    return complex(value) if np.ndim(value) == 0 else value


def spectra_of_interval_union(A: Iterable[int], denominator_bound: Optional[int] = None) -> list[QuasiLattice]:
    return [QuasiLattice(L) for L in enumerate_spectra(A, denominator_bound)]


def default_n_max(A: Iterable[int]) -> int:
    A = integer_set(A)
    return (max(A) + 1) * len(A)


def tiles_real_line(A: Iterable[int], n_max: Optional[int] = None) -> Optional[TileCertificate]:
    """Smallest ``n <= n_max`` and lexicographically first ``B`` with ``A (+) B == Z_n``."""
    A = integer_set(A, require_zero=True)
    n_max = n_max or default_n_max(A)
    for n in range(len(A), n_max + 1, len(A)):
        cert = find_complement(A, n)
        if cert is not None:
            return cert
    return None


def interval_complement(A: Iterable[int], n: int) -> Optional[tuple]:
    """The ``C`` with ``A (+) C == {0, ..., n-1}`` if one exists.

    Such a ``C`` is unique: the smallest point not yet covered must be the left
    end of a new translate, so the greedy choice is forced.
    """
    A = integer_set(A)
    if n % len(A):
        return None
    base = A[0]
    shape = [a - base for a in A]
    covered = set()
    C = []
    r = 0
    while r < n:
        if r in covered:
            r += 1
            continue
        c = r - base
        hit = [c + base + s for s in shape]
        if hit[-1] >= n or any(h in covered for h in hit):
            return None
        covered.update(hit)
        C.append(c)
        r += 1
    assert check_direct_sum(A, C, range(n))
    return tuple(C)


def as_affine_ifs(A: Iterable[int], n_max: Optional[int] = None):
    """Present ``A + [0, 1]`` as the attractor of ``x -> (x + b) / n``.

    Finds the smallest ``n >= 2`` with ``A (+) C == {0..n-1}`` and returns the
    IFS with scale ``n`` and digits ``{c + n*a}``, or ``None`` within ``n_max``.
    """
    from .ifs_measures import AffineIFS

    A = integer_set(A, require_zero=True)
    n_max = n_max or max(default_n_max(A), 2 * len(A))
    for n in range(len(A), n_max + 1, len(A)):
        if n < 2:
            continue
        C = interval_complement(A, n)
        if C is not None:
            digits = tuple(sorted(c + n * a for c in C for a in A))
            return AffineIFS(n, digits), C
    return None


# ---------------------------------------------------------------------------
# attractor check on unions of intervals


def _merge(intervals: list) -> list:
    intervals = sorted(intervals)
    out = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [tuple(iv) for iv in out]


def iterate_hull(scale: int, digits: Iterable[int], steps: int = 20) -> list:
    """Apply the Hutchinson operator ``steps`` times to the convex hull of the attractor."""
    digits = list(digits)
    hull = [(Fraction(min(digits), scale - 1), Fraction(max(digits), scale - 1))]
    current = hull
    for _ in range(steps):
        current = _merge([((lo + b) / scale, (hi + b) / scale) for lo, hi in current for b in digits])
    return current


def _distance_to(x, intervals) -> Fraction:
    best = None
    for lo, hi in intervals:
        d = lo - x if x < lo else (x - hi if x > hi else 0)
        best = d if best is None else min(best, d)
    return best


def _directed_hausdorff(X, Y) -> Fraction:
    # the farthest point of an interval of X from Y is an endpoint or the
    # midpoint of a gap of Y
    candidates = [p for iv in X for p in iv]
    gaps = [(Y[i][1], Y[i + 1][0]) for i in range(len(Y) - 1)]
    for g_lo, g_hi in gaps:
        mid = (g_lo + g_hi) / 2
        for lo, hi in X:
            if lo <= mid <= hi:
                candidates.append(mid)
    return max(_distance_to(p, Y) for p in candidates)


def hausdorff_distance(X: list, Y: list) -> Fraction:
    """Hausdorff distance between two finite unions of closed intervals."""
    X, Y = _merge(X), _merge(Y)
    return max(_directed_hausdorff(X, Y), _directed_hausdorff(Y, X))


def attractor_matches(A: Iterable[int], scale: int, digits: Iterable[int], steps: int = 20) -> Fraction:
    """Hausdorff distance between ``A + [0, 1]`` and ``steps`` iterates of the hull."""
    A = integer_set(A)
    target = [(Fraction(a), Fraction(a + 1)) for a in A]
    return hausdorff_distance(iterate_hull(scale, digits, steps), target)
