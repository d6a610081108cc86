"""
Invariant measures of affine iterated function systems ``x -> A^{-1}(x + b)``.

The measure's Fourier transform is the infinite product of digit transforms
along ``(A^T)^{-n} x``. Spectra are built from a digit spectrum ``L`` (with
``L/A`` a spectrum of the digits) and the cycles of the dual maps
``x -> (x + l)/A`` on which the digit transform has modulus one.
"""
from __future__ import annotations

import dataclasses
import functools
import itertools
import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import networkx as nx
import numpy as np

from . import _kernels
from .exact_core import (
    as_rational,
    delta_hat,
    dimension,
    integer_set,
    rational_unit_roots,
    root_denominator_bound,
    set_gcd,
    vanishing_sum,
)
from .finite_spectral import (
    NotSpectralError,
    RationalSpectrum,
    certify_finite_pair,
    check_direct_sum,
    direct_sum,
)


class HypothesisError(ValueError):
    """A construction was asked for outside the hypotheses that make it valid."""


Matrix = tuple  # tuple of row tuples of Fractions


# ---------------------------------------------------------------------------
# small exact linear algebra


def as_matrix(V, d: int = 1) -> Matrix:
    if isinstance(V, (int, Fraction, str)):
        v = as_rational(V)
        return tuple(tuple(v if i == j else Fraction(0) for j in range(d)) for i in range(d))
    return tuple(tuple(as_rational(c) for c in row) for row in V)


def mat_mul(X: Matrix, Y: Matrix) -> Matrix:
    return tuple(
        tuple(sum((X[i][k] * Y[k][j] for k in range(len(Y))), Fraction(0)) for j in range(len(Y[0])))
        for i in range(len(X))
    )


def mat_vec(X: Matrix, v: Sequence) -> tuple:
    return tuple(sum((X[i][k] * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(X)))


def transpose(X: Matrix) -> Matrix:
    return tuple(zip(*X))


def mat_inverse(X: Matrix) -> Matrix:
    """Gauss-Jordan over the rationals; raises ``ValueError`` on a singular matrix."""
    n = len(X)
    M = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(X)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        M[col], M[pivot] = M[pivot], M[col]
        piv = M[col][col]
        M[col] = [c / piv for c in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return tuple(tuple(row[n:]) for row in M)


def _scalar(M: Matrix) -> Optional[Fraction]:
    if len(M) == 1:
        return M[0][0]
    return None


# ---------------------------------------------------------------------------
# IFS descriptors


@dataclasses.dataclass(frozen=True)
class AffineIFS:
    """Scale ``A`` (int >= 2 or an expansive integer matrix) and digits ``B`` containing 0."""

    scale: Union[int, tuple]
    digits: tuple

    def __post_init__(self):
        digits = integer_set(self.digits, require_zero=True)
        object.__setattr__(self, "digits", digits)
        if isinstance(self.scale, (int, np.integer)):
            if int(self.scale) < 2:
                raise ValueError("scale must be an integer >= 2")
            object.__setattr__(self, "scale", int(self.scale))
            if dimension(digits) != 1:
                raise ValueError("scalar scale needs one-dimensional digits")
        else:
            M = tuple(tuple(int(c) for c in row) for row in self.scale)
            d = len(M)
            if any(len(row) != d for row in M):
                raise ValueError("scale matrix must be square")
            eig = np.linalg.eigvals(np.array(M, dtype=float))
            if np.min(np.abs(eig)) <= 1.0:
                raise ValueError("scale matrix is not expansive: some eigenvalue has modulus <= 1")
            if dimension(digits) != d:
                raise ValueError("digit dimension does not match the scale matrix")
            object.__setattr__(self, "scale", M)

    @property
    def dim(self) -> int:
        return 1 if isinstance(self.scale, int) else len(self.scale)

    @property
    def scale_matrix(self) -> np.ndarray:
        if isinstance(self.scale, int):
            return np.array([[float(self.scale)]])
        return np.array(self.scale, dtype=float)

    @property
    def max_digit(self) -> float:
        return float(np.max(np.linalg.norm(np.atleast_2d(np.array(self.digits, dtype=float)).reshape(len(self.digits), -1), axis=1)))

    def ft(self, x, tol: float = 1e-12):
        return invariant_ft(self, x, tol)

    def to_json(self) -> dict:
        return {
            "type": "ifs",
            "scale": self.scale if isinstance(self.scale, int) else [list(r) for r in self.scale],
            "digits": [list(b) if isinstance(b, tuple) else b for b in self.digits],
        }


@dataclasses.dataclass(frozen=True)
class AffineImage:
    """Pushforward of ``base`` under ``x -> V x + shift``."""

    base: object
    V: Matrix
    shift: tuple

    def ft(self, x, tol: float = 1e-12):
        x = np.asarray(x, dtype=float)
        Vt = np.array(transpose(self.V), dtype=float)
        s = np.array(self.shift, dtype=float)
        if len(self.V) == 1:
            return np.exp(2j * np.pi * s[0] * x) * self.base.ft(Vt[0, 0] * x, tol)
        y = x @ Vt.T
        return np.exp(2j * np.pi * (x @ s)) * self.base.ft(y, tol)

    def to_json(self) -> dict:
        return {
            "type": "affine-image",
            "base": self.base.to_json(),
            "V": [[str(c) for c in row] for row in self.V],
            "shift": [str(c) for c in self.shift],
        }


# ---------------------------------------------------------------------------
# Fourier transform of the invariant measure


def _tail_length(scale: float, spread: float, xmax: float, tol: float) -> int:
    """Smallest N with ``2*pi*spread*xmax*A**-N/(A-1) <= tol/2``."""
    if xmax == 0.0 or spread == 0.0:
        return 0
    bound = 2.0 * math.pi * spread * xmax / ((scale - 1.0) * tol / 2.0)
    return max(0, math.ceil(math.log(bound) / math.log(scale)))


def _matrix_tail_length(Minv: np.ndarray, spread: float, xmax: float, tol: float) -> int:
    if xmax == 0.0 or spread == 0.0:
        return 0
    norms = []
    P = np.eye(len(Minv))
    for _ in range(10000):
        P = P @ Minv
        norms.append(np.linalg.norm(P, 2))
        if norms[-1] < 1e-18:
            break
    S = sum(norms)
    # sum_{j>N} ||M^j|| <= ||M^N|| * S by submultiplicativity
    for N, nrm in enumerate([1.0] + norms):
        if 2.0 * math.pi * spread * xmax * nrm * S <= tol / 2.0:
            return N
    raise RuntimeError("scale matrix contracts too slowly for the requested tolerance")


def invariant_ft(ifs: AffineIFS, x, tol: float = 1e-12):
    """``prod_{n>=1} delta_hat_B((A^T)^{-n} x)`` truncated with a proven tail bound.

    Each factor satisfies ``|delta_hat_B(y) - 1| <= 2*pi*max|b|*|y|`` and the
    arguments decay geometrically, so the discarded factors change the product
    by less than ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if ifs.dim == 1:
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        xmax = float(np.max(np.abs(xs))) if xs.size else 0.0
        N = _tail_length(float(ifs.scale), ifs.max_digit, xmax, tol)
        out = _kernels.ifs_product(xs, float(ifs.scale), np.array(ifs.digits, dtype=float), N)
        out = out.reshape(np.shape(x)) if not scalar else out[0]
        return complex(out) if scalar else out
    d = ifs.dim
    xs = np.asarray(x, dtype=float)
    single = xs.ndim == 1
    xs = np.atleast_2d(xs)
    if xs.shape[-1] != d:
        raise ValueError(f"dimension mismatch: IFS is {d}-dimensional")
    Minv = np.linalg.inv(ifs.scale_matrix.T)
    xmax = float(np.max(np.linalg.norm(xs, axis=1))) if len(xs) else 0.0
    N = _matrix_tail_length(Minv, ifs.max_digit, xmax, tol)
    digits = np.array(ifs.digits, dtype=float)
    out = np.ones(len(xs), dtype=complex)
    y = xs.copy()
    for _ in range(N):
        y = y @ Minv.T
        out *= np.exp(2j * np.pi * np.mod(y @ digits.T, 1.0)).mean(axis=1)
    return complex(out[0]) if single else out


def scaling_identity_residual(ifs: AffineIFS, x, tol: float = 1e-12) -> np.ndarray:
    """``|mu_hat(A^T x) - delta_hat_B(x) mu_hat(x)|`` at each point of ``x``."""
    x = np.asarray(x, dtype=float)
    if ifs.dim == 1:
        lhs = invariant_ft(ifs, ifs.scale * x, tol)
        rhs = delta_hat(ifs.digits, x) * invariant_ft(ifs, x, tol)
    else:
        lhs = invariant_ft(ifs, np.atleast_2d(x) @ ifs.scale_matrix, tol)
        rhs = delta_hat(ifs.digits, np.atleast_2d(x)) * invariant_ft(ifs, np.atleast_2d(x), tol)
    return np.abs(lhs - rhs)


def digit_zero_floor(digits: Sequence[int], denominator_bound: Optional[int] = None) -> Optional[Fraction]:
    """Smallest distance from an integer of a rational zero of ``delta_hat_B`` (None if no zeros)."""
    bound = denominator_bound or root_denominator_bound(max(digits) - min(digits))
    roots = rational_unit_roots(digits, bound)
    if not roots:
        return None
    return min(min(r, 1 - r) for r in roots)


def ft_vanishes_exactly(ifs: AffineIFS, t) -> bool:
    """Exact test of ``mu_hat(t) == 0`` for rational ``t`` and a one-dimensional IFS.

    ``mu_hat(t) = 0`` iff some factor ``delta_hat_B(t / A**n)`` vanishes; once
    ``|t / A**n|`` drops below the smallest zero of ``delta_hat_B`` no later
    factor can vanish.
    """
    if ifs.dim != 1:
        raise ValueError("exact zero test is one-dimensional")
    return _ft_vanishes(ifs.scale, ifs.digits, as_rational(t))


@functools.lru_cache(maxsize=1 << 16)
def _ft_vanishes(scale: int, digits: tuple, t: Fraction) -> bool:
    if t == 0:
        return False
    floor = _zero_floor(digits)
    if floor is None:
        return False
    y = Fraction(t)
    while True:
        y /= scale
        if abs(y) < floor:
            return False
        if vanishing_sum(digits, y):
            return True


@functools.lru_cache(maxsize=None)
def _zero_floor(digits: tuple):
    return digit_zero_floor(digits)


# ---------------------------------------------------------------------------
# enumerable spectra


@dataclasses.dataclass(frozen=True)
class GeneratedSpectrum:
    """``head_levels[0] + A*(head_levels[1] + A*(... + A*T))`` where ``T`` is the
    smallest set containing ``-c`` for every cycle point ``c`` and closed under
    ``t -> A*t + l`` for ``l`` in ``tail_digits``.
    """

    scale: int
    tail_digits: tuple
    cycle_points: tuple
    head_levels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tail_digits", tuple(sorted(int(l) for l in self.tail_digits)))
        object.__setattr__(self, "cycle_points", tuple(sorted(as_rational(c) for c in self.cycle_points)))
        object.__setattr__(
            self, "head_levels", tuple(tuple(sorted(int(l) for l in lev)) for lev in self.head_levels)
        )

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.cycle_points)

    def with_head(self, L: Iterable[int]) -> "GeneratedSpectrum":
        """``A * self (+) L``"""
        return dataclasses.replace(self, head_levels=(tuple(L),) + self.head_levels)

    def _tail_elements(self, radius: Fraction) -> set:
        A = self.scale
        spread = max(abs(l) for l in self.tail_digits)
        # ancestors (t - l)/A of points inside the working radius stay inside it
        work = max(radius, Fraction(spread, A - 1) + 1)
        seen = {-c for c in self.cycle_points}
        frontier = list(seen)
        while frontier:
            nxt = []
            for t in frontier:
                for l in self.tail_digits:
                    u = A * t + l
                    if abs(u) < work and u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        return {t for t in seen if abs(t) < radius}

    def _elements(self, radius: Fraction, levels: tuple) -> set:
        if not levels:
            return self._tail_elements(radius)
        head, rest = levels[0], levels[1:]
        spread = max(abs(l) for l in head)
        inner = self._elements((radius + spread) / self.scale + 1, rest)
        out = set()
        count = 0
        for t in inner:
            for l in head:
                u = self.scale * t + l
                if abs(u) < radius:
                    out.add(u)
                    count += 1
        if count != len(out):
            raise ValueError("head level does not form a direct sum with the scaled spectrum")
        return out

    def elements(self, radius) -> list:
        """All points with ``|point| < radius``, sorted."""
        return sorted(self._elements(Fraction(radius), self.head_levels))

    def points_within(self, radius) -> np.ndarray:
        return np.array([float(p) for p in self.elements(radius)])

    def first(self, k: int) -> list:
        """The ``k`` smallest nonnegative-first elements in enumeration order (by ``|.|`` then value)."""
        radius = Fraction(2)
        while True:
            pts = self.elements(radius)
            if len(pts) >= k or radius > 10**12:
                pts.sort(key=lambda p: (abs(p), p))
                return sorted(pts[:k])
            radius *= self.scale

    def to_json(self) -> dict:
        return {
            "type": "generated",
            "scale": self.scale,
            "tail_digits": list(self.tail_digits),
            "cycle_offsets": [str(-c) for c in self.cycle_points],
            "head_levels": [list(h) for h in self.head_levels],
        }


@dataclasses.dataclass(frozen=True)
class DirectSumSpectrum:
    """``base (+) finite`` for an enumerable ``base`` and a finite rational set."""

    base: object
    finite: tuple

    def __post_init__(self):
        object.__setattr__(self, "finite", tuple(sorted(as_rational(f) for f in self.finite)))

    def elements(self, radius) -> list:
        radius = Fraction(radius)
        spread = max(abs(f) for f in self.finite)
        out, count = set(), 0
        for t in self.base.elements(radius + spread):
            for f in self.finite:
                if abs(t + f) < radius:
                    out.add(t + f)
                    count += 1
        if count != len(out):
            raise ValueError("sum is not direct on the enumerated prefix")
        return sorted(out)

    def points_within(self, radius) -> np.ndarray:
        return np.array([float(p) for p in self.elements(radius)])

    def to_json(self) -> dict:
        return {
            "type": "direct-sum",
            "base": self.base.to_json(),
            "finite": [str(f) for f in self.finite],
        }


@dataclasses.dataclass(frozen=True)
class LinearImageSpectrum:
    """``{M @ p : p in base}`` (a scalar factor in one dimension)."""

    base: object
    M: Matrix

    def _factor_bound(self) -> Fraction:
        inv = mat_inverse(self.M)
        return max(sum(abs(c) for c in row) for row in inv)

    def elements(self, radius) -> list:
        radius = Fraction(radius)
        s = _scalar(self.M)
        if s is not None:
            pts = [s * p for p in self.base.elements(radius / abs(s) + 1)]
            return sorted(p for p in pts if abs(p) < radius)
        pts = self.base.elements(radius * self._factor_bound() + 1)
        imgs = [mat_vec(self.M, p) for p in pts]
        return sorted(q for q in imgs if max(abs(c) for c in q) < radius)

    def points_within(self, radius) -> np.ndarray:
        return np.array([np.array(p, dtype=float) if isinstance(p, tuple) else float(p) for p in self.elements(radius)])

    def to_json(self) -> dict:
        return {
            "type": "linear-image",
            "base": self.base.to_json(),
            "M": [[str(c) for c in row] for row in self.M],
        }


# ---------------------------------------------------------------------------
# cycles and cycle spectra


def invariant_interval(scale: int, L: Iterable[int]) -> tuple[Fraction, Fraction]:
    """The interval mapped into itself by every ``x -> (x + l)/scale``."""
    L = list(L)
    return Fraction(min(L), scale - 1), Fraction(max(L), scale - 1)


def find_cycles(scale: int, B: Iterable[int], L: Iterable[int], max_len: int = 8) -> list[tuple]:
    """All cycles of length ``<= max_len`` of the maps ``x -> (x + l)/scale`` on which
    ``|delta_hat_B| == 1``.

    ``|delta_hat_B(x)| == 1`` with ``0`` in ``B`` forces ``b*x`` integral for every
    ``b``, i.e. ``x`` in ``(1/gcd(B)) Z``; cycles also stay in the invariant
    interval, so the candidate set is finite. Each cycle is returned as a
    sorted tuple of Fractions.
    """
    B = integer_set(B, require_zero=True)
    L = integer_set(L)
    g = set_gcd(B)
    if g == 0:
        # B = {0}: every point has |delta_hat| = 1; restrict to the rational
        # fixed points of words of length <= max_len
        g = None
    lo, hi = invariant_interval(scale, L)
    G = nx.DiGraph()
    if g is not None:
        nodes = [Fraction(k, g) for k in range(math.ceil(lo * g), math.floor(hi * g) + 1)]
    else:
        nodes = set()
        for p in range(1, max_len + 1):
            for word in itertools.product(L, repeat=p):
                nodes.add(sum(Fraction(l * scale**k) for k, l in enumerate(word)) / (scale**p - 1))
        nodes = sorted(nodes)
    node_set = set(nodes)
    G.add_nodes_from(nodes)
    for x in nodes:
        for l in L:
            y = (x + l) / scale
            if y in node_set:
                G.add_edge(x, y)
    cycles = set()
    for cyc in nx.simple_cycles(G, length_bound=max_len):
        pts = tuple(sorted(cyc))
        if all(abs(abs(delta_hat(B, p)) - 1.0) < 1e-12 for p in pts):
            cycles.add(pts)
    return sorted(cycles)


def cycle_spectrum(ifs: AffineIFS, L: Iterable[int], max_len: int = 8) -> GeneratedSpectrum:
    """Spectrum of ``mu_B`` generated from the digit spectrum ``L/A`` and the cycles.

    Raises :class:`~spectral_pairs.finite_spectral.NotSpectralError` when ``L/A``
    is not a spectrum of ``B``.
    """
    if ifs.dim != 1:
        raise ValueError("cycle spectra are built for one-dimensional IFS")
    L = integer_set(L, require_zero=True)
    certify_finite_pair(ifs.digits, [Fraction(l, ifs.scale) for l in L])
    cycles = find_cycles(ifs.scale, ifs.digits, L, max_len)
    points = sorted({c for cyc in cycles for c in cyc})
    return GeneratedSpectrum(ifs.scale, L, tuple(points))


# ---------------------------------------------------------------------------
# finite spectra of direct sums


def compose_spectra(parts: Sequence[tuple]) -> tuple[tuple, RationalSpectrum]:
    """``D = (+) b_k C_k`` with spectrum ``(+) L_k / (a_k b_k)``.

    ``parts`` holds ``(b_k, C_k, a_k, L_k)`` with ``L_k / a_k`` a spectrum of
    ``C_k``. The ratios ``b_{k+1} / (a_j b_j)`` must be integers for ``j <= k``.
    Returns ``(D, spectrum)``.
    """
    parts = [(as_rational(b), integer_set(C), as_rational(a), integer_set(L)) for b, C, a, L in parts]
    for k, (b, C, a, L) in enumerate(parts):
        try:
            certify_finite_pair(C, [l / a for l in L])
        except NotSpectralError as exc:
            raise HypothesisError(f"part {k}: L/a is not a spectrum of C ({exc})") from None
    for k in range(len(parts) - 1):
        b_next = parts[k + 1][0]
        for j in range(k + 1):
            ratio = b_next / (parts[j][2] * parts[j][0])
            if ratio.denominator != 1:
                raise HypothesisError(
                    f"divisibility fails at (k={k}, j={j}): b_{k + 1}/(a_{j} b_{j}) = {ratio}"
                )
    try:
        D = direct_sum(*[[b * c for c in C] for b, C, _, _ in parts])
    except ValueError:
        raise HypothesisError("digit sum is not direct") from None
    try:
        spec = direct_sum(*[[l / (a * b) for l in L] for b, _, a, L in parts])
    except ValueError:
        raise HypothesisError("spectrum sum is not direct") from None
    D = tuple(int(d) if d.denominator == 1 else d for d in D)
    return D, RationalSpectrum(spec, certify_finite_pair(D, spec))


# ---------------------------------------------------------------------------
# convolution factorization


@dataclasses.dataclass(frozen=True)
class ConvolutionFactorization:
    """``B = (+)_k a**(n_k*p + k) C_k``; then ``mu_B = mu_base * delta_F`` with
    base digits ``(+)_k a**k C_k`` at scale ``a**p`` and
    ``F = (+)_k (+)_{l < n_k} a**(l*p + k) C_k``.
    """

    a: int
    p: int
    exponents: tuple
    components: tuple
    base: AffineIFS
    atom_set: tuple

    def residual(self, ifs: AffineIFS, xs, tol: float = 1e-12) -> float:
        xs = np.asarray(xs, dtype=float)
        lhs = invariant_ft(ifs, xs, tol)
        rhs = invariant_ft(self.base, xs, tol) * delta_hat(self.atom_set, xs)
        return float(np.max(np.abs(lhs - rhs)))

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "p": self.p,
            "exponents": list(self.exponents),
            "components": [list(c) for c in self.components],
            "base": self.base.to_json(),
            "atom_set": list(self.atom_set),
        }


def _integer_root(A: int, p: int) -> Optional[int]:
    r = round(A ** (1.0 / p))
    for c in (r - 1, r, r + 1):
        if c >= 2 and c**p == A:
            return c
    return None


def _radix_digits(b: int, a: int) -> list[int]:
    out = []
    while b:
        b, r = divmod(b, a)
        out.append(r)
    return out


def _assemble(a: int, p: int, exps: list, comps: list) -> ConvolutionFactorization:
    base_digits = direct_sum(*[[a**k * c for c in comps[k]] for k in range(p)])
    F_parts = [[a ** (l * p + k) * c for c in comps[k]] for k in range(p) for l in range(exps[k])]
    F = direct_sum(*F_parts) if F_parts else (0,)
    return ConvolutionFactorization(a, p, tuple(exps), tuple(tuple(c) for c in comps), AffineIFS(a**p, base_digits), F)


def factor_convolution(ifs: AffineIFS, a: int, p: int) -> Optional[ConvolutionFactorization]:
    """Split ``B`` by base-``a`` digit positions grouped by residue mod ``p``.

    ``B`` must be the full product of its per-position digit sets, and each
    residue class ``k`` of positions may carry at most one nontrivial position
    ``n_k*p + k``. Otherwise, if the digits are pairwise incongruent mod ``a``,
    the trivial factorization ``C_0 = B`` is returned; else ``None``.
    """
    if ifs.dim != 1:
        raise ValueError("factor_convolution is one-dimensional")
    if p < 2:
        raise ValueError("p must be at least 2")
    if a < 2 or a**p != ifs.scale:
        root = _integer_root(ifs.scale, p)
        raise ValueError(
            f"scale {ifs.scale} is not {a}**{p}" + ("" if root else f": not a perfect {p}-th power")
        )
    B = ifs.digits
    if B[0] < 0:
        return None
    expansions = [_radix_digits(b, a) for b in B]
    width = max((len(e) for e in expansions), default=0)
    positions = {}
    for e in range(width):
        D = sorted({(ex[e] if e < len(ex) else 0) for ex in expansions})
        if D != [0]:
            positions[e] = D
    product = direct_sum(*[[a**e * d for d in D] for e, D in positions.items()]) if positions else (0,)
    if product == B:
        by_class: dict[int, int] = {}
        ok = True
        for e in positions:
            k = e % p
            if k in by_class:
                ok = False
                break
            by_class[k] = e
        if ok:
            exps = [by_class[k] // p if k in by_class else 0 for k in range(p)]
            comps = [positions[by_class[k]] if k in by_class else [0] for k in range(p)]
            return _assemble(a, p, exps, comps)
    if len({b % a for b in B}) == len(B):
        return _assemble(a, p, [0] * p, [list(B)] + [[0]] * (p - 1))
    return None


# ---------------------------------------------------------------------------
# spectra from digit powers


@dataclasses.dataclass(frozen=True)
class DigitPowerSpectrum:
    ifs: AffineIFS
    factorization: ConvolutionFactorization
    base_spectrum: GeneratedSpectrum
    atom_spectrum: RationalSpectrum
    spectrum: DirectSumSpectrum

    def to_json(self) -> dict:
        return {
            "ifs": self.ifs.to_json(),
            "factorization": self.factorization.to_json(),
            "base_spectrum": self.base_spectrum.to_json(),
            "atom_spectrum": self.atom_spectrum.to_json(),
            "spectrum": self.spectrum.to_json(),
        }


def digit_power_spectrum(
    a: int, p: int, n: Sequence[int], C: Sequence[Iterable[int]], L: Sequence[Iterable[int]]
) -> DigitPowerSpectrum:
    """Spectrum of ``mu_B`` at scale ``a**p`` for ``B = (+)_k a**(n_k*p + k) C_k``.

    Requires ``L_k / a`` to be a spectrum of ``C_k`` for each ``k`` and
    ``gcd(C_0) == 1``. The measure splits as ``mu_base * delta_F``; the base
    digits ``(+) a**k C_k`` have spectrum ``(+) a**(p-1-k) L_k / a**p`` which
    seeds a cycle spectrum, and ``F`` gets the composed finite spectrum.
    """
    if not (len(n) == len(C) == len(L) == p):
        raise HypothesisError(f"need exactly p={p} exponents, components and digit spectra")
    C = [integer_set(c, require_zero=True) for c in C]
    L = [integer_set(l, require_zero=True) for l in L]
    for k in range(p):
        if n[k] < 0:
            raise HypothesisError(f"exponent n_{k} must be nonnegative")
        if len({c % a for c in C[k]}) != len(C[k]):
            raise HypothesisError(f"(b) C_{k} has elements congruent mod {a}")
        try:
            certify_finite_pair(C[k], [Fraction(l, a) for l in L[k]])
        except NotSpectralError as exc:
            raise HypothesisError(f"(a) L_{k}/{a} is not a spectrum of C_{k}: {exc}") from None
    if set_gcd(C[0]) != 1:
        raise HypothesisError("gcd(C_0) must be 1")
    try:
        B = direct_sum(*[[a ** (n[k] * p + k) * c for c in C[k]] for k in range(p)])
    except ValueError:
        raise HypothesisError("digit sum is not direct") from None
    ifs = AffineIFS(a**p, B)
    fac = _assemble(a, p, list(n), [list(c) for c in C])
    base_L = direct_sum(*[[a ** (p - 1 - k) * l for l in L[k]] for k in range(p)])
    base_spec = cycle_spectrum(fac.base, base_L)
    parts = [(a ** (l * p + k), C[k], a, L[k]) for k in range(p) for l in range(n[k])]
    parts.sort(key=lambda part: part[0])
    if parts:
        F, F_spec = compose_spectra(parts)
        assert tuple(F) == fac.atom_set
    else:
        F_spec = RationalSpectrum([0], certify_finite_pair([0], [0]))
    return DigitPowerSpectrum(ifs, fac, base_spec, F_spec, DirectSumSpectrum(base_spec, F_spec.points))


# ---------------------------------------------------------------------------
# the affine group acting on pairs


def affine_transform_pair(measure, spectrum, V, shift=None):
    """Push ``measure`` forward by ``x -> V x + shift``; the spectrum maps by ``(V^T)^{-1}``.

    One-dimensional IFS measures with ``V`` a scalar ``c`` and integral
    ``c*B + (A-1)*shift`` stay IFS measures; everything else is wrapped in an
    :class:`AffineImage`. Nested images are flattened so composition is exact.
    """
    d = getattr(measure, "dim", None) or (len(measure.V) if isinstance(measure, AffineImage) else 1)
    V = as_matrix(V, d)
    shift = tuple(as_rational(s) for s in (shift if shift is not None else [0] * d))
    if len(shift) != d or len(V) != d:
        raise ValueError("dimension mismatch between V, shift and the measure")
    W = transpose(mat_inverse(V))
    new_measure = _push(measure, V, shift, d)
    new_spectrum = _map_spectrum(spectrum, W)
    return new_measure, new_spectrum


def _push(measure, V: Matrix, shift: tuple, d: int):
    if isinstance(measure, AffineImage):
        V2 = mat_mul(V, measure.V)
        s2 = tuple(a + b for a, b in zip(mat_vec(V, measure.shift), shift))
        return _push(measure.base, V2, s2, d)
    c = _scalar(V)
    if isinstance(measure, AffineIFS) and measure.dim == 1 and c is not None:
        A = measure.scale
        digits = [c * b + (A - 1) * shift[0] for b in measure.digits]
        if all(x.denominator == 1 for x in digits) and 0 in digits:
            return AffineIFS(A, tuple(int(x) for x in digits))
    if all(V[i][j] == (1 if i == j else 0) for i in range(d) for j in range(d)) and not any(shift):
        return measure
    return AffineImage(measure, V, shift)


def _map_spectrum(spectrum, W: Matrix):
    if isinstance(spectrum, LinearImageSpectrum):
        M = mat_mul(W, spectrum.M)
        return _map_spectrum(spectrum.base, M)
    if all(W[i][j] == (1 if i == j else 0) for i in range(len(W)) for j in range(len(W))):
        return spectrum
    if isinstance(spectrum, RationalSpectrum) and len(W) == 1:
        return RationalSpectrum([W[0][0] * p for p in spectrum.points])
    return LinearImageSpectrum(spectrum, W)


# ---------------------------------------------------------------------------
# new spectra from old


def _integral_spectrum(spectrum) -> bool:
    if isinstance(spectrum, GeneratedSpectrum):
        return spectrum.is_integral
    if isinstance(spectrum, RationalSpectrum):
        return all(p.denominator == 1 for p in spectrum.points)
    return False


def spectrum_from_old(ifs: AffineIFS, spectrum: GeneratedSpectrum, L: Iterable[int]) -> GeneratedSpectrum:
    """``A*spectrum (+) L`` for integer digits and an integral spectrum.

    The new set is a spectrum when ``L/A`` is a spectrum of ``B`` and
    ``delta_hat_B`` is periodic under the old spectrum; the periodicity is only
    machine-checked when both are integral, so other inputs are refused.
    """
    if ifs.dim != 1:
        raise ValueError("one-dimensional IFS required")
    if not isinstance(spectrum, GeneratedSpectrum) or not _integral_spectrum(spectrum):
        raise HypothesisError("periodicity of delta_hat_B under the spectrum is only verified for integral spectra")
    if spectrum.scale != ifs.scale:
        raise HypothesisError("spectrum was generated at a different scale")
    L = integer_set(L)
    try:
        certify_finite_pair(ifs.digits, [Fraction(l, ifs.scale) for l in L])
    except NotSpectralError as exc:
        raise HypothesisError(f"L/A is not a spectrum of B: {exc}") from None
    new = spectrum.with_head(L)
    new.elements(ifs.scale**3)  # direct-sum check on a prefix
    return new


def recover_digit_spectrum(ifs: AffineIFS, spectrum, L: Iterable[int], radius=None) -> RationalSpectrum:
    """Converse check: if ``A*spectrum (+) L == spectrum`` on a prefix, certify ``L/A`` for ``B``."""
    L = integer_set(L)
    A = ifs.scale
    radius = Fraction(radius or A**4)
    inner = spectrum.elements((radius + max(abs(l) for l in L)) / A + 1)
    image = sorted({A * t + l for t in inner for l in L if abs(A * t + l) < radius})
    if image != spectrum.elements(radius):
        raise HypothesisError("A*spectrum (+) L does not reproduce the spectrum on the prefix")
    pts = [Fraction(l, A) for l in L]
    return RationalSpectrum(pts, certify_finite_pair(ifs.digits, pts))


# ---------------------------------------------------------------------------
# infinitely many spectra


@dataclasses.dataclass(frozen=True)
class SpectraFamily:
    ifs: AffineIFS
    reduced_ifs: AffineIFS
    reduction: int
    parent: GeneratedSpectrum
    shifts: tuple
    digit_sets: tuple
    spectra: tuple

    def to_json(self) -> dict:
        return {
            "ifs": self.ifs.to_json(),
            "reduction": self.reduction,
            "parent": self.parent.to_json(),
            "shifts": list(self.shifts),
            "digit_sets": [list(L) for L in self.digit_sets],
            "spectra": [s.to_json() for s in self.spectra],
        }


def _greedy_shifts(parent: GeneratedSpectrum, count: int) -> list[int]:
    chosen: list[int] = []
    n = 0
    while len(chosen) < count:
        n += 1
        radius = n + 1
        members = set(parent.elements(radius))
        if all(n - m not in members for m in chosen):
            chosen.append(n)
    return chosen


def infinite_spectra_family(
    ifs: AffineIFS, L: Iterable[int], count: int, shifts: str = "greedy"
) -> SpectraFamily:
    """``count`` distinct spectra ``A*parent (+) L_i`` of ``mu_B`` when ``#B < A``.

    After dividing ``B`` by its gcd ``D`` (frequencies scale by ``D``) and
    reducing ``L`` mod ``A``, ``L_i`` replaces the smallest nonzero digit
    ``l0`` by ``A*n_i + l0``. The shifts ``n_i`` satisfy ``n_i - n_j`` not in
    the parent spectrum: ``"greedy"`` takes the smallest such positive
    integers, ``"radix"`` takes ``sum_{k<=i} A**k * lbar`` with ``lbar`` the
    smallest digit missing from ``L``.
    """
    if ifs.dim != 1:
        raise ValueError("one-dimensional IFS required")
    A = ifs.scale
    if len(ifs.digits) >= A:
        raise HypothesisError("hypothesis #B < A fails")
    if count < 1:
        raise ValueError("count must be positive")
    L = integer_set(L, require_zero=True)
    certify_finite_pair(ifs.digits, [Fraction(l, A) for l in L])
    D = set_gcd(ifs.digits)
    reduced = AffineIFS(A, tuple(b // D for b in ifs.digits))
    Lr = integer_set({(D * l) % A for l in L}, require_zero=True)
    parent = cycle_spectrum(reduced, Lr)
    if not parent.is_integral:
        raise HypothesisError("parent spectrum is not integral after gcd reduction")
    nonzero = [l for l in Lr if l]
    if not nonzero:
        raise HypothesisError("L has no nonzero digit")
    l0 = nonzero[0]
    if shifts == "greedy":
        ns = _greedy_shifts(parent, count)
    elif shifts == "radix":
        lbar = min(set(range(A)) - set(Lr))
        ns = [sum(A**k * lbar for k in range(i + 1)) for i in range(1, count + 1)]
    else:
        raise ValueError(f"unknown shift rule {shifts!r}")
    digit_sets, spectra = [], []
    for n_i in ns:
        L_i = tuple(sorted((set(Lr) - {l0}) | {A * n_i + l0}))
        new = spectrum_from_old(reduced, parent, L_i)
        digit_sets.append(L_i)
        spectra.append(new if D == 1 else LinearImageSpectrum(new, as_matrix(Fraction(1, D))))
    # wide enough to contain every replaced digit (spectra live at scale 1/D)
    radius = max(A**3, Fraction(max(max(L_i) for L_i in digit_sets), D) + 1)
    prefixes = [tuple(s.elements(radius)) for s in spectra]
    if len(set(prefixes)) != len(prefixes):
        raise HypothesisError(f"family members coincide on radius {radius}; increase the radius or change shifts")
    return SpectraFamily(ifs, reduced, D, parent, tuple(ns), tuple(digit_sets), tuple(spectra))
