"""
Evidence for and against spectrality.

A set ``Lambda`` is a spectrum of a probability measure ``mu`` iff
``sum_lambda |mu_hat(x + lambda)|**2 == 1`` for every ``x``. Truncating the sum
gives partial sums that must climb to 1 for a spectrum and can never pass 1
for an orthogonal family (Bessel). A bounded search over orthogonal families
whose best partial sum stays well below 1 is a deficiency witness.
"""
from __future__ import annotations

import csv
import dataclasses
import itertools
import logging
import math
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import networkx as nx
import numpy as np

from .exact_core import as_rational, rational_unit_roots, root_denominator_bound, set_gcd, vanishing_sum
from .ifs_measures import AffineIFS, ft_vanishes_exactly, invariant_ft

log = logging.getLogger(__name__)

BESSEL_SLACK = 1e-9
NUMERIC_ZERO = 1e-10


# ---------------------------------------------------------------------------
# sample grids


def sample_grid(n: int = 25, dim: int = 1, seed: Optional[int] = None, avoid: Iterable = ()) -> np.ndarray:
    """``n`` low-discrepancy points in ``[0, 1)**dim`` (additive recurrence on the
    generalized golden ratio), nudged away from the points in ``avoid`` mod 1.
    """
    # phi_d is the positive root of x**(d+1) = x + 1
    phi = 2.0
    for _ in range(64):
        phi = (1.0 + phi) ** (1.0 / (dim + 1))
    alpha = np.array([phi ** -(k + 1) for k in range(dim)]) % 1.0
    offset = np.full(dim, 0.5) if seed is None else np.random.default_rng(seed).random(dim)
    pts = (offset + np.outer(np.arange(1, n + 1), alpha)) % 1.0
    avoid = [np.atleast_1d(np.asarray(a, dtype=float)) % 1.0 for a in avoid]
    for i in range(n):
        for a in avoid:
            gap = np.abs(((pts[i] - a) + 0.5) % 1.0 - 0.5)
            if np.all(gap < 1e-6):
                pts[i] = (pts[i] + 1e-3) % 1.0
    return pts[:, 0] if dim == 1 else pts


# ---------------------------------------------------------------------------
# Parseval scans


@dataclasses.dataclass(frozen=True)
class ParsevalReport:
    sample_points: list
    radius: float
    partial_sums: list
    min_sum: float
    max_sum: float
    tol: float
    terms: int

    @property
    def passed(self) -> bool:
        return self.min_sum >= 1.0 - self.tol and self.bessel_ok

    @property
    def bessel_ok(self) -> bool:
        return self.max_sum <= 1.0 + BESSEL_SLACK

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "terms": self.terms,
            "tol": self.tol,
            "min_sum": self.min_sum,
            "max_sum": self.max_sum,
            "passed": self.passed,
            "bessel_ok": self.bessel_ok,
            "sample_points": [np.atleast_1d(x).tolist() for x in self.sample_points],
            "partial_sums": list(self.partial_sums),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            dim = len(np.atleast_1d(self.sample_points[0])) if self.sample_points else 1
            w.writerow([f"x{i}" for i in range(dim)] + ["partial_sum"])
            for x, s in zip(self.sample_points, self.partial_sums):
                w.writerow(list(np.atleast_1d(x)) + [repr(float(s))])


def _evaluator(measure) -> Callable:
    if callable(measure) and not hasattr(measure, "ft"):
        return measure
    return measure.ft


def parseval_scan(measure, spectrum, xs=None, radius: float = 500.0, tol: float = 1e-2) -> ParsevalReport:
    """Partial sums ``sum_{|lambda| < radius} |mu_hat(x + lambda)|**2`` at each sample.

    ``measure`` is a callable Fourier transform or an object with ``.ft``;
    objects that also expose ``parseval_sums(spectrum, xs, radius)`` get their
    fast path (box-union regions contract the separable sum per axis).
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    fast = getattr(measure, "parseval_sums", None)
    if fast is not None:
        if xs is None:
            xs = sample_grid(25, measure.dim)
        sums, terms = fast(spectrum, np.asarray(xs, dtype=float), radius)
    else:
        pts = np.asarray(spectrum.points_within(radius), dtype=float)
        if xs is None:
            dim = 1 if pts.ndim == 1 else pts.shape[1]
            xs = sample_grid(25, dim, avoid=[-p for p in pts[: min(len(pts), 64)]])
        ft = _evaluator(measure)
        xs = np.asarray(xs, dtype=float)
        sums = []
        for x in xs:
            vals = ft(x + pts)
            sums.append(float(np.sum(np.abs(vals) ** 2)))
        terms = len(pts)
    sums = [float(s) for s in sums]
    return ParsevalReport(
        [np.asarray(x).tolist() for x in xs], float(radius), sums, min(sums), max(sums), float(tol), int(terms)
    )


# ---------------------------------------------------------------------------
# greedy orthogonal families


@dataclasses.dataclass(frozen=True)
class OrthogonalFamily:
    points: tuple
    numeric_pairs: tuple = ()

    @property
    def exact(self) -> bool:
        return not self.numeric_pairs

    def __len__(self):
        return len(self.points)

    def to_json(self) -> dict:
        return {
            "points": [str(p) for p in self.points],
            "size": len(self.points),
            "exact": self.exact,
            "numeric_pairs": [[str(a), str(b)] for a, b in self.numeric_pairs],
        }


def zero_grid(ifs: AffineIFS) -> int:
    """``g`` such that every zero of ``mu_hat`` lies in ``(1/g) Z``.

    Zeros are ``A**n * (r + k)`` with ``r`` a rational root of the mask and
    ``n >= 1``, so ``g`` is the lcm of the denominators of ``A*r``.
    """
    B = ifs.digits
    roots = rational_unit_roots(B, root_denominator_bound(max(B) - min(B)))
    g = 1
    for r in roots:
        g = math.lcm(g, (ifs.scale * r).denominator)
    return g


def default_family_step(ifs: AffineIFS) -> Fraction:
    """Integer candidates when the digits are coprime (integer spectra exist), else the zero grid."""
    if set_gcd(ifs.digits) == 1:
        return Fraction(1)
    return Fraction(1, zero_grid(ifs))


def _candidates(radius, step: Fraction, half_line: bool) -> list[Fraction]:
    k = math.ceil(Fraction(radius) / step)
    pts = [j * step for j in range(0 if half_line else -k, k + 1) if abs(j * step) < radius]
    pts.sort(key=lambda p: (abs(p), -p))
    return pts


def greedy_orthogonal_family(
    measure,
    radius: float,
    cap: Optional[int] = None,
    step=None,
    zero_test: Optional[Callable] = None,
    half_line: bool = False,
) -> OrthogonalFamily:
    """Greedy family containing 0 with every pairwise difference a zero of ``mu_hat``.

    Candidates on ``step * Z`` are taken by increasing ``|lambda|`` (positive
    first; only ``lambda >= 0`` with ``half_line``). For a one-dimensional
    :class:`AffineIFS` (or with ``zero_test``) zeros are decided exactly and the
    answer is final; otherwise ``|mu_hat| < 1e-10`` is accepted and the pair is
    recorded as numeric.
    """
    if cap is not None and cap < 1:
        raise ValueError("cap must be at least 1")
    exact = zero_test
    if exact is None and isinstance(measure, AffineIFS) and measure.dim == 1:
        exact = lambda t: ft_vanishes_exactly(measure, t)
    if step is None:
        step = default_family_step(measure) if isinstance(measure, AffineIFS) else Fraction(1)
    step = as_rational(step)
    ft = _evaluator(measure)
    chosen = [Fraction(0)]
    numeric = []
    for lam in _candidates(radius, step, half_line):
        if cap is not None and len(chosen) >= cap:
            break
        if lam == 0:
            continue
        flagged = []
        ok = True
        for mu in chosen:
            d = lam - mu
            if exact is not None:
                if exact(d):
                    continue
            elif abs(ft(float(d))) < NUMERIC_ZERO:
                flagged.append((mu, lam))
                continue
            ok = False
            break
        if ok:
            chosen.append(lam)
            numeric.extend(flagged)
    return OrthogonalFamily(tuple(sorted(chosen)), tuple(numeric))


# ---------------------------------------------------------------------------
# deficiency witness


@dataclasses.dataclass(frozen=True)
class DeficiencyWitness:
    x: float
    radius: float
    best_sum: float
    family_used: tuple
    threshold: float
    candidates: int
    factors: Optional[tuple] = None

    @property
    def gap(self) -> float:
        return 1.0 - self.best_sum

    @property
    def valid(self) -> bool:
        return self.gap >= self.threshold

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "radius": self.radius,
            "best_sum": self.best_sum,
            "gap": self.gap,
            "threshold": self.threshold,
            "valid": self.valid,
            "candidates": self.candidates,
            "family_size": len(self.family_used),
            "family_used": [str(p) for p in self.family_used],
            "factors": None if self.factors is None else [list(f) for f in self.factors],
            "search_space": "families containing 0 inside the radius whose differences are exact zeros of mu_hat",
        }


def digit_factorizations(digits: Sequence[int]) -> list[tuple[tuple, tuple]]:
    """All splits ``B = B1 (+) B2`` with ``0`` in both and neither trivial."""
    B = tuple(sorted(digits))
    out = []
    rest = [b for b in B if b]
    for k in range(1, len(rest) + 1):
        for sub in itertools.combinations(rest, k):
            B1 = (0,) + sub
            if len(B) % len(B1):
                continue
            # B2 is determined by the smallest elements not reached yet
            B2 = []
            covered = set()
            for b in B:
                if b in covered:
                    continue
                shifted = [b1 + b for b1 in B1]
                if any(s not in B or s in covered for s in shifted):
                    break
                covered.update(shifted)
                B2.append(b)
            else:
                if len(B2) > 1 and sorted(covered) == list(B):
                    out.append((B1, tuple(B2)))
    return out


def zeros_contained(scale: int, B1: Sequence[int], B2: Sequence[int], levels: int = 4, span: int = 4) -> bool:
    """Check zeros of ``mu_hat(scale, B1)`` are zeros of ``mu_hat(scale, B2)`` on the rational
    families ``scale**n * (r + k)`` for ``n <= levels`` and ``|k| <= span``."""
    nu1, nu2 = AffineIFS(scale, B1), AffineIFS(scale, B2)
    roots = rational_unit_roots(B1, root_denominator_bound(max(B1) - min(B1)))
    for r in roots:
        for n in range(1, levels + 1):
            for k in range(-span, span + 1):
                z = scale**n * (r + k)
                if ft_vanishes_exactly(nu1, z) and not ft_vanishes_exactly(nu2, z):
                    return False
    return True


def _class_edge(digits, rho: int, rho2: int, g: int, scale: int) -> Optional[bool]:
    """Compatibility of two residue classes mod ``g*scale``; ``None`` when undecided by the class."""
    N = rho - rho2
    if vanishing_sum(digits, Fraction(N, g * scale)):
        return True
    if N % scale == 0:
        return None
    return False


def _best_family(ms: list, ws: dict, must_zero: bool, ctx) -> tuple[float, list]:
    """Max total weight of a family of grid points ``m/g`` with pairwise exact-zero differences."""
    digits, g, scale, exact = ctx
    if not ms:
        return 0.0, []
    if len(ms) == 1:
        if must_zero and ms[0] != 0:
            return -1.0, []
        return ws[ms[0]], list(ms)
    mod = g * scale
    classes: dict[int, list] = {}
    for m in ms:
        classes.setdefault(m % mod, []).append(m)
    keys = sorted(classes)
    if len(keys) == 1:
        rho = keys[0]
        sub = [(m - rho) // scale for m in ms]
        sub_ws = {(m - rho) // scale: ws[m] for m in ms}
        val, fam = _best_family(sub, sub_ws, must_zero and rho == 0, ctx)
        return val, [scale * m + rho for m in fam]
    edges = {}
    for r1, r2 in itertools.combinations(keys, 2):
        e = _class_edge(digits, r1, r2, g, scale)
        if e is None:
            return _clique_fallback(ms, ws, must_zero, exact, g)
        edges[(r1, r2)] = e
    sub = {}
    for rho in keys:
        pts = classes[rho]
        sub[rho] = _best_family(
            [(m - rho) // scale for m in pts],
            {(m - rho) // scale: ws[m] for m in pts},
            must_zero and rho == 0,
            ctx,
        )
    usable = [r for r in keys if sub[r][0] >= 0]
    if must_zero:
        if 0 not in usable:
            return -1.0, []
        usable = [0] + [r for r in usable if r != 0 and edges[(0, r)]]
    best_val, best_set = -1.0, ()
    if len(usable) <= 14:
        for k in range(1, len(usable) + 1):
            for combo in itertools.combinations(usable, k):
                if must_zero and 0 not in combo:
                    continue
                if all(edges[(a, b)] for a, b in itertools.combinations(combo, 2)):
                    val = sum(sub[r][0] for r in combo)
                    if val > best_val:
                        best_val, best_set = val, combo
    else:
        G = nx.Graph()
        for r in usable:
            G.add_node(r, weight=int(round(sub[r][0] * 1e12)))
        G.add_edges_from((a, b) for a, b in itertools.combinations(usable, 2) if edges[(a, b)])
        if must_zero:
            G = G.subgraph([0] + list(G.neighbors(0))).copy()
            G.nodes[0]["weight"] += 10**15
        clique, _ = nx.max_weight_clique(G, weight="weight")
        best_set = tuple(sorted(clique))
        best_val = sum(sub[r][0] for r in best_set)
    fam = [scale * m + r for r in best_set for m in sub[r][1]]
    return best_val, sorted(fam)


def _clique_fallback(ms, ws, must_zero, exact, g):
    log.info("class structure undecided; falling back to a max-weight clique over %d points", len(ms))
    G = nx.Graph()
    for m in ms:
        G.add_node(m, weight=int(round(ws[m] * 1e12)))
    for m1, m2 in itertools.combinations(ms, 2):
        if exact(Fraction(m1 - m2, g)):
            G.add_edge(m1, m2)
    if must_zero:
        if 0 not in G:
            return -1.0, []
        G = G.subgraph([0] + list(G.neighbors(0))).copy()
    clique, _ = nx.max_weight_clique(G, weight="weight")
    return sum(ws[m] for m in clique), sorted(clique)


def best_orthogonal_sum(ifs: AffineIFS, x: float, radius: float) -> tuple[float, list, int]:
    """Exact maximum of ``sum |mu_hat(x + lambda)|**2`` over orthogonal families in the radius.

    Families are taken to contain 0 (translating a family by one of its points
    keeps it orthogonal). Zeros of ``mu_hat`` lie on ``(1/g) Z``; splitting the
    grid into classes mod ``g*A`` makes compatibility between different classes
    depend only on the classes, and points of one class reduce to the same
    problem on ``(m - rho)/A``.
    """
    g = zero_grid(ifs)
    A = ifs.scale
    kmax = math.ceil(radius * g)
    ms = [m for m in range(-kmax, kmax + 1) if abs(Fraction(m, g)) < radius]
    vals = invariant_ft(ifs, x + np.array(ms, dtype=float) / g)
    ws = {m: float(abs(v) ** 2) for m, v in zip(ms, vals)}
    exact = lambda t: ft_vanishes_exactly(ifs, t)
    val, fam = _best_family(ms, ws, True, (ifs.digits, g, A, exact))
    return val, [Fraction(m, g) for m in fam], len(ms)


def deficiency_witness(
    ifs: AffineIFS,
    x: float,
    radius: float,
    threshold: float = 0.01,
    factors: Optional[tuple] = None,
    require_factorization: bool = True,
) -> DeficiencyWitness:
    """Best Parseval partial sum at ``x`` over every orthogonal family within ``radius``.

    With ``require_factorization`` the digits must split as ``B1 (+) B2`` with the
    zeros of ``mu_hat(A, B1)`` among those of ``mu_hat(A, B2)`` (checked exactly
    on the rational zero families); that is the structure that forces the gap.
    """
    if ifs.dim != 1:
        raise ValueError("deficiency witness is one-dimensional")
    used = None
    if require_factorization:
        options = [factors] if factors is not None else digit_factorizations(ifs.digits)
        for B1, B2 in options:
            B1, B2 = tuple(sorted(B1)), tuple(sorted(B2))
            if sorted(b1 + b2 for b1 in B1 for b2 in B2) != list(ifs.digits):
                continue
            if zeros_contained(ifs.scale, B1, B2):
                used = (B1, B2)
                break
        if used is None:
            raise ValueError("no factorization B = B1 (+) B2 with zeros(nu1) inside zeros(nu2)")
    best, fam, n = best_orthogonal_sum(ifs, float(x), radius)
    return DeficiencyWitness(float(x), float(radius), float(best), tuple(fam), float(threshold), n, used)


def calibrate_witness_point(
    ifs: AffineIFS,
    radius: float,
    factor_digits: Sequence[int],
    grid: Optional[Sequence[float]] = None,
    max_factor_power: float = 0.9,
) -> tuple[float, float]:
    """Grid point maximizing the deficiency gap among ``x`` with ``|nu1_hat(x)|**2 <= max_factor_power``.

    Returns ``(x, gap)``; ``x = 0`` and other spectrum-like points where the gap
    vanishes are never chosen because they carry the full weight.
    """
    nu1 = AffineIFS(ifs.scale, tuple(factor_digits))
    grid = np.round(np.arange(0.01, 1.0, 0.01), 10) if grid is None else np.asarray(grid, dtype=float)
    best_x, best_gap = None, -1.0
    for x in grid:
        if abs(invariant_ft(nu1, float(x))) ** 2 > max_factor_power:
            continue
        val, _, _ = best_orthogonal_sum(ifs, float(x), radius)
        if 1.0 - val > best_gap:
            best_x, best_gap = float(x), 1.0 - val
    if best_x is None:
        raise ValueError("no grid point satisfies the factor bound")
    return best_x, best_gap
