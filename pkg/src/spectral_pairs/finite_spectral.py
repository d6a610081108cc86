"""
Spectra of finite integer sets.

A finite set ``A`` has spectrum ``L`` when ``#L == #A`` and the matrix
``(exp(2*pi*i*a*l))`` scaled by ``1/sqrt(#A)`` is unitary. With integer (or
rational) nodes and rational frequencies every entry of the Gram matrix is a
sum of roots of unity, so unitarity is decided exactly.
"""
from __future__ import annotations

import dataclasses
import itertools
import logging
import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .exact_core import (
    as_rational,
    delta_hat,
    integer_set,
    nonrational_unit_roots,
    rational_unit_roots,
    root_denominator_bound,
    vanishing_sum,
)

log = logging.getLogger(__name__)


class NotSpectralError(ValueError):
    """A proposed spectral pair failed its exact check."""


@dataclasses.dataclass(frozen=True)
class HadamardCertificate:
    nodes: tuple
    frequencies: tuple
    max_offdiag_gram: float

    def to_json(self) -> dict:
        return {
            "nodes": [str(n) for n in self.nodes],
            "frequencies": [str(f) for f in self.frequencies],
            "max_offdiag_gram": self.max_offdiag_gram,
        }


@dataclasses.dataclass(frozen=True)
class RationalSpectrum:
    """A finite set of exact rational frequencies, optionally carrying its certificate."""

    points: tuple
    certificate: Optional[HadamardCertificate] = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(sorted(as_rational(p) for p in self.points)))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, item):
        return as_rational(item) in self.points

    def elements(self, radius) -> list:
        return [p for p in self.points if abs(p) < radius]

    def points_within(self, radius) -> np.ndarray:
        return np.array([float(p) for p in self.elements(radius)])

    def to_json(self) -> dict:
        out = {"type": "finite", "points": [str(p) for p in self.points]}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def _as_rational_nodes(nodes: Iterable) -> tuple:
    out = tuple(sorted(as_rational(n) for n in nodes))
    if len(set(out)) != len(out):
        raise ValueError("repeated node")
    return out


def exponential_sum_vanishes(nodes: Sequence[Fraction], t: Fraction) -> bool:
    """Exact ``sum(exp(2*pi*i*x*t) for x in nodes) == 0`` for rational nodes and ``t``."""
    den = math.lcm(*(Fraction(n).denominator for n in nodes))
    ints = [int(n * den) for n in nodes]
    shift = min(ints)
    return vanishing_sum([k - shift for k in ints], Fraction(t) / den)


def certify_finite_pair(A: Iterable, L: Iterable) -> HadamardCertificate:
    """Certify that ``L`` is a spectrum of the finite set ``A``.

    ``A`` may hold integers or rationals; ``L`` holds rationals (``"p/q"`` strings
    are accepted). Raises :class:`NotSpectralError` naming the first failing pair.
    """
    nodes = _as_rational_nodes(A)
    freqs = tuple(as_rational(l) for l in L)
    if len(freqs) != len(nodes):
        raise NotSpectralError(
            f"cardinality must equal: #A = {len(nodes)} but #L = {len(freqs)}"
        )
    if len(set(freqs)) != len(freqs):
        raise NotSpectralError("frequencies are not distinct")
    for l, m in itertools.combinations(freqs, 2):
        if not exponential_sum_vanishes(nodes, l - m):
            raise NotSpectralError(f"frequencies {l} and {m} are not orthogonal on A")
    grid = np.array([float(n) for n in nodes])
    diffs = [float(l - m) for l, m in itertools.permutations(freqs, 2)]
    gram = float(np.abs(delta_hat(tuple(grid), np.array(diffs))).max()) if diffs else 0.0
    return HadamardCertificate(nodes, freqs, gram)


def is_spectrum(A: Iterable, L: Iterable) -> bool:
    try:
        certify_finite_pair(A, L)
    except NotSpectralError:
        return False
    return True


def default_denominator_bound(A: Sequence[int]) -> int:
    return root_denominator_bound(max(A))


def enumerate_spectra(A: Iterable[int], denominator_bound: Optional[int] = None) -> list[RationalSpectrum]:
    """Every spectrum of ``A`` inside [0, 1) that contains 0 and has rational points.

    Candidates are the exact rational unit-circle roots of the mask polynomial;
    spectra are the ``(#A - 1)``-cliques of the graph joining roots whose
    difference is again a root. Unit-circle roots that are not roots of unity
    are logged, never classified.
    """
    A = integer_set(A, require_zero=True)
    if A[0] < 0:
        raise ValueError("digit set must be nonnegative")
    bound = denominator_bound or default_denominator_bound(A)
    stray = nonrational_unit_roots(A, bound)
    if stray:
        log.warning("unresolved numeric unit-circle roots of p_A: %s", stray)
    roots = rational_unit_roots(A, bound)
    need = len(A) - 1
    adj = {
        r: {s for s in roots if s != r and vanishing_sum(A, s - r)} for r in roots
    }

    found = []

    def extend(clique: list, candidates: list):
        if len(clique) == need:
            found.append(clique[:])
            return
        for i, r in enumerate(candidates):
            if len(clique) + len(candidates) - i < need:
                return
            clique.append(r)
            extend(clique, [s for s in candidates[i + 1 :] if s in adj[r]])
            clique.pop()

    extend([], roots)
    spectra = []
    for clique in found:
        pts = [Fraction(0)] + clique
        spectra.append(RationalSpectrum(pts, certify_finite_pair(A, pts)))
    return sorted(spectra, key=lambda s: s.points)


# ---------------------------------------------------------------------------
# complementing sets: peeling into interval operations


@dataclasses.dataclass(frozen=True)
class StepI:
    """``C -> d*C + {0, ..., d-1}``"""

    d: int


@dataclasses.dataclass(frozen=True)
class StepII:
    """``C -> d*C``"""

    d: int


Step = Union[StepI, StepII]


@dataclasses.dataclass(frozen=True)
class OperationChain:
    base_length: int
    steps: tuple

    def replay(self) -> tuple:
        C = list(range(self.base_length))
        for step in self.steps:
            if isinstance(step, StepI):
                C = [step.d * c + k for c in C for k in range(step.d)]
            else:
                C = [step.d * c for c in C]
        return tuple(sorted(C))

    def to_json(self) -> dict:
        return {
            "base_length": self.base_length,
            "steps": [[type(s).__name__, s.d] for s in self.steps],
        }


def _is_interval(A: Sequence[int]) -> bool:
    return tuple(A) == tuple(range(len(A)))


def _block_peels(A: Sequence[int]) -> list[int]:
    """Every ``d >= 2`` (largest first) with ``A = d*C + {0..d-1}``."""
    run = 0
    while run < len(A) and A[run] == run:
        run += 1
    members = set(A)
    out = []
    for d in range(run, 1, -1):
        if len(A) % d:
            continue
        if all(a % d == 0 or a - 1 in members for a in A) and all(
            all(a + k in members for k in range(d)) for a in A if a % d == 0
        ) and all(a - a % d in members for a in A):
            out.append(d)
    return out


def decompose_complementing(A: Iterable[int]) -> Optional[OperationChain]:
    """Write ``A`` as an interval ``{0..c-1}`` pushed through block and dilation steps.

    Returns ``None`` when no sequence of peels reaches an interval; every
    complementing set of an interval peels completely.
    """
    A = integer_set(A, require_zero=True)
    if A[0] < 0:
        raise ValueError("digit set must be nonnegative")

    def peel(S: tuple) -> Optional[tuple]:
        if _is_interval(S):
            return len(S), ()
        for d in _block_peels(S):
            rest = peel(tuple(sorted({a // d for a in S})))
            if rest is not None:
                return rest[0], rest[1] + (StepI(d),)
        g = math.gcd(*S)
        if g >= 2:
            rest = peel(tuple(a // g for a in S))
            if rest is not None:
                return rest[0], rest[1] + (StepII(g),)
        return None

    result = peel(A)
    if result is None:
        return None
    chain = OperationChain(*result)
    assert chain.replay() == A
    return chain


def spectrum_from_chain(chain: OperationChain) -> RationalSpectrum:
    """Spectrum of ``chain.replay()`` built by the twisted tensor rule.

    The interval ``{0..c-1}`` starts with ``(1/c){0..c-1}``; a dilation by ``d``
    divides the spectrum by ``d``; a block step tensors with the Fourier matrix
    of ``Z_d``: ``L -> (L + {0..d-1}) / d``.
    """
    c = chain.base_length
    L = [Fraction(k, c) for k in range(c)]
    for step in chain.steps:
        if isinstance(step, StepII):
            L = [l / step.d for l in L]
        else:
            L = [(l + j) / step.d for l in L for j in range(step.d)]
    return RationalSpectrum(L, certify_finite_pair(chain.replay(), L))


# ---------------------------------------------------------------------------
# direct sums and complements


@dataclasses.dataclass(frozen=True)
class TileCertificate:
    """``A (+) complement == Z_modulus``; the tile set of ``A + [0, 1]`` is ``complement + modulus*Z``."""

    complement: tuple
    modulus: int

    def to_json(self) -> dict:
        return {
            "complement": list(self.complement),
            "modulus": self.modulus,
            "tile_set": f"{list(self.complement)} + {self.modulus}Z",
        }


def check_direct_sum(A: Iterable, B: Iterable, C: Iterable) -> bool:
    """True iff every element of ``C`` is uniquely ``a + b`` and nothing else arises."""
    sums = [a + b for a in A for b in B]
    return len(set(sums)) == len(sums) and set(sums) == set(C)


def direct_sum(*parts: Iterable) -> tuple:
    """``parts[0] (+) parts[1] (+) ...``; raises ``ValueError`` on a collision."""
    acc = [0]
    for part in parts:
        part = list(part)
        sums = [x + y for x in acc for y in part]
        if len(set(sums)) != len(sums):
            raise ValueError("sum is not direct")
        acc = sums
    return tuple(sorted(acc))


def covers_cyclic_group(A: Iterable[int], B: Iterable[int], n: int) -> bool:
    residues = [(a + b) % n for a in A for b in B]
    return len(residues) == n and len(set(residues)) == n


def find_complement(A: Iterable[int], n: int) -> Optional[TileCertificate]:
    """Lexicographically smallest ``B`` in ``{0..n-1}`` with ``A (+) B == Z_n``, or ``None``.

    Depth-first over ``b = 0, 1, ...`` trying "take b" before "skip b", so the
    first solution found is the smallest sorted tuple. A branch dies as soon as
    the smallest uncovered residue can no longer be reached from a ``b`` still
    to be decided.
    """
    A = integer_set(A)
    if n < 1 or n % len(A):
        return None
    residues = sorted({a % n for a in A})
    if len(residues) != len(A):
        return None
    need = n // len(A)
    covered = [False] * n
    chosen: list[int] = []

    def search(cur: int) -> bool:
        if len(chosen) == need:
            return True
        if need - len(chosen) > n - cur:
            return False
        first = covered.index(False)
        if all((first - a) % n < cur for a in residues):
            return False
        hit = [(a + cur) % n for a in residues]
        if not any(covered[h] for h in hit):
            for h in hit:
                covered[h] = True
            chosen.append(cur)
            if search(cur + 1):
                return True
            chosen.pop()
            for h in hit:
                covered[h] = False
        return search(cur + 1)

    if not search(0):
        return None
    B = tuple(chosen)
    assert covers_cyclic_group(A, B, n)
    return TileCertificate(B, n)
