"""
Exact arithmetic for finite integer node sets.

Integer sets are plain sorted tuples of ints (tuples of int tuples in higher
dimension). Rationals are :class:`fractions.Fraction`. Mask polynomials are
dense integer coefficient tuples, constant term first.

Orthogonality of exponentials with integer nodes and rational frequencies is
decided here without floating point: ``sum(exp(2*pi*i*a*p/q) for a in A) == 0``
holds iff the ``q``-th cyclotomic polynomial divides the mask polynomial of ``A``.
"""
from __future__ import annotations

import cmath
import dataclasses
import functools
import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

Rational = Fraction
IntegerSet = tuple
RationalLike = Union[int, Fraction, str]

TWO_PI = 2.0 * math.pi


def as_rational(value: RationalLike) -> Fraction:
    """Parse an exact rational from an int, a Fraction or a ``"p/q"`` string.

    Floats are refused: a float has already lost the exactness these routines
    rely on.

    >>> as_rational("3/12")
    Fraction(1, 4)
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact rational")


def integer_set(values: Iterable, *, require_zero: bool = False) -> tuple:
    """Normalize ``values`` to a sorted tuple of distinct integers (or int vectors).

    Raises ``ValueError`` on duplicates, on an empty input, or when ``require_zero``
    is set and 0 (the zero vector) is missing.
    """
    items = []
    for v in values:
        if isinstance(v, (list, tuple, np.ndarray)):
            items.append(tuple(int(c) for c in v))
        else:
            if int(v) != v:
                raise ValueError(f"non-integer element {v!r}")
            items.append(int(v))
    if not items:
        raise ValueError("empty digit set")
    out = tuple(sorted(set(items)))
    if len(out) != len(items):
        raise ValueError("integer set has repeated elements")
    if isinstance(out[0], tuple) and len({len(v) for v in out}) != 1:
        raise ValueError("mixed dimensions in integer set")
    if require_zero:
        zero = tuple(0 for _ in out[0]) if isinstance(out[0], tuple) else 0
        if zero not in out:
            raise ValueError("0 must belong to the set")
    return out


def dimension(A: Sequence) -> int:
    return len(A[0]) if isinstance(A[0], tuple) else 1


def reduce_mod_one(r: Fraction) -> Fraction:
    return r - math.floor(r)


def set_gcd(A: Iterable[int]) -> int:
    g = 0
    for a in A:
        g = math.gcd(g, int(a))
    return g


# ---------------------------------------------------------------------------
# Mask polynomials


@dataclasses.dataclass(frozen=True)
class MaskPolynomial:
    """``p_A(z) = sum(z**a for a in A)`` as dense coefficients, constant term first."""

    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def terms(self) -> dict[int, int]:
        return {k: c for k, c in enumerate(self.coeffs) if c}

    def __call__(self, z):
        return sum(c * z**k for k, c in self.terms.items())

    def __str__(self) -> str:
        parts = []
        for k, c in sorted(self.terms.items()):
            mono = "1" if k == 0 else ("z" if k == 1 else f"z^{k}")
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts) if parts else "0"


def mask_poly(A: Iterable[int]) -> MaskPolynomial:
    A = integer_set(A)
    if dimension(A) != 1:
        raise ValueError("mask polynomials are one-dimensional")
    if A[0] < 0:
        raise ValueError("mask polynomial exponents must be nonnegative")
    coeffs = [0] * (A[-1] + 1)
    for a in A:
        coeffs[a] += 1
    return MaskPolynomial(tuple(coeffs))


def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(p: Sequence[int], q: Sequence[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_divmod(p: Sequence[int], q: Sequence[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial; stays in the integers."""
    if q[-1] != 1:
        raise ValueError("divisor must be monic")
    rem = _trim(list(p))
    quot = [0] * max(len(rem) - len(q) + 1, 0)
    while len(rem) >= len(q):
        shift = len(rem) - len(q)
        c = rem[-1]
        quot[shift] = c
        for i, b in enumerate(q):
            rem[shift + i] -= c * b
        _trim(rem)
    return quot, rem


def _mobius(n: int) -> int:
    result, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    return -result if n > 1 else result


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def totient(n: int) -> int:
    result, k, m = n, 2, n
    while k * k <= m:
        if m % k == 0:
            while m % k == 0:
                m //= k
            result -= result // k
        k += 1
    if m > 1:
        result -= result // m
    return result


@functools.lru_cache(maxsize=None)
def root_denominator_bound(degree: int) -> int:
    """Largest ``q`` with ``totient(q) <= degree``: no ``Phi_q`` beyond it divides a
    nonzero polynomial of that degree. Uses ``totient(q) >= sqrt(q / 2)``.
    """
    return max([q for q in range(1, 2 * degree * degree + 3) if totient(q) <= degree], default=1)


@functools.lru_cache(maxsize=None)
def cyclotomic(q: int) -> tuple[int, ...]:
    """Coefficients of the ``q``-th cyclotomic polynomial.

    Uses ``Phi_q = prod((z**d - 1) ** mobius(q // d) for d | q)``: multiply the
    positive factors, then divide out the negative ones exactly.
    """
    if q < 1:
        raise ValueError("q must be positive")
    num, den = [1], [1]
    for d in _divisors(q):
        mu = _mobius(q // d)
        if mu == 0:
            continue
        factor = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = _poly_mul(num, factor)
        else:
            den = _poly_mul(den, factor)
    # den is monic up to sign; normalize so the division stays monic
    if den[-1] == -1:
        den = [-c for c in den]
        num = [-c for c in num]
    quot, rem = _poly_divmod(num, den)
    assert not rem
    return tuple(quot)


def _folded_mask(A: Iterable[int], q: int) -> list[int]:
    """Mask polynomial of ``A`` reduced modulo ``z**q - 1``."""
    coeffs = [0] * q
    for a in A:
        coeffs[a % q] += 1
    return coeffs


def cyclotomic_divides(A: Iterable[int], q: int) -> bool:
    """True iff ``Phi_q`` divides ``p_A`` (equivalently ``p_A`` vanishes at a primitive q-th root)."""
    if q == 1:
        return False
    folded = _trim(_folded_mask(A, q))
    if not folded:
        return True
    if len(folded) - 1 < totient(q):
        # a nonzero polynomial of lower degree than Phi_q cannot be a multiple of it
        return False
    _, rem = _poly_divmod(folded, cyclotomic(q))
    return not rem


def vanishing_sum(A: Iterable[int], r: RationalLike) -> bool:
    """Exact test of ``sum(exp(2*pi*i*a*r) for a in A) == 0``.

    ``exp(2*pi*i*p/q)`` is a primitive ``q``-th root of unity for ``p/q`` in
    lowest terms, and ``Phi_q`` is its minimal polynomial, so the answer only
    depends on the denominator.
    """
    A = integer_set(A)
    if dimension(A) != 1:
        raise ValueError("vanishing_sum expects a one-dimensional set")
    r = reduce_mod_one(as_rational(r))
    return cyclotomic_divides(A, r.denominator)


def rational_unit_roots(A: Iterable[int], denominator_bound: int) -> list[Fraction]:
    """All ``t`` in (0, 1) with denominator at most ``denominator_bound`` and ``p_A(e(t)) = 0``."""
    A = integer_set(A)
    roots = []
    for q in range(2, denominator_bound + 1):
        if cyclotomic_divides(A, q):
            roots.extend(Fraction(p, q) for p in range(1, q) if math.gcd(p, q) == 1)
    return sorted(roots)


def nonrational_unit_roots(A: Iterable[int], denominator_bound: int, atol: float = 1e-7) -> list[float]:
    """Unit-circle roots of ``p_A`` (as angles in [0, 1)) not explained by a root of unity.

    These are located numerically and reported as diagnostics only.
    """
    A = integer_set(A)
    shift = A[0]
    coeffs = np.zeros(A[-1] - shift + 1)
    for a in A:
        coeffs[a - shift] = 1.0
    if len(coeffs) < 2:
        return []
    roots = np.roots(coeffs[::-1])
    rational = [float(t) for t in rational_unit_roots(A, denominator_bound)]
    found = []
    for z in roots:
        if abs(abs(z) - 1.0) > atol:
            continue
        t = (cmath.phase(z) / TWO_PI) % 1.0
        if all(min(abs(t - s), 1 - abs(t - s)) > 1e-6 for s in rational):
            found.append(t)
    return sorted(found)


# ---------------------------------------------------------------------------
# Fourier transform of the uniform atomic measure


def _phases(A: Sequence, x):
    """``a . x mod 1`` for every node ``a``; exact when ``x`` is rational."""
    if isinstance(x, Fraction) or (
        isinstance(x, tuple) and x and all(isinstance(c, Fraction) for c in x)
    ):
        if dimension(A) == 1:
            return np.array([float(reduce_mod_one(a * x)) for a in A])
        return np.array(
            [float(reduce_mod_one(sum(ai * xi for ai, xi in zip(a, x)))) for a in A]
        )
    return None


def delta_hat(A: Sequence, x):
    """``(1/#A) * sum(exp(2*pi*i*a.x) for a in A)``.

    ``x`` may be a Fraction (exact phase reduction, so integer periodicity is
    bit-exact), a float, an array of floats (1-D sets), or an ``(..., d)``
    array for d-dimensional sets.
    """
    if len(A) == 0:
        raise ValueError("empty digit set")
    d = dimension(A) if isinstance(A[0], (tuple, list)) else 1
    exact = _phases(A, tuple(x) if isinstance(x, (list, tuple)) else x)
    if exact is not None:
        return complex(np.exp(2j * np.pi * exact).mean())
    nodes = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    if d == 1:
        phase = np.multiply.outer(x, nodes)
    else:
        if x.shape[-1] != d:
            raise ValueError(f"dimension mismatch: set is {d}-dimensional, point has shape {x.shape}")
        phase = x @ nodes.T
    value = np.exp(2j * np.pi * np.mod(phase, 1.0)).mean(axis=-1)
    return complex(value) if np.ndim(value) == 0 else value
