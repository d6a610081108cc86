"""
Hot loops behind the Parseval scans.

Two kernels, each with a numba ``@njit`` body and a pure-numpy body:

``ifs_product``
    truncated infinite product ``prod_{n=1..N} delta_hat_B(x / A**n)`` for a batch
    of real ``x`` (one-dimensional IFS).
``grid_power_sum``
    ``sum |sum_c E0[i, c0] E1[j, c1] E2[k, c2]|**2`` over a 3-axis frequency grid,
    where the inner sum runs over the cells of a box-union region.

The numba path is used when numba imports and ``SPECTRAL_PAIRS_NUMBA`` is not
``0``/``false``/``no``. Set the variable before import; :func:`set_backend`
switches at runtime (tests and the benchmark use it).
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _env_enabled() -> bool:
    flag = os.environ.get("SPECTRAL_PAIRS_NUMBA", "1").strip().lower()
    return flag not in {"0", "false", "no", "off"}


USE_NUMBA = HAVE_NUMBA and _env_enabled()


def set_backend(name: str) -> None:
    """Select ``"numba"`` or ``"numpy"`` for subsequent kernel calls."""
    global USE_NUMBA
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not importable")
        USE_NUMBA = True
    elif name == "numpy":
        USE_NUMBA = False
    else:
        raise ValueError(f"unknown backend {name!r}")


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# infinite product for 1-D IFS measures


def _ifs_product_numpy(xs, scale, digits, nfactors):
    out = np.ones(xs.shape, dtype=np.complex128)
    y = xs.astype(np.float64).copy()
    inv = 1.0 / len(digits)
    for _ in range(nfactors):
        y = y / scale
        phase = np.mod(np.multiply.outer(y, digits), 1.0)
        out *= np.exp(2j * np.pi * phase).sum(axis=-1) * inv
    return out


def _ifs_product_loops(xs, scale, digits, nfactors):
    n = xs.shape[0]
    out = np.empty(n, dtype=np.complex128)
    inv = 1.0 / digits.shape[0]
    two_pi = 2.0 * np.pi
    for i in range(n):
        y = xs[i]
        acc_re = 1.0
        acc_im = 0.0
        for _ in range(nfactors):
            y = y / scale
            s_re = 0.0
            s_im = 0.0
            for b in digits:
                t = b * y
                t = t - np.floor(t)
                s_re += np.cos(two_pi * t)
                s_im += np.sin(two_pi * t)
            s_re *= inv
            s_im *= inv
            re = acc_re * s_re - acc_im * s_im
            acc_im = acc_re * s_im + acc_im * s_re
            acc_re = re
        out[i] = complex(acc_re, acc_im)
    return out


# ---------------------------------------------------------------------------
# separable region transform summed over a frequency grid


def _grid_power_sum_numpy(E0, E1, E2, T):
    S = np.einsum("kc,abc->abk", E2, T)
    S = np.einsum("jb,abk->ajk", E1, S)
    S = np.einsum("ia,ajk->ijk", E0, S, optimize=True)
    return float((S.real**2 + S.imag**2).sum())


def _grid_power_sum_loops(E0, E1, E2, T):
    n0, u0 = E0.shape
    n1, u1 = E1.shape
    n2, u2 = E2.shape
    # contract the last axis first: Z[a, b, k] = sum_c T[a, b, c] E2[k, c]
    Z = np.zeros((u0, u1, n2), dtype=np.complex128)
    for a in range(u0):
        for b in range(u1):
            for c in range(u2):
                if T[a, b, c] != 0.0:
                    w = T[a, b, c]
                    for k in range(n2):
                        Z[a, b, k] += w * E2[k, c]
    total = 0.0
    Y = np.zeros((u0, n2), dtype=np.complex128)
    for j in range(n1):
        for a in range(u0):
            for k in range(n2):
                acc = 0.0 + 0.0j
                for b in range(u1):
                    acc += E1[j, b] * Z[a, b, k]
                Y[a, k] = acc
        for i in range(n0):
            for k in range(n2):
                acc = 0.0 + 0.0j
                for a in range(u0):
                    acc += E0[i, a] * Y[a, k]
                total += acc.real * acc.real + acc.imag * acc.imag
    return total


if HAVE_NUMBA:
    _ifs_product_jit = numba.njit(cache=True, fastmath=False, nogil=True)(_ifs_product_loops)
    _grid_power_sum_jit = numba.njit(cache=True, fastmath=False, nogil=True)(_grid_power_sum_loops)


def ifs_product(xs, scale: float, digits, nfactors: int) -> np.ndarray:
    xs = np.ascontiguousarray(np.asarray(xs, dtype=np.float64).ravel())
    digits = np.ascontiguousarray(np.asarray(digits, dtype=np.float64))
    if USE_NUMBA:
        return _ifs_product_jit(xs, float(scale), digits, int(nfactors))
    return _ifs_product_numpy(xs, float(scale), digits, int(nfactors))


def grid_power_sum(E0, E1, E2, T) -> float:
    args = [np.ascontiguousarray(E, dtype=np.complex128) for E in (E0, E1, E2)]
    T = np.ascontiguousarray(T, dtype=np.float64)
    if USE_NUMBA:
        return float(_grid_power_sum_jit(*args, T))
    return _grid_power_sum_numpy(*args, T)
