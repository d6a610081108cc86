import numpy as np
import pytest

from spectral_pairs import _kernels
from spectral_pairs.ifs_measures import AffineIFS, cycle_spectrum
from spectral_pairs.multidim import derive_product_spectrum, staircase
from spectral_pairs.validation import parseval_scan


def test_backend_switch():
    prev = _kernels.backend()
    _kernels.set_backend("numpy")
    assert _kernels.backend() == "numpy"
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")
    _kernels.set_backend(prev)


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")
def test_ifs_product_parity():
    xs = np.random.default_rng(1).uniform(-1000, 1000, 5000)
    digits = np.array([0.0, 1.0, 8.0, 9.0])
    _kernels.set_backend("numpy")
    ref = _kernels.ifs_product(xs, 4.0, digits, 30)
    _kernels.set_backend("numba")
    out = _kernels.ifs_product(xs, 4.0, digits, 30)
    assert np.allclose(out, ref, rtol=0, atol=1e-13)


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")
def test_grid_power_sum_parity():
    rng = np.random.default_rng(2)
    E = [np.exp(2j * np.pi * rng.uniform(size=(15, k))) for k in (3, 2, 4)]
    T = rng.integers(0, 2, size=(3, 2, 4)).astype(float)
    _kernels.set_backend("numpy")
    ref = _kernels.grid_power_sum(*E, T)
    _kernels.set_backend("numba")
    out = _kernels.grid_power_sum(*E, T)
    assert abs(out - ref) <= 1e-12 * abs(ref)


def test_parseval_backend_independent(kernel_backend):
    ifs = AffineIFS(4, (0, 2))
    rep = parseval_scan(ifs, cycle_spectrum(ifs, [0, 1]), radius=4**5)
    assert 0.98 < rep.min_sum and rep.max_sum <= 1 + 1e-9


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")
def test_scans_identical_across_backends():
    ifs = AffineIFS(4, (0, 2))
    spec = cycle_spectrum(ifs, [0, 1])
    region = staircase()
    out = {}
    for name in ("numpy", "numba"):
        _kernels.set_backend(name)
        out[name] = (
            parseval_scan(ifs, spec, radius=4**5).partial_sums,
            parseval_scan(region, derive_product_spectrum(region), radius=10).partial_sums,
        )
    _kernels.set_backend("numba")
    for a, b in zip(out["numpy"], out["numba"]):
        assert np.allclose(a, b, rtol=1e-12, atol=0)
