import pytest

from spectral_pairs import _kernels


@pytest.fixture(params=["numpy", "numba"])
def kernel_backend(request):
    if request.param == "numba" and not _kernels.HAVE_NUMBA:
        pytest.skip("numba not importable")
    previous = _kernels.backend()
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(previous)
