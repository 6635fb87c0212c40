import numpy as np
import pytest

from speechsev import kernels


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return kernels.BACKENDS[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
