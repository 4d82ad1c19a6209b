import numpy as np
import pytest

from sskdyn._backend import compiled, fallback

BACKENDS = [pytest.param(fallback, id="numpy")]
if compiled is not None:
    BACKENDS.append(pytest.param(compiled, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def goe_small():
    from sskdyn.ensembles import WignerSpec, sample_wigner

    return sample_wigner(WignerSpec(N=8, seed=3))


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)
