import numpy as np
import pytest

from tophrv.rips import vr_pd


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    # touch the compiled kernels once so timed tests measure steady-state cost
    rng = np.random.default_rng(0)
    vr_pd(rng.standard_normal((12, 3)), max_dim=1)
    yield
