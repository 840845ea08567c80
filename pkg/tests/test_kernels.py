"""The compiled loop kernels and the vectorised numpy kernels must agree exactly."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from uavpp import kernels

objs = st.integers(1, 40).flatmap(
    lambda n: st.integers(1, 4).flatmap(
        lambda m: arrays(np.float64, (n, m), elements=st.sampled_from([0.0, 0.25, 0.5, 1.0, 2.0, 3.5]))
    )
)


@given(objs, st.data())
@settings(max_examples=150, deadline=None)
def test_nds_loop_equals_numpy(obj, data):
    viol = data.draw(arrays(np.float64, (obj.shape[0],), elements=st.sampled_from([0.0, 0.0, 0.3, 1.0])))
    assert np.array_equal(kernels.nds_ranks_loop(obj, viol), kernels.nds_ranks_numpy(obj, viol))


@given(objs, st.booleans())
@settings(max_examples=150, deadline=None)
def test_crowding_loop_equals_numpy(obj, scaled):
    scale = np.ptp(obj, axis=0) * 1.5 if scaled else np.zeros(obj.shape[1])
    a = kernels.crowding_loop(obj, scale)
    b = kernels.crowding_numpy(obj, scale)
    assert np.array_equal(np.isinf(a), np.isinf(b))
    assert np.allclose(a[np.isfinite(a)], b[np.isfinite(b)], rtol=1e-12, atol=1e-12)


@given(arrays(np.float64, st.tuples(st.integers(0, 40), st.just(2)), elements=st.floats(0, 1.3)))
@settings(max_examples=150, deadline=None)
def test_hv_loop_equals_numpy(pts):
    assert kernels.hv2d_loop(pts, 1.1, 1.1) == pytest.approx(kernels.hv2d_numpy(pts, 1.1, 1.1), rel=1e-12, abs=1e-15)


def test_backend_flag_disables_numba():
    code = "from uavpp import kernels; print(kernels.backend())"
    env = dict(os.environ, UAVPP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")
def test_backend_default_uses_numba():
    code = "from uavpp import kernels; print(kernels.backend())"
    env = {k: v for k, v in os.environ.items() if k != "UAVPP_DISABLE_NUMBA"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"


def test_nds_rejects_bad_shape():
    with pytest.raises(ValueError):
        kernels.nds_ranks(np.zeros(5))
