"""Compiled and pure-Python kernels agree to rounding."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perchkit import kernels
from perchkit.aero import packed
from perchkit.params import AeroCoeffs, PlatformParams

try:
    CK = kernels.get_backend("cython")
except ImportError:  # pragma: no cover - extension not built
    CK = None
PK = kernels.get_backend("python")
P = packed(PlatformParams(), AeroCoeffs())

pytestmark = pytest.mark.skipif(CK is None, reason="compiled kernels not built")


@settings(max_examples=100, deadline=None)
@given(st.floats(1.0, 9.0), st.floats(-0.2, 0.7), st.floats(-0.5, 0.5), st.floats(0.1, 1.9),
       st.floats(-0.8, 0.8), st.floats(-1, 1), st.sampled_from([0, 1]), st.sampled_from([0, 1]))
def test_loads_parity(V, a, dat, k, de, s, avg, model):
    o1, o2 = np.empty(kernels.N_LOADS), np.empty(kernels.N_LOADS)
    PK.loads(P, V, a, a + dat, k, de, s, avg, model, o1)
    CK.loads(P, V, a, a + dat, k, de, s, avg, model, o2)
    np.testing.assert_allclose(o1, o2, rtol=1e-13, atol=1e-12)


def test_euler_parity():
    n = 400
    f = np.full(n, 5.2)
    de = np.linspace(-0.3, -0.1, n)
    y0 = np.array([0.0, 0.0, 0.0, 6.0, -0.2, 0.0])
    o1, o2 = np.empty((n + 1, 6)), np.empty((n + 1, 6))
    for model in (0, 1):
        ph1 = PK.euler(P, y0, f, de, 5e-4, 0.0, 1.0, 0, model, 0.1, o1)
        ph2 = CK.euler(P, y0, f, de, 5e-4, 0.0, 1.0, 0, model, 0.1, o2)
        np.testing.assert_allclose(o1, o2, rtol=1e-12, atol=1e-12)
        assert ph1 == pytest.approx(ph2)


def test_trim_parity():
    for V, g, gd in ((6.0, -0.2, 0.0), (4.0, 0.0, 0.5), (3.5, 0.3, 1.0)):
        a1 = PK.trim_alpha(P, V, g, gd, 0.8, -0.2, math.radians(36), 1e-10)
        a2 = CK.trim_alpha(P, V, g, gd, 0.8, -0.2, math.radians(36), 1e-10)
        assert a1 == pytest.approx(a2, abs=1e-12)
        assert abs(PK.eta(P, a1, V, g, gd, 0.8)) < 1e-7


def test_errors_match():
    from perchkit.errors import EnvelopeError, ModelRangeError

    for mod in (PK, CK):
        with pytest.raises(EnvelopeError):
            mod.stall(P, 1.6)
        with pytest.raises(ModelRangeError):
            mod.loads(P, 5.0, 0.1, 0.1, 2.5, 0.0, 0.0, 1, 0, np.empty(kernels.N_LOADS))


def test_environment_forces_fallback():
    import subprocess
    import sys

    code = "import perchkit.kernels as k; print(k.BACKEND)"
    env = {"PERCHKIT_PURE_PYTHON": "1", "PATH": ""}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    out = subprocess.run([sys.executable, "-c", code], env={"PATH": ""}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "cython"
