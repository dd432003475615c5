import math

import numpy as np
import pytest

from perchkit import ArgumentError
from perchkit.params import PACK_SIZE, AeroCoeffs, PlatformParams, layout, pack, preset


def test_table_defaults():
    p = PlatformParams()
    assert (p.x_a, p.x_t, p.c, p.S, p.S_t, p.b, p.I_y, p.m, p.g, p.rho) == (
        0.05, 0.3, 0.36, 0.42, 0.12, 1.17, 0.044, 0.64, 9.81, 1.22)
    c = AeroCoeffs()
    assert c.theta_Lt == (0.94, 2.92)
    assert c.theta_S == (1.35, -0.3)
    assert c.theta_Dw_red == (2.17, 7.09, -1.92)


@pytest.mark.parametrize("field", ["m", "I_y", "S", "rho", "c"])
def test_non_positive_rejected(field):
    with pytest.raises(ArgumentError):
        PlatformParams(**{field: 0.0})


def test_geometry_ordering_rejected():
    with pytest.raises(ArgumentError):
        PlatformParams(S_t=0.5)
    with pytest.raises(ArgumentError):
        PlatformParams(x_t=0.01)


def test_coefficient_lengths_checked():
    with pytest.raises(ArgumentError):
        AeroCoeffs(theta_Lt=(1.0,))
    with pytest.raises(ArgumentError):
        AeroCoeffs(theta_Dw_red=(2.17, 7.09, 1.0))
    with pytest.raises(ArgumentError):
        AeroCoeffs(theta_Lw=(float("nan"),) * 7)


def test_pressure_factors():
    p = PlatformParams()
    assert p.dynamic_pressure(6.0) == pytest.approx(0.5 * 1.22 * 36 * 0.42)
    assert p.tail_dynamic_pressure(6.0) == pytest.approx(0.5 * 1.22 * 36 * 0.12)
    assert p.beta2w == pytest.approx(1.22 * 0.42 / 0.088)


def test_pack_layout_roundtrip():
    p, c = preset("eflap")
    arr = pack(p, c)
    assert arr.size == PACK_SIZE
    off = layout()
    assert arr[off["m"]] == p.m
    np.testing.assert_array_equal(arr[off["theta_Lw_red"]:off["theta_Lw_red"] + 5], c.theta_Lw_red)
    assert arr[off["body_drag"]] == c.body_drag


def test_unknown_preset():
    with pytest.raises(ArgumentError):
        preset("nope")


def test_zeros_keeps_stall_shape():
    z = AeroCoeffs.zeros()
    assert z.theta_S == AeroCoeffs().theta_S
    assert all(v == 0.0 for v in z.theta_Lw)
