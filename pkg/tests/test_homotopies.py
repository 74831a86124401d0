"""Deformations: contraction along the rope, the W_L retraction, tightening."""

import math

import numpy as np
import pytest

from ropelab.errors import NotInSpaceError
from ropelab.fixtures import bump, tall_bump, tight, trefoil_rope, wl_corpus
from ropelab.geometry import (
    hausdorff_distance,
    measures,
    min_self_distance,
    tight_rope,
)
from ropelab.homotopies import (
    T_MIN,
    delta_contract,
    delta_rotation_residual,
    phi_conditions,
    squeeze_fraction,
    squeeze_margin,
    tighten,
    wl_stage1,
    wl_stage2,
    wl_stage3,
)


def _gap_to_straight(rope):
    n = rope.samples.shape[0] - 1
    return hausdorff_distance(rope.samples, tight_rope(n).samples)


def test_delta_identity_at_one():
    r = trefoil_rope()
    out = delta_contract(r, 1.0)
    assert np.max(np.abs(out.samples - r.samples)) <= 1e-9


def test_delta_pins_below_tmin():
    r = bump()
    assert _gap_to_straight(delta_contract(r, 0.0)) == 0.0
    assert _gap_to_straight(delta_contract(r, T_MIN / 2.0)) == 0.0


def test_delta_fixes_tight_rope():
    r = tight(64)
    for T in (0.1, 0.5, 0.9):
        assert _gap_to_straight(delta_contract(r, T)) <= 1e-9


def test_delta_keeps_embeddedness_on_trefoil():
    r = trefoil_rope()
    for T in np.linspace(0.05, 1.0, 12):
        out = delta_contract(r, float(T))
        assert min_self_distance(out) > 0.0
        assert np.allclose(out.samples[0], [0, 0, 0])
        assert np.allclose(out.samples[-1], [1, 0, 0])


def test_delta_rotation_residual_is_an_angle():
    r = bump()
    rho = delta_rotation_residual(r, 0.5)
    assert 0.0 <= rho < math.pi


def test_wl_stage1_cone_and_length():
    for r in wl_corpus():
        l0 = measures(r)["l"]
        out = wl_stage1(r, 1.0)
        p = out.samples[1:]
        angles = np.arctan2(np.hypot(p[:, 1], p[:, 2]), p[:, 0])
        assert float(angles.max()) < math.pi / 6.0 + 1e-9
        assert measures(out)["l"] <= l0 + 1e-9


def test_wl_stage2_squeezes_within_headroom():
    for r in wl_corpus():
        s1 = wl_stage1(r, 1.0)
        delta2 = 1.0 + 2.0 - measures(s1)["l"]
        out = wl_stage2(s1, 1.0, eps=2.0)
        assert measures(out)["l"] - measures(s1)["l"] <= delta2
        assert squeeze_margin(s1) > 0.0


def test_wl_stage3_endpoints_of_time():
    r = wl_stage2(wl_stage1(bump(), 1.0), 1.0)
    same = wl_stage3(r, 1.0)
    assert np.max(np.abs(same.samples - r.samples)) == 0.0
    assert _gap_to_straight(wl_stage3(r, 0.0)) <= 1e-9


def test_tighten_shortens_below_target():
    r = trefoil_rope()
    out = tighten(r, 1.0, 2.0, 1.0)
    assert measures(out)["l"] < 2.0
    assert min_self_distance(out) > 0.0


def test_tighten_rejects_long_input():
    with pytest.raises(NotInSpaceError):
        tighten(tall_bump(amplitude=1.6), 1.0, 2.0, 0.5)
    with pytest.raises(ValueError):
        tighten(bump(), 2.0, 1.0, 0.5)


def test_squeeze_fraction_meets_transverse_budget():
    r = trefoil_rope()
    f = squeeze_fraction(r, 1.0)
    assert 0.0 <= f <= 1.0
    h = tighten(r, 1.0, 2.0, 0.5)
    assert measures(h)["l_yz"] <= 0.5 + 1e-9


def test_phi_conditions_on_squeezed_trefoil():
    h = tighten(trefoil_rope(), 1.0, 2.0, 0.5)
    rep = phi_conditions(h, 1.0)
    assert abs(rep["phi_0"]) <= 1e-9
    assert abs(rep["phi_1"] - 1.0) <= 1e-9
    assert rep["c_margin"] >= -1e-9
