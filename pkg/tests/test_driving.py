import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lindbladium.driving import (
    AMP_KEYS, ORTHO_CASES, THETA_CASES, DrivingCase, DrivingConfig, Orientation,
    build_lindblad_set, invert_baths,
)
from lindbladium.errors import SpecificationError
from lindbladium.pauli import OperatorSum, pauli, to_dense

from conftest import driving


def test_x_xy_right_plus_at_theta_zero():
    ls = build_lindblad_set(DrivingConfig("X_XY_THETA", gamma=1, f=0, theta=0), 3)
    kr = ls.by_label("K+R")
    assert kr.site == 3 and kr.amplitude == pytest.approx(1.0)
    assert kr.op == (pauli(3, {3: "X"}) + pauli(3, {3: "Z"}, 1j)) / 2


@pytest.mark.parametrize("case", THETA_CASES)
def test_zero_bias_equal_amplitudes(case):
    ls = build_lindblad_set(DrivingConfig(case, gamma=0.7, f=0.0, theta=0.3), 4)
    assert {round(o.amplitude, 15) for o in ls} == {round(math.sqrt(0.7), 15)}


def test_xy_ortho_single_amplitude():
    ls = build_lindblad_set(DrivingConfig("XY_ORTHO", amp_l_plus=1.0), 4)
    live = [o for o in ls if o.op]
    assert [(o.label, o.site, o.amplitude) for o in live] == [("L1", 1, 1.0), ("L4", 4, 1.0)]
    assert live[0].op == pauli(4, {1: "X"}) + pauli(4, {1: "Y"}, 1j)
    assert live[1].op == pauli(4, {4: "X"}) - pauli(4, {4: "Y"}, 1j)


def test_invert_is_involution():
    cfg = driving("Y_YZ_THETA")
    assert invert_baths(cfg).orientation is Orientation.INVERTED
    assert invert_baths(invert_baths(cfg)) == cfg


def test_inversion_moves_sets():
    cfg = DrivingConfig("X_XY_THETA", f=0.3, theta=0.4)
    normal = build_lindblad_set(cfg, 4)
    inverted = build_lindblad_set(invert_baths(cfg), 4)
    for o in normal:
        twin = inverted.by_label(o.label)
        assert twin.site == (4 if o.site == 1 else 1)
        assert twin.structure == o.structure and twin.amplitude == o.amplitude
    assert inverted.by_label("K+L").op == (pauli(4, {4: "Y"}) + pauli(4, {4: "Z"}, 1j)) * (
        math.sqrt(1.3) / 2)


@pytest.mark.parametrize("case", list(DrivingCase))
def test_boundary_support(case):
    n = 4
    for orient in Orientation:
        ls = build_lindblad_set(driving(case, orientation=orient), n)
        for o in ls:
            assert o.op.support() <= {1} or o.op.support() <= {n}


@pytest.mark.parametrize("case", THETA_CASES)
@given(f=st.floats(-1, 1), gamma=st.floats(0.1, 3), theta=st.floats(0, math.pi / 2))
def test_theta_ldagl_spectrum(case, f, gamma, theta):
    ls = build_lindblad_set(DrivingConfig(case, gamma=gamma, f=f, theta=theta), 2)
    for o in ls:
        local = OperatorSum(1, {s[o.site - 1]: c for s, c in o.op})
        eig = np.sort(np.linalg.eigvalsh(to_dense(local.adjoint() * local)))
        np.testing.assert_allclose(eig, [0, o.amplitude**2], atol=1e-12)
        assert o.amplitude**2 == pytest.approx(gamma * (1 + f)) or o.amplitude**2 == pytest.approx(
            gamma * (1 - f))


@pytest.mark.parametrize("case", ORTHO_CASES)
@given(amps=st.lists(st.floats(0, 2), min_size=6, max_size=6))
def test_inversion_preserves_amplitudes(case, amps):
    cfg = DrivingConfig(case, **dict(zip(AMP_KEYS, amps)))
    a = sorted(o.amplitude for o in build_lindblad_set(cfg, 3))
    b = sorted(o.amplitude for o in build_lindblad_set(invert_baths(cfg), 3))
    assert a == b


@pytest.mark.parametrize("kwargs", [
    dict(case="X_XY_THETA", gamma=0.0),
    dict(case="X_XY_THETA", f=1.5),
    dict(case="Z_XZ_THETA", theta=2.0),
    dict(case="XY_ORTHO", amp_v_plus=-1.0),
    dict(case="NOPE"),
    dict(case="XY_ORTHO", orientation="SIDEWAYS"),
])
def test_invalid_configs(kwargs):
    with pytest.raises(SpecificationError):
        DrivingConfig(**kwargs)


def test_single_site_chain_rejected():
    with pytest.raises(SpecificationError):
        build_lindblad_set(driving("X_XY_THETA"), 1)
