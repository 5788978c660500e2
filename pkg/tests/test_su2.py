import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bangbang import su2
from bangbang.params import ProblemParams

SQ2 = math.sqrt(2.0)

unit_vectors = st.tuples(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
).filter(lambda v: 1e-3 < math.sqrt(sum(c * c for c in v)))
angles = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)
rotations = st.builds(su2.Rotation, unit_vectors, angles)


def _unit(v):
    n = math.sqrt(sum(c * c for c in v))
    return su2.BlochVector(*(c / n for c in v))


def test_amplitudes_to_bloch_examples():
    assert su2.amplitudes_to_bloch(su2.Amplitudes(1, 0)) == pytest.approx((0, 0, 1))
    assert su2.amplitudes_to_bloch(su2.Amplitudes(1 / SQ2, 1 / SQ2)) == pytest.approx((1, 0, 0))
    assert su2.amplitudes_to_bloch(su2.Amplitudes(1 / SQ2, 1j / SQ2)) == pytest.approx((0, 1, 0))


def test_amplitudes_to_bloch_rejects_unnormalised():
    with pytest.raises(ValueError):
        su2.amplitudes_to_bloch(su2.Amplitudes(1.0, 1e-4))


def test_off_pi_is_half_turn_about_z():
    params = ProblemParams(detuning=2.0, omega_max=1.0)
    rot = su2.segment_rotation(su2.FieldSegment.off(math.pi / 2.0), params)
    assert rot.axis == pytest.approx((0, 0, 1))
    assert rot.angle == pytest.approx(math.pi)


def test_on_pulse_r1_half_turn():
    params = ProblemParams.from_ratio(1.0)
    seg = su2.FieldSegment.on(math.pi / SQ2, params)
    rot = su2.segment_rotation(seg, params)
    assert rot.angle == pytest.approx(math.pi, abs=1e-14)
    assert rot.axis == pytest.approx((1 / SQ2, 0, 1 / SQ2), abs=1e-15)
    assert su2.apply(rot, su2.NORTH_POLE) == pytest.approx((1, 0, 0), abs=1e-15)


def test_apply_examples():
    assert su2.apply(su2.Rotation.identity(), (0.6, 0, 0.8)) == pytest.approx((0.6, 0, 0.8))
    assert su2.apply(su2.Rotation((0, 0, 1), math.pi), su2.NORTH_POLE) == pytest.approx((0, 0, 1))
    rot = su2.Rotation((1, 0, 1), math.pi)
    assert su2.apply(rot, su2.NORTH_POLE) == pytest.approx((1, 0, 0), abs=1e-15)


def test_compose_examples():
    rz = su2.Rotation((0, 0, 1), math.pi)
    full = su2.compose(rz, rz)
    assert full.angle == pytest.approx(0.0, abs=1e-15)
    r = su2.Rotation((0.3, -0.2, 0.9), 1.1)
    assert su2.compose(su2.Rotation.identity(), r).same_action(r)


def test_compose_on_off_matches_pair_rotation():
    from bangbang.synthesis import pair_rotation

    r = 0.4
    params = ProblemParams.from_ratio(r)
    t_on = 3.3406983015584424
    on = su2.segment_rotation(su2.FieldSegment.on(t_on / params.on_frequency, params), params)
    off = su2.segment_rotation(su2.FieldSegment.off(math.pi), params)
    pair = su2.compose(on, off)
    alpha, nu = pair_rotation(t_on, r)
    assert pair.angle == pytest.approx(alpha, abs=1e-12)
    assert pair.axis == pytest.approx(nu, abs=1e-12)


def test_negative_angle_flips_axis():
    rot = su2.Rotation((0, 0, 2), -1.0)
    assert rot.axis == pytest.approx((0, 0, -1))
    assert rot.angle == pytest.approx(1.0)
    assert 0.0 <= su2.Rotation((1, 0, 0), 7.0).angle < 2 * math.pi


def test_zero_segments_dropped():
    params = ProblemParams.from_ratio(0.5)
    seq = su2.build_sequence([su2.FieldSegment.on(0.0, params), su2.FieldSegment.off(1.0)])
    assert len(seq) == 1 and seq[0].level is su2.Level.OFF


def test_segment_validation():
    with pytest.raises(ValueError):
        su2.FieldSegment(su2.Level.OFF, 1.0, 0.5)
    with pytest.raises(ValueError):
        su2.FieldSegment(su2.Level.ON, -1.0, 0.5)


@given(rotations, unit_vectors)
def test_apply_preserves_norm(rot, v):
    out = su2.apply(rot, _unit(v))
    assert abs(out.norm() - 1.0) <= 1e-12


@given(rotations)
def test_axis_is_unit(rot):
    assert abs(math.sqrt(sum(c * c for c in rot.axis)) - 1.0) <= 1e-12
    assert 0.0 <= rot.angle < 2 * math.pi


@settings(max_examples=50)
@given(rotations, rotations, rotations)
def test_composition_associative(a, b, c):
    left = su2.compose(a, su2.compose(b, c))
    right = su2.compose(su2.compose(a, b), c)
    rng = np.random.default_rng(0)
    for v in rng.normal(size=(100, 3)):
        v = _unit(v)
        assert np.allclose(su2.apply(left, v), su2.apply(right, v), atol=1e-10)


@given(rotations, unit_vectors)
def test_compose_matches_sequential_application(a, v):
    b = su2.Rotation((0.2, 0.5, -0.1), 2.3)
    v = _unit(v)
    assert np.allclose(su2.apply(su2.compose(b, a), v), su2.apply(b, su2.apply(a, v)), atol=1e-12)


@given(rotations)
def test_inverse(rot):
    assert su2.compose(rot.inverse(), rot).same_action(su2.Rotation.identity(), atol=1e-12)


@given(st.floats(0.05, 20), st.floats(0, 10), st.booleans())
def test_segment_axis_fixed(r, duration, on):
    params = ProblemParams.from_ratio(r)
    seg = su2.FieldSegment.on(duration, params) if on else su2.FieldSegment.off(duration)
    axis = su2.segment_axis(seg, params)
    assert np.allclose(su2.apply(su2.segment_rotation(seg, params), axis), axis, atol=1e-12)


@settings(max_examples=100)
@given(st.floats(0.05, 20), st.floats(0, 10), st.booleans(), st.floats(0, 2 * math.pi), st.floats(0, math.pi))
def test_amplitude_propagation_consistent(r, duration, on, phase, theta):
    params = ProblemParams.from_ratio(r)
    seg = su2.FieldSegment.on(duration, params) if on else su2.FieldSegment.off(duration)
    c = np.array([math.cos(theta / 2), math.sin(theta / 2) * complex(math.cos(phase), math.sin(phase))])
    out = su2.segment_propagator(seg, params) @ c
    lhs = su2.amplitudes_to_bloch(su2.Amplitudes(*out))
    rhs = su2.apply(su2.segment_rotation(seg, params), su2.amplitudes_to_bloch(su2.Amplitudes(*c)))
    assert np.allclose(lhs, rhs, atol=1e-10)


@given(rotations)
def test_su2_matrix_matches_bloch_action(rot):
    u = rot.su2()
    c = np.array([1.0, 0.0], dtype=complex)
    lhs = su2.amplitudes_to_bloch(su2.Amplitudes(*(u @ c)))
    assert np.allclose(lhs, su2.apply(rot, su2.NORTH_POLE), atol=1e-12)


def test_rotate_many_matches_apply():
    rot_axis = (0.6, 0.0, 0.8)
    ang = np.linspace(0, 5, 7)
    out = su2.rotate_many(rot_axis, ang, (0, 0, 1))
    for a, row in zip(ang, out):
        assert np.allclose(row, su2.apply(su2.Rotation(rot_axis, a), (0, 0, 1)), atol=1e-14)


def test_canonical_angle_range():
    rot = su2.Rotation((0, 1, 0), 1.5 * math.pi).canonical()
    assert rot.angle == pytest.approx(0.5 * math.pi)
    assert rot.axis == pytest.approx((0, -1, 0))
