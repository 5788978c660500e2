import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bangbang import su2
from bangbang.errors import DomainError, NoRootError
from bangbang.params import ProblemParams
from bangbang.synthesis import (
    RegimeKind,
    TERMINAL_TOL,
    Variant,
    classify,
    complementary_branches,
    complementary_durations,
    complementary_total,
    g_function,
    optimal_duration,
    r_max,
    r_min,
    single_on_duration,
    symmetric_condition,
    symmetric_durations,
    symmetric_roots,
    symmetric_rotation,
    symmetric_single_off_closed_form,
    synthesize,
)

# Reference values from a 30-digit mpmath oracle that propagates the 2x2
# Schrodinger equation and root-solves the terminal condition directly.
ORACLE = {
    "single_on_1.1": 1.71098530448074451,
    "single_on_10": 0.157295130115526062,
    "single_on_2": 0.815483518518008369,
    "comp_0.85": (0.923352685601129470, 3.90497745606855763, 6.11694851233273917),
    "comp_0.4": (0.769797695812595675, 3.34069830155844485, 12.4867063157335685),
    "comp_0.26": (1.24541002910014807, 3.26682461283200823, 18.9098971188554807),
    "comp_rmin1_total": 6.56172553402143083,
    "sym_0.55": (2.31116134709901908, 3.68865210399497054, 7.19174533328321445),
    "sym_0.35": (1.91077408251127807, 3.38125277402238965, 13.0816091627381557),
    "sym_0.2": (2.93189787876957930, 3.15892318220782509, 21.3698608237408005),
}


def _final_z(report):
    return su2.apply(su2.sequence_rotation(report.sequence, report.params), su2.NORTH_POLE).z


def test_r_max_values():
    assert r_max(1) == pytest.approx(1.0, abs=1e-15)
    assert r_max(2) == pytest.approx(0.4142135624, abs=1e-10)
    assert r_max(3) == pytest.approx(0.2679491924, abs=1e-10)


def test_r_min_values():
    assert r_min(1) == pytest.approx(0.7071067812, abs=1e-10)
    assert r_min(2) == pytest.approx(0.3826834324, abs=1e-10)
    assert r_min(3) == pytest.approx(0.2588190451, abs=1e-10)


@pytest.mark.parametrize("fn", [r_max, r_min])
def test_bounds_reject_small_n(fn):
    with pytest.raises(ValueError):
        fn(0)


@pytest.mark.parametrize(
    "r, kind, n",
    [
        (0.85, RegimeKind.COMPLEMENTARY, 1),
        (0.55, RegimeKind.SYMMETRIC, 1),
        (0.4, RegimeKind.COMPLEMENTARY, 2),
        (0.35, RegimeKind.SYMMETRIC, 2),
        (0.26, RegimeKind.COMPLEMENTARY, 3),
        (0.2, RegimeKind.SYMMETRIC, 3),
        (1.1, RegimeKind.SINGLE_ON, 0),
        (1.0, RegimeKind.SINGLE_ON, 0),
    ],
)
def test_classify_figure_captions(r, kind, n):
    reg = classify(r)
    assert reg.kind is kind and reg.n_off == n


def test_classify_tie_at_r_min_is_complementary():
    for n in range(1, 8):
        assert classify(r_min(n)).kind is RegimeKind.COMPLEMENTARY


def test_classify_errors():
    with pytest.raises(ValueError):
        classify(0.0)
    with pytest.raises(ValueError):
        classify(0.01)
    assert classify(0.01, r_floor=0.005).n_off >= 1


@given(st.floats(0.02, 0.999999))
def test_regime_partition(r):
    reg = classify(r)
    n = reg.n_off
    assert r_max(n + 1) <= r < r_max(n)
    assert reg.kind is (RegimeKind.COMPLEMENTARY if r >= r_min(n) else RegimeKind.SYMMETRIC)


def test_single_on_examples():
    assert single_on_duration(1.0) == pytest.approx(math.pi / math.sqrt(2), abs=1e-14)
    assert single_on_duration(1.1) == pytest.approx(ORACLE["single_on_1.1"], abs=1e-14)
    assert single_on_duration(10.0) == pytest.approx(ORACLE["single_on_10"], abs=1e-14)
    big = 1e6
    assert single_on_duration(big) * big == pytest.approx(math.pi / 2, rel=1e-6)
    with pytest.raises(DomainError):
        single_on_duration(0.9)


def test_single_on_reaches_equator_exactly():
    report = synthesize(ProblemParams.from_ratio(2.0))
    assert report.total_duration == pytest.approx(ORACLE["single_on_2"], abs=1e-14)
    assert abs(_final_z(report)) <= 1e-12


@pytest.mark.parametrize("key, r, n", [("comp_0.85", 0.85, 1), ("comp_0.4", 0.4, 2), ("comp_0.26", 0.26, 3)])
def test_complementary_against_oracle(key, r, n):
    s, t_on, total = ORACLE[key]
    d = complementary_durations(r, n)
    assert d.s == pytest.approx(s, abs=1e-10)
    assert d.t_on == pytest.approx(t_on, abs=1e-12)
    assert d.total == pytest.approx(total, abs=1e-12)
    assert d.s + d.f == pytest.approx(d.t_on, abs=1e-10)


def test_complementary_at_r_min():
    d = complementary_durations(r_min(1), 1)
    assert d.t_on == pytest.approx(4 * math.pi / 3, abs=1e-12)
    assert d.s == pytest.approx(2 * math.pi / 3, abs=1e-6)
    assert d.total == pytest.approx(math.pi + (4 * math.pi / 3) / math.sqrt(1.5), abs=1e-12)
    assert d.total == pytest.approx(ORACLE["comp_rmin1_total"], abs=1e-12)


def test_complementary_near_r_max_degenerates():
    d = complementary_durations(1.0 - 1e-10, 1)
    short, long_ = complementary_branches(1.0 - 1e-10, 1)
    assert d.t_on == pytest.approx(math.pi, abs=1e-4)
    assert short == pytest.approx(0.0, abs=1e-4)
    assert long_ == pytest.approx(math.pi, abs=1e-4)


def test_complementary_domain_errors():
    with pytest.raises(DomainError):
        complementary_durations(0.5, 1)
    with pytest.raises(DomainError):
        complementary_durations(1.0, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_complementary_branches_sum_to_t_on(n):
    for r in np.linspace(r_min(n), r_max(n), 12, endpoint=False):
        short, long_ = complementary_branches(r, n)
        d = complementary_durations(r, n)
        assert short + long_ == pytest.approx(d.t_on, abs=1e-10)
        assert short <= d.t_on / 2 + 1e-12


def test_long_first_variant_swaps():
    short = synthesize(ProblemParams.from_ratio(0.85))
    long_ = synthesize(ProblemParams.from_ratio(0.85), variant=Variant.LONG_FIRST)
    assert long_.durations.s == pytest.approx(short.durations.f, abs=1e-14)
    assert long_.durations.f == pytest.approx(short.durations.s, abs=1e-14)
    assert long_.total_duration == pytest.approx(short.total_duration, abs=1e-13)
    assert abs(_final_z(long_)) <= TERMINAL_TOL


@pytest.mark.parametrize("key, r, n", [("sym_0.55", 0.55, 1), ("sym_0.35", 0.35, 2), ("sym_0.2", 0.2, 3)])
def test_symmetric_against_oracle(key, r, n):
    s, t_on, total = ORACLE[key]
    d = symmetric_durations(r, n)
    assert d.s == pytest.approx(s, abs=1e-10)
    assert d.f == d.s
    assert d.t_on == pytest.approx(t_on, abs=1e-10)
    assert d.total == pytest.approx(total, abs=1e-10)
    assert abs(symmetric_condition(d.s, r, n) ** 2 - 2.0) <= 1e-12


def test_symmetric_n1_closed_form_example():
    s, total = symmetric_single_off_closed_form(0.55)
    assert s == pytest.approx(math.pi - math.acos((0.55 + 1 / 0.55) / math.sqrt(2) - 1), abs=1e-14)
    assert total == pytest.approx(ORACLE["sym_0.55"][2], abs=1e-12)


def test_symmetric_n1_closed_form_matches_solver():
    for r in np.linspace(r_max(2), 1.0, 60, endpoint=False):
        s, total = symmetric_single_off_closed_form(r)
        d = symmetric_durations(r, 1)
        assert d.s == pytest.approx(s, abs=1e-10)
        assert d.total == pytest.approx(total, abs=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_symmetric_upper_limit(n):
    d = symmetric_durations(r_max(n + 1), n)
    assert d.s == pytest.approx(math.pi, abs=1e-12)
    assert d.t_on == pytest.approx(math.pi, abs=1e-12)
    beta, mu = symmetric_rotation(d.s, r_max(n + 1), n)
    assert beta == pytest.approx(math.pi, abs=1e-7)
    assert abs(mu[0]) == pytest.approx(1 / math.sqrt(2), abs=1e-7)
    assert abs(mu[2]) == pytest.approx(1 / math.sqrt(2), abs=1e-7)


@pytest.mark.parametrize("n", [2, 3])
def test_symmetric_lower_limit(n):
    d = symmetric_durations(r_max(n - 1) * (1 - 1e-9), n)
    assert d.s < 1e-3
    assert d.t_on == pytest.approx(math.pi, abs=1e-3)


def test_symmetric_no_root_outside_range():
    with pytest.raises(NoRootError):
        symmetric_durations(0.1, 1)
    with pytest.raises(NoRootError):
        symmetric_durations(0.45, 3)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_symmetric_root_unique_in_regime(n):
    lo, hi = r_max(n + 1), r_min(n)
    for r in np.linspace(lo, hi, 15):
        assert len(symmetric_roots(r, n)) == 1


def test_synthesize_sequences():
    one = synthesize(ProblemParams.from_ratio(1.1))
    assert len(one.sequence) == 1 and one.sequence[0].level is su2.Level.ON
    comp = synthesize(ProblemParams.from_ratio(0.85))
    assert [seg.level for seg in comp.sequence] == [su2.Level.ON, su2.Level.OFF, su2.Level.ON]
    assert [seg.duration for seg in comp.sequence] == pytest.approx([0.70354, math.pi, 2.27182], abs=1e-5)
    assert comp.variant is Variant.SHORT_FIRST
    sym = synthesize(ProblemParams.from_ratio(0.2))
    assert len(sym.sequence) == 7
    assert [seg.level for seg in sym.sequence] == [su2.Level.ON, su2.Level.OFF] * 3 + [su2.Level.ON]


def test_complementary_final_state_direction():
    report = synthesize(ProblemParams.from_ratio(0.85))
    mu = report.total_rotation.axis
    assert report.final_state == pytest.approx((mu[1], -mu[0], 0.0), abs=1e-12)


def test_physical_time_scaling():
    base = synthesize(ProblemParams.from_ratio(0.4))
    scaled = synthesize(ProblemParams(detuning=4.0, omega_max=1.6))
    assert scaled.total_duration * 4.0 == pytest.approx(base.total_duration, abs=1e-12)
    assert abs(scaled.final_state.z) <= TERMINAL_TOL


def test_total_formula_and_invariants():
    for r in np.geomspace(0.05, 0.99, 80):
        report = synthesize(ProblemParams.from_ratio(r))
        d = report.durations
        n = d.n_off
        w = math.sqrt(r * r + 1)
        assert d.total == pytest.approx(n * math.pi + (d.s + d.f + (n - 1) * d.t_on) / w, abs=1e-10)
        assert 0 < d.s <= d.t_on + 1e-12 and 0 < d.f <= d.t_on + 1e-12
        assert math.pi - 1e-12 < d.t_on < 2 * math.pi
        assert d.t_off == math.pi
        if report.regime.kind is RegimeKind.COMPLEMENTARY:
            assert d.s + d.f == pytest.approx(d.t_on, abs=1e-10)
            assert report.total_rotation.angle == pytest.approx(math.pi / 2, abs=1e-9)
            assert report.total_rotation.axis[2] == pytest.approx(0.0, abs=1e-9)
        else:
            assert d.s == d.f
            rot = report.total_rotation
            assert rot.axis[1] == pytest.approx(0.0, abs=1e-9)
            assert 2 * abs(rot.axis[0]) * math.sin(rot.angle / 2) == pytest.approx(math.sqrt(2), abs=1e-9)


def test_terminal_condition_grid():
    for r in np.geomspace(0.05, 20, 500):
        report = synthesize(ProblemParams.from_ratio(r))
        assert abs(_final_z(report)) <= 1e-9


def test_monotone_stairway():
    rs = np.geomspace(0.05, 20, 800)
    totals = [optimal_duration(r) for r in rs]
    assert all(b <= a + 1e-12 for a, b in zip(totals, totals[1:]))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_branch_agreement_at_r_min(n):
    r = r_min(n)
    comp = complementary_total(r, n)
    sym = symmetric_durations(r, n)
    assert sym.total == pytest.approx(comp, abs=1e-8)
    assert sym.s == pytest.approx(sym.t_on / 2, abs=1e-8)


def test_optimal_duration_examples():
    assert optimal_duration(1.0) == pytest.approx(math.pi / math.sqrt(2), abs=1e-14)
    assert optimal_duration(r_min(1)) == pytest.approx(ORACLE["comp_rmin1_total"], abs=1e-12)


def test_g_function():
    assert g_function(1 / math.sqrt(2)) == pytest.approx(0.0, abs=1e-12)
    assert all(g_function(r) >= 0 for r in np.linspace(1 / math.sqrt(2), 1, 200, endpoint=False))


def test_symmetric_rotation_matches_composition():
    r, n = 0.35, 2
    d = symmetric_durations(r, n)
    rot = synthesize(ProblemParams.from_ratio(r)).total_rotation
    beta, mu = symmetric_rotation(d.s, r, n)
    assert rot.same_action(su2.Rotation(mu, beta), atol=1e-10)
