"""Optimal bang-bang sequences for the north-pole-to-equator transfer.

All durations here are in modified time (angle swept about the active field,
``t * sqrt(detuning^2 + Omega^2)``) until :func:`synthesize` converts them to
physical segment durations. Off pulses always last ``pi / detuning``.
"""
from dataclasses import dataclass, field
from enum import Enum
import math
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import su2
from .errors import BangBangError, DomainError, NoRootError
from .params import ProblemParams

DEFAULT_R_FLOOR = 0.02

# Closed-form arguments this close outside [-1, 1] are treated as boundary values.
_GUARD = 1e-12

SCAN_POINTS = 4096
SCAN_MARGIN = 1e-6
ROOT_XTOL = 1e-13
TERMINAL_TOL = 1e-9


class RegimeKind(str, Enum):
    SINGLE_ON = "SingleOn"
    COMPLEMENTARY = "Complementary"
    SYMMETRIC = "Symmetric"
    # Baseline sequences built by the oracle module, never returned by classify.
    SUBOPTIMAL = "Suboptimal"


class Variant(str, Enum):
    SHORT_FIRST = "short-first"
    LONG_FIRST = "long-first"


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    n_off: int


@dataclass(frozen=True)
class DurationSet:
    """Modified durations of the first (``s``), interior (``t_on``) and final (``f``) On pulses.

    ``total`` is the dimensionless total duration ``detuning * t_f``. For the
    single-On regime ``s == f`` is the whole pulse and ``t_on``/``t_off`` are None.
    """

    n_off: int
    s: float
    t_on: Optional[float]
    f: float
    t_off: Optional[float]
    total: float


class TerminalConditionError(BangBangError):
    """A synthesized sequence missed the equator."""


@dataclass(frozen=True)
class SynthesisReport:
    params: ProblemParams
    regime: Regime
    durations: DurationSet
    sequence: tuple
    total_rotation: su2.Rotation
    final_state: su2.BlochVector
    variant: Optional[Variant] = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def total_duration(self) -> float:
        """Physical duration t_f."""
        return sum(seg.duration for seg in self.sequence)


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValueError(f"number of Off pulses must be an integer >= 1, got {n}")


def r_max(n: int) -> float:
    """Largest ratio admitting a complementary sequence with ``n`` Off pulses."""
    _check_n(n)
    return math.tan(math.pi / (4 * n))


def r_min(n: int) -> float:
    """Smallest ratio admitting a complementary sequence with ``n`` Off pulses."""
    _check_n(n)
    return math.sin(math.pi / (4 * n))


def classify(r: float, r_floor: float = DEFAULT_R_FLOOR) -> Regime:
    if not r > 0:
        raise DomainError(f"ratio must be positive, got {r}")
    if r < r_floor:
        raise DomainError(f"ratio {r} is below the configured floor {r_floor}")
    if r >= 1.0:
        return Regime(RegimeKind.SINGLE_ON, 0)
    n = 1
    while r < r_max(n + 1):
        n += 1
    if r >= r_min(n):
        return Regime(RegimeKind.COMPLEMENTARY, n)
    return Regime(RegimeKind.SYMMETRIC, n)


def _guarded(x: float, what: str) -> float:
    if -1.0 <= x <= 1.0:
        return x
    if abs(x) - 1.0 <= _GUARD:
        return math.copysign(1.0, x)
    raise DomainError(f"{what} argument {x!r} outside [-1, 1]")


def single_on_duration(r: float) -> float:
    """``detuning * t_f`` of the single On pulse reaching the equator (r >= 1)."""
    if not r >= 1.0:
        raise DomainError(f"a single On pulse cannot reach the equator for r = {r} < 1")
    arg = math.sqrt(0.5 * (1.0 + 1.0 / (r * r)))
    return 2.0 * math.asin(_guarded(arg, "asin")) / math.sqrt(r * r + 1.0)


def interior_on_duration(s, r):
    """Interior On duration fixed by the first On duration ``s`` (modified time)."""
    r2 = r * r
    return math.pi + 2.0 * np.arctan(r2 * np.sin(s) / (1.0 + r2 * np.cos(s)))


def pair_rotation(t_on: float, r: float):
    """Angle and axis (0, nu_y, nu_z) of one Off pulse followed by a full On pulse."""
    root = math.sqrt(r * r + 1.0)
    half = 0.5 * t_on
    alpha = 2.0 * math.acos(_guarded(math.sin(half) / root, "acos"))
    sa = math.sin(0.5 * alpha)
    return alpha, (0.0, r * math.sin(half) / (root * sa), -math.cos(half) / sa)


def _total(n_off, s, t_on, f, r):
    return n_off * math.pi + (s + f + (n_off - 1) * t_on) / math.sqrt(r * r + 1.0)


def complementary_durations(r: float, n: int, variant: Variant = Variant.SHORT_FIRST) -> DurationSet:
    return _complementary(r, n, variant)[0]


def complementary_branches(r: float, n: int) -> tuple:
    """Both first-On durations of the complementary family, shorter first."""
    return _complementary(r, n, Variant.SHORT_FIRST)[1]


def _complementary(r, n, variant):
    _check_n(n)
    lo, hi = r_min(n), r_max(n)
    if not lo <= r < hi:
        raise DomainError(f"complementary sequence with n={n} needs {lo} <= r < {hi}, got r={r}")
    c = math.cos(math.pi / (4 * n))
    r2 = r * r
    t_on = 2.0 * math.pi - 2.0 * math.asin(_guarded(math.sqrt(r2 + 1.0) * c, "asin"))
    b = r2 * c / math.sqrt(1.0 / (r2 + 1.0) - c * c)
    disc = b * b + r2 * r2 - 1.0
    if disc < 0.0:
        if disc < -_GUARD:
            raise DomainError(f"negative discriminant {disc} for r={r}, n={n}")
        disc = 0.0
    denom = b * b + r2 * r2
    root = b * math.sqrt(disc)
    s_short = math.acos(_guarded(-(r2 - root) / denom, "acos"))
    s_long = math.acos(_guarded(-(r2 + root) / denom, "acos"))
    s = s_short if Variant(variant) is Variant.SHORT_FIRST else t_on - s_short
    f = t_on - s
    return DurationSet(n, s, t_on, f, math.pi, _total(n, s, t_on, f, r)), (s_short, s_long)


def symmetric_condition(s, r, n):
    """Signed ``2 mu_ex sin(beta_e / 2)`` of the symmetric total rotation.

    The equator is reached when its magnitude equals sqrt(2). Accepts arrays.
    """
    s = np.asarray(s, dtype=float)
    root = math.sqrt(r * r + 1.0)
    t_on = interior_on_duration(s, r)
    sin_half = np.sin(0.5 * t_on) / root
    alpha = 2.0 * np.arccos(np.clip(sin_half, -1.0, 1.0))
    sa = np.sin(0.5 * alpha)
    na = 0.5 * n * alpha
    shift = s - 0.5 * t_on
    bracket = 4.0 * root * np.cos(na) * np.sin(shift) - 2.0 * np.sin(na) * (
        np.cos(s - t_on) + np.cos(s) - 2.0
    ) / sa
    return r * bracket / (2.0 * (r * r + 1.0))


def symmetric_rotation(s: float, r: float, n: int):
    """Closed-form angle ``beta_e`` and axis ``(mu_ex, 0, mu_ez)`` of the symmetric total rotation."""
    root = math.sqrt(r * r + 1.0)
    t_on = float(interior_on_duration(s, r))
    alpha, _ = pair_rotation(t_on, r)
    sa = math.sin(0.5 * alpha)
    na = 0.5 * n * alpha
    shift = s - 0.5 * t_on
    cos_half_beta = math.sin(na) * math.cos(0.5 * t_on) * math.sin(shift) / (root * sa) + math.cos(
        na
    ) * math.cos(shift)
    beta = 2.0 * math.acos(_guarded(cos_half_beta, "acos"))
    sb = math.sin(0.5 * beta)
    mu_x = float(symmetric_condition(s, r, n)) / (2.0 * sb)
    mu_z = (
        2.0 * root * math.cos(na) * math.sin(shift)
        - math.sin(na) * (math.cos(s - t_on) + math.cos(s) + 2.0 * r * r) / sa
    ) / (2.0 * (r * r + 1.0) * sb)
    return beta, (mu_x, 0.0, mu_z)


def symmetric_residual(s, r, n):
    """Zero exactly where the symmetric sequence ends on the equator; smooth in ``s``."""
    return symmetric_condition(s, r, n) ** 2 - 2.0


def symmetric_roots(r: float, n: int) -> list:
    """All roots of the symmetric condition with ``s <= t_on(s)``, ascending."""
    _check_n(n)
    grid = np.linspace(SCAN_MARGIN, 2.0 * math.pi - SCAN_MARGIN, SCAN_POINTS)
    # For r < 1 the admissible set s <= t_on(s) is (0, pi]; pi itself is the
    # degenerate boundary root at r = r_max(n + 1), so it is always sampled.
    grid = np.union1d(grid, [math.pi])
    keep = grid <= interior_on_duration(grid, r) + _GUARD
    vals = symmetric_residual(grid, r, n)
    exact = keep & (np.abs(vals) <= _GUARD)
    roots = [float(x) for x in grid[exact]]
    for i in range(len(grid) - 1):
        if not (keep[i] and keep[i + 1]):
            continue
        # A sign flip next to an exact grid zero is that zero seen through
        # rounding (the boundary root at pi is a double root).
        if exact[i] or exact[i + 1]:
            continue
        if vals[i] * vals[i + 1] < 0.0:
            roots.append(
                brentq(symmetric_residual, grid[i], grid[i + 1], args=(r, n), xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
            )
    roots.sort()
    deduped = []
    for x in roots:
        if not deduped or x - deduped[-1] > 1e-9:
            deduped.append(x)
    return deduped


def symmetric_durations(r: float, n: int) -> DurationSet:
    return _symmetric(r, n)[0]


def _symmetric(r, n):
    roots = symmetric_roots(r, n)
    if not roots:
        raise NoRootError(f"no symmetric root for r={r}, n={n}; r lies outside the validity range")
    candidates = []
    for s in roots:
        t_on = float(interior_on_duration(s, r))
        candidates.append((_total(n, s, t_on, s, r), s, t_on))
    total, s, t_on = min(candidates)
    return DurationSet(n, s, t_on, s, math.pi, total), candidates


def symmetric_single_off_closed_form(r: float):
    """``(s*, detuning * T)`` of the symmetric sequence with one Off pulse."""
    x = (r + 1.0 / r) / math.sqrt(2.0)
    # s* = acos(1 - x) = 2 atan2(sqrt(x), sqrt(2 - x)); 2 - x vanishes at
    # r = r_max(2), so it is formed from its factors to keep it accurate there.
    a = r_max(2)
    two_minus_x = (r - a) * (1.0 / a - r) / (math.sqrt(2.0) * r)
    if two_minus_x < 0.0:
        if two_minus_x < -_GUARD:
            raise DomainError(f"single-Off symmetric closed form needs r_max(2) <= r <= 1, got r={r}")
        two_minus_x = 0.0
    s = 2.0 * math.atan2(math.sqrt(x), math.sqrt(two_minus_x))
    return s, math.pi + 2.0 * s / math.sqrt(r * r + 1.0)


def complementary_total(r: float, n: int) -> float:
    """``detuning * T`` of the complementary sequence straight from the t_on closed form."""
    arg = _guarded(math.sqrt(r * r + 1.0) * math.cos(math.pi / (4 * n)), "asin")
    return n * (math.pi + (2.0 * math.pi - 2.0 * math.asin(arg)) / math.sqrt(r * r + 1.0))


def g_function(r: float) -> float:
    """Difference of cosines whose sign orders the n = 1 complementary and symmetric durations."""
    return (r + 1.0 / r) / math.sqrt(2.0) - math.sqrt((1.0 - r * r) / 2.0) - 1.0


def build_segments(durations: DurationSet, params: ProblemParams) -> tuple:
    """Physical segment list On(s) [Off, On(t_on)]*(n-1) Off On(f)."""
    w = params.on_frequency
    if durations.n_off == 0:
        return su2.build_sequence([su2.FieldSegment.on(durations.s / w, params)])
    off = su2.FieldSegment.off(math.pi / params.detuning)
    segs = [su2.FieldSegment.on(durations.s / w, params)]
    for _ in range(durations.n_off - 1):
        segs += [off, su2.FieldSegment.on(durations.t_on / w, params)]
    segs += [off, su2.FieldSegment.on(durations.f / w, params)]
    return su2.build_sequence(segs)


def synthesize(
    params: ProblemParams,
    variant: Optional[Variant] = None,
    r_floor: float = DEFAULT_R_FLOOR,
) -> SynthesisReport:
    r = params.ratio
    regime = classify(r, r_floor)
    diagnostics = {}
    used_variant = None
    if regime.kind is RegimeKind.SINGLE_ON:
        total = single_on_duration(r)
        gamma = total * math.sqrt(r * r + 1.0)
        durations = DurationSet(0, gamma, None, gamma, None, total)
    elif regime.kind is RegimeKind.COMPLEMENTARY:
        used_variant = Variant(variant) if variant is not None else Variant.SHORT_FIRST
        durations, branches = _complementary(r, regime.n_off, used_variant)
        diagnostics["s_branches"] = branches
    else:
        durations, candidates = _symmetric(r, regime.n_off)
        diagnostics["roots"] = [c[1] for c in sorted(candidates, key=lambda c: c[1])]
        diagnostics["root_totals"] = [c[0] for c in sorted(candidates, key=lambda c: c[1])]
    sequence = build_segments(durations, params)
    rotation = su2.sequence_rotation(sequence, params)
    final = su2.apply(rotation, su2.NORTH_POLE)
    if abs(final.z) > TERMINAL_TOL:
        raise TerminalConditionError(f"synthesized sequence for r={r} ends at z={final.z}")
    return SynthesisReport(params, regime, durations, sequence, rotation, final, used_variant, diagnostics)


def optimal_duration(r: float, r_floor: float = DEFAULT_R_FLOOR) -> float:
    """``detuning * t_f`` of the optimal sequence."""
    return synthesize(ProblemParams.from_ratio(r), r_floor=r_floor).durations.total
