"""Maximum-principle certificate for synthesized sequences.

Two independent routes to the switching function phi_x are compared:

* the piecewise closed forms built from the first On duration alone
  (:func:`phi_x_first_on`, :func:`phi_x_off`, :func:`phi_x_on`), and
* the costate integrated backward from ``lambda(t_f) = (0, 0, v)`` with the
  same exact rotations as the state, giving ``phi = r x lambda``.

Closed-form values are returned as ``detuning * phi_x`` (dimensionless).
Residuals in :class:`VerificationReport` are scaled by ``detuning`` as well,
so they are dimensionless and coincide with physical values when detuning = 1.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import su2
from .errors import CostateError
from .params import ProblemParams
from .su2 import Level


def phi_x_first_on(t, s, r):
    """Switching function on the first On pulse; ``t`` and ``s`` in modified time."""
    t = np.asarray(t, dtype=float)
    r2 = r * r
    return (np.sin(t) / math.sin(s) * (math.cos(s) + r2) - np.cos(t) - r2) / (r * (r2 + 1.0))


def off_slope(s, r):
    """Rate of change of phi_x entering each Off pulse, in units of detuning * phi_x per detuning * t."""
    return (r * r / math.tan(s) + 1.0 / math.sin(s)) / (r * math.sqrt(r * r + 1.0))


def phi_x_off(dt, s, r):
    """Switching function on an Off pulse; ``dt`` is detuning times the elapsed time."""
    return off_slope(s, r) * np.sin(np.asarray(dt, dtype=float))


def switch_angle(s, r):
    r2 = r * r
    return math.atan(r2 * math.sin(s) / (1.0 + r2 * math.cos(s)))


def phi_x_on(t, s, r):
    """Switching function on every On pulse after the first (modified time from its start)."""
    t = np.asarray(t, dtype=float)
    theta = switch_angle(s, r)
    return -(r / (r * r + 1.0)) * (1.0 + np.sin(t - theta) / math.sin(theta))


def phi_x_single_on(t, gamma, r):
    """Switching function of a lone On pulse of modified duration ``gamma``.

    Solves the same harmonic equation with phi_x = -1/Omega_0 at both ends.
    """
    t = np.asarray(t, dtype=float)
    amp = -1.0 / (r * (r * r + 1.0))
    return amp * np.cos(t - 0.5 * gamma) / math.cos(0.5 * gamma) - r / (r * r + 1.0)


@dataclass
class CostateTrajectory:
    """Sampled state and costate; ``phi = state x costate``."""

    times: np.ndarray
    states: np.ndarray
    costates: np.ndarray
    segment_index: np.ndarray
    multiplier: float

    @property
    def phi(self) -> np.ndarray:
        return np.cross(self.states, self.costates)


@dataclass
class VerificationReport:
    max_hc_residual: float
    sign_violations: int
    switch_time_residuals: list
    boundary_residuals: tuple
    passed: bool
    lambda_z0_residual: float = math.nan
    agreement_residual: float = math.nan
    near_zero_measure: float = math.nan
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_hc_residual": self.max_hc_residual,
            "sign_violations": self.sign_violations,
            "switch_time_residuals": list(self.switch_time_residuals),
            "boundary_residuals": list(self.boundary_residuals),
            "lambda_z0_residual": self.lambda_z0_residual,
            "agreement_residual": self.agreement_residual,
            "near_zero_measure": self.near_zero_measure,
            "notes": list(self.notes),
        }


def _segment_samples(sequence, samples):
    """Per-segment elapsed-time grids including both endpoints."""
    return [np.linspace(0.0, seg.duration, samples) for seg in sequence]


def costate_backward(report, params: ProblemParams = None, samples_per_segment: int = 1000) -> CostateTrajectory:
    """Costate from ``(0, 0, v)`` at t_f, with ``v`` set by a zero Hamiltonian at t_f."""
    params = params or report.params
    sequence = report.sequence
    rotations = [su2.segment_rotation(seg, params) for seg in sequence]
    state = su2.NORTH_POLE
    entry_states = []
    for rot in rotations:
        entry_states.append(state)
        state = su2.apply(rot, state)
    y_final = state.y
    # H(t_f) = 1 + Omega_0 * y(t_f) * v with the final pulse On.
    if abs(y_final) < 1e-12:
        raise CostateError(f"y(t_f) = {y_final:.3e}: the zero-Hamiltonian multiplier is undefined")
    v = -1.0 / (y_final * params.omega_max)
    lam = su2.BlochVector(0.0, 0.0, v)
    entry_costates = [None] * len(rotations)
    for k in range(len(rotations) - 1, -1, -1):
        lam = su2.apply(rotations[k].inverse(), lam)
        entry_costates[k] = lam
    times, states, costates, seg_idx = [], [], [], []
    t0 = 0.0
    for k, (seg, tau) in enumerate(zip(sequence, _segment_samples(sequence, samples_per_segment))):
        axis = su2.segment_axis(seg, params)
        angles = tau * su2.segment_frequency(seg, params)
        times.append(t0 + tau)
        states.append(su2.rotate_many(axis, angles, entry_states[k]))
        costates.append(su2.rotate_many(axis, angles, entry_costates[k]))
        seg_idx.append(np.full(tau.shape, k))
        t0 += seg.duration
    return CostateTrajectory(
        np.concatenate(times), np.vstack(states), np.vstack(costates), np.concatenate(seg_idx), v
    )


def _sublevel_measure(t, vals, eps):
    """Length of {|phi| < eps} for the piecewise-linear interpolant of ``vals`` on ``t``."""
    a, b = vals[:-1], vals[1:]
    dt = np.diff(t)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    overlap = np.clip(np.minimum(hi, eps) - np.maximum(lo, -eps), 0.0, None)
    span = hi - lo
    flat = span == 0.0
    frac = np.where(flat, (np.abs(a) < eps).astype(float), overlap / np.where(flat, 1.0, span))
    return float(np.sum(frac * dt))


def _structure_ok(sequence):
    if not sequence or sequence[0].level is not Level.ON or sequence[-1].level is not Level.ON:
        return False
    return all(a.level is not b.level for a, b in zip(sequence, sequence[1:]))


def analytic_profile(sequence, params: ProblemParams, samples_per_segment: int = 1000):
    """Closed-form ``detuning * phi_x`` per segment, chained from the first On duration.

    Returns a list of ``(elapsed_time_grid, values)`` pairs.
    """
    r = params.ratio
    w = params.on_frequency
    delta = params.detuning
    grids = _segment_samples(sequence, samples_per_segment)
    if len(sequence) == 1:
        gamma = sequence[0].duration * w
        return [(grids[0], phi_x_single_on(grids[0] * w, gamma, r))]
    s = sequence[0].duration * w
    out = [(grids[0], phi_x_first_on(grids[0] * w, s, r))]
    for seg, tau in zip(sequence[1:], grids[1:]):
        if seg.level is Level.OFF:
            out.append((tau, phi_x_off(tau * delta, s, r)))
        else:
            out.append((tau, phi_x_on(tau * w, s, r)))
    return out


def verify(
    report,
    params: ProblemParams = None,
    samples_per_segment: int = 1000,
    tol: float = 1e-9,
    agreement_tol: float = 1e-8,
) -> VerificationReport:
    """Check sign pattern, switch zeros, boundary values and H = 0 for a sequence.

    Never raises for a bad sequence; failures are reported.
    """
    params = params or report.params
    sequence = tuple(report.sequence)
    notes = []
    r = params.ratio
    delta = params.detuning
    if not _structure_ok(sequence):
        notes.append("sequence must alternate On/Off and start and end with On")
        return VerificationReport(math.inf, 0, [], (math.inf, math.inf), False, notes=notes)
    samples_per_segment = max(int(samples_per_segment), 1000)

    profile = analytic_profile(sequence, params, samples_per_segment)
    t_f = sum(seg.duration for seg in sequence)
    switch_times = np.cumsum([seg.duration for seg in sequence])[:-1]
    switch_residuals = [float(abs(vals[-1])) for _, vals in profile[:-1]]
    target = -1.0 / r
    start_residual = abs(float(profile[0][1][0]) - target)
    end_residual = abs(float(profile[-1][1][-1]) - target)

    sign_violations = 0
    guard = 1e-3 * t_f
    strict = 1e-9 / r
    small = 1e-6 / r
    near_zero = 0.0
    t0 = 0.0
    for seg, (tau, vals) in zip(sequence, profile):
        t_abs = t0 + tau
        if len(switch_times):
            dist = np.min(np.abs(t_abs[:, None] - switch_times[None, :]), axis=1)
            interior = dist >= guard
        else:
            interior = np.ones_like(t_abs, dtype=bool)
        if seg.level is Level.ON:
            bad = vals[interior] >= -strict
        else:
            bad = vals[interior] <= strict
        sign_violations += int(np.count_nonzero(bad))
        near_zero += _sublevel_measure(tau, vals, small)
        t0 += seg.duration

    hc = math.inf
    lam_z0 = math.inf
    agreement = math.inf
    try:
        traj = costate_backward(report, params, samples_per_segment)
    except CostateError as exc:
        notes.append(str(exc))
    else:
        phi = traj.phi
        omegas = np.array([sequence[k].amplitude for k in traj.segment_index])
        hc = float(np.max(np.abs(1.0 + phi[:, 0] * omegas + phi[:, 2] * delta)))
        lam_z0 = float(abs(traj.costates[0, 2]) * delta)
        analytic = np.concatenate([vals for _, vals in profile])
        agreement = float(np.max(np.abs(phi[:, 0] * delta - analytic)))
        start_residual = max(start_residual, abs(float(phi[0, 0] * delta) - target))
        end_residual = max(end_residual, abs(float(phi[-1, 0] * delta) - target))

    passed = (
        sign_violations == 0
        and all(x <= tol for x in switch_residuals)
        and start_residual <= tol
        and end_residual <= tol
        and hc <= tol
        and lam_z0 <= agreement_tol
        and agreement <= agreement_tol
    )
    return VerificationReport(
        max_hc_residual=hc,
        sign_violations=sign_violations,
        switch_time_residuals=switch_residuals,
        boundary_residuals=(start_residual, end_residual),
        passed=bool(passed),
        lambda_z0_residual=lam_z0,
        agreement_residual=agreement,
        near_zero_measure=near_zero / t_f,
        notes=notes,
    )
