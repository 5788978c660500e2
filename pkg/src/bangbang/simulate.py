"""Propagation of arbitrary bang-bang sequences from the north pole.

Two independent routes: exact per-segment rotations (the reference) and
fixed-step RK4 on the Bloch equations, plus an RK4 integrator for the
Schrodinger equation of the amplitudes.
"""
from dataclasses import dataclass
import math
from typing import Optional

import numpy as np

from . import su2
from ._backend import kernels
from .params import ProblemParams

DEFAULT_SAMPLES = 256


@dataclass
class Trajectory:
    """Sampled Bloch trajectory.

    ``segment_boundaries`` holds the sample index of every switching time,
    including t = 0 and t = t_f, so it has one more entry than the sequence.
    """

    times: np.ndarray
    states: np.ndarray
    segment_index: np.ndarray
    segment_boundaries: list
    amplitudes: Optional[np.ndarray] = None

    @property
    def samples(self):
        return [(float(t), su2.BlochVector(*map(float, v))) for t, v in zip(self.times, self.states)]

    @property
    def final_state(self) -> su2.BlochVector:
        return su2.BlochVector(*map(float, self.states[-1]))


def _check_sequence(sequence):
    sequence = tuple(sequence)
    if not sequence:
        raise ValueError("pulse sequence is empty")
    return sequence


def _boundaries(segment_index, nseg):
    # The last sample carrying index k ends segment k.
    ends = np.searchsorted(segment_index, np.arange(nseg), side="right") - 1
    return [0] + [int(i) for i in ends]


def entry_states(sequence, params: ProblemParams) -> list:
    """Bloch vector at the start of each segment."""
    state = su2.NORTH_POLE
    out = []
    for seg in sequence:
        out.append(state)
        state = su2.apply(su2.segment_rotation(seg, params), state)
    return out


def exact_states(sequence, params: ProblemParams, times, segment_index) -> np.ndarray:
    """Exact states at ``times``, where sample i lies in segment ``segment_index[i]``."""
    sequence = _check_sequence(sequence)
    times = np.asarray(times, dtype=float)
    segment_index = np.asarray(segment_index)
    starts = np.concatenate([[0.0], np.cumsum([seg.duration for seg in sequence])[:-1]])
    entries = entry_states(sequence, params)
    out = np.empty((times.size, 3))
    for k, seg in enumerate(sequence):
        mask = segment_index == k
        if not np.any(mask):
            continue
        elapsed = times[mask] - starts[k]
        angles = elapsed * su2.segment_frequency(seg, params)
        out[mask] = su2.rotate_many(su2.segment_axis(seg, params), angles, entries[k])
    return out


def propagate_exact(sequence, params: ProblemParams, samples_per_segment: int = DEFAULT_SAMPLES) -> Trajectory:
    """Sample each segment at ``samples_per_segment`` points after its start."""
    sequence = _check_sequence(sequence)
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be >= 1")
    times = [np.zeros(1)]
    seg_idx = [np.zeros(1, dtype=np.int64)]
    t0 = 0.0
    for k, seg in enumerate(sequence):
        tau = np.linspace(0.0, seg.duration, samples_per_segment + 1)[1:]
        times.append(t0 + tau)
        seg_idx.append(np.full(tau.size, k, dtype=np.int64))
        t0 += seg.duration
    times = np.concatenate(times)
    seg_idx = np.concatenate(seg_idx)
    states = exact_states(sequence, params, times, seg_idx)
    return Trajectory(times, states, seg_idx, _boundaries(seg_idx, len(sequence)))


def propagate_ode(sequence, params: ProblemParams, dt: float, method: str = "RK4") -> Trajectory:
    """Fixed-step integration of dr/dt = B x r; steps are shortened to land on every switch."""
    sequence = _check_sequence(sequence)
    if str(method).upper() != "RK4":
        raise ValueError(f"unsupported method {method!r}; only RK4 is available")
    shortest = min(seg.duration for seg in sequence)
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt > shortest:
        raise ValueError(f"dt = {dt} exceeds the shortest segment ({shortest})")
    omegas = np.array([seg.amplitude for seg in sequence], dtype=float)
    durations = np.array([seg.duration for seg in sequence], dtype=float)
    times, states, seg_idx = kernels.rk4_bloch(omegas, durations, params.detuning, float(dt), (0.0, 0.0, 1.0))
    return Trajectory(times, states, seg_idx, _boundaries(seg_idx, len(sequence)))


def propagate_amplitudes_rk4(sequence, params: ProblemParams, dt: float) -> Trajectory:
    """RK4 on i dc/dt = H c with H = (detuning sigma_z + Omega sigma_x) / 2, basis (c1, c0).

    Starts from c = (1, 0). States are the Bloch images of the amplitudes.
    """
    sequence = _check_sequence(sequence)
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    delta = params.detuning
    c1, c0 = 1.0 + 0j, 0j
    times = [0.0]
    amps = [(c1, c0)]
    seg_idx = [0]
    t0 = 0.0
    for k, seg in enumerate(sequence):
        om = seg.amplitude
        nsteps = max(1, math.ceil(seg.duration / dt * (1.0 - 1e-12)))

        def rhs(a1, a0):
            return (-0.5j * (delta * a1 + om * a0), -0.5j * (om * a1 - delta * a0))

        for step in range(nsteps):
            last = step == nsteps - 1
            h = seg.duration - step * dt if last else dt
            k1 = rhs(c1, c0)
            k2 = rhs(c1 + 0.5 * h * k1[0], c0 + 0.5 * h * k1[1])
            k3 = rhs(c1 + 0.5 * h * k2[0], c0 + 0.5 * h * k2[1])
            k4 = rhs(c1 + h * k3[0], c0 + h * k3[1])
            c1 = c1 + h * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
            c0 = c0 + h * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
            times.append(t0 + seg.duration if last else t0 + (step + 1) * dt)
            amps.append((c1, c0))
            seg_idx.append(k)
        t0 += seg.duration
    amps = np.array(amps, dtype=complex)
    p = amps[:, 0] * np.conj(amps[:, 1])
    states = np.column_stack([2.0 * p.real, -2.0 * p.imag, np.abs(amps[:, 0]) ** 2 - np.abs(amps[:, 1]) ** 2])
    seg_idx = np.array(seg_idx, dtype=np.int64)
    return Trajectory(np.array(times), states, seg_idx, _boundaries(seg_idx, len(sequence)), amps)


def max_deviation(trajectory: Trajectory, sequence, params: ProblemParams) -> float:
    """Largest pointwise distance from the exact states at the trajectory's own sample times."""
    ref = exact_states(sequence, params, trajectory.times, trajectory.segment_index)
    return float(np.max(np.linalg.norm(trajectory.states - ref, axis=1)))


def terminal_residual(sequence, params: ProblemParams) -> float:
    """|z(t_f)| under exact propagation."""
    sequence = _check_sequence(sequence)
    return abs(su2.apply(su2.sequence_rotation(sequence, params), su2.NORTH_POLE).z)
