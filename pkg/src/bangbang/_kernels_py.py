"""Pure-Python implementations of the compiled kernels.

Same signatures and semantics as ``_kernels.pyx``. The batch evaluator is
vectorised over rows with numpy; the scalar routines loop in plain Python.
"""
import math

import numpy as np


def _rotate(v, nx, nz, angle):
    c = math.cos(angle)
    s = math.sin(angle)
    x, y, z = v
    dot = nx * x + nz * z
    return (
        x * c - nz * y * s + nx * dot * (1.0 - c),
        y * c + (nz * x - nx * z) * s,
        z * c + nx * y * s + nz * dot * (1.0 - c),
    )


def _prefix_state(durations, delta, omega):
    w_on = math.hypot(delta, omega)
    nx, nz = omega / w_on, delta / w_on
    v = (0.0, 0.0, 1.0)
    for j, d in enumerate(durations):
        if j % 2 == 0:
            v = _rotate(v, nx, nz, d * w_on)
        else:
            v = _rotate(v, 0.0, 1.0, d * delta)
    return v


def schedule_z_batch(durations, delta, omega):
    """Terminal z of each row schedule started at the north pole."""
    d = np.ascontiguousarray(durations, dtype=np.float64)
    w_on = math.hypot(delta, omega)
    nx, nz = omega / w_on, delta / w_on
    n = d.shape[0]
    x = np.zeros(n)
    y = np.zeros(n)
    z = np.ones(n)
    for j in range(d.shape[1]):
        if j % 2 == 0:
            ax, az, ang = nx, nz, d[:, j] * w_on
        else:
            ax, az, ang = 0.0, 1.0, d[:, j] * delta
        c = np.cos(ang)
        s = np.sin(ang)
        dot = ax * x + az * z
        x, y, z = (
            x * c - az * y * s + ax * dot * (1.0 - c),
            y * c + (az * x - ax * z) * s,
            z * c + ax * y * s + az * dot * (1.0 - c),
        )
    return z


def schedule_objective(durations, delta, omega, tol, weight):
    """Total duration plus ``weight * max(0, |z| - tol)``; durations taken by magnitude."""
    d = [abs(float(t)) for t in durations]
    z = _prefix_state(d, delta, omega)[2]
    total = sum(d)
    if abs(z) > tol:
        total += weight * (abs(z) - tol)
    return total


def closing_on_duration(prefix, delta, omega):
    """Shortest final On duration bringing the prefix endpoint to z = 0.

    Returns ``(duration, gap)``; ``duration`` is NaN when unreachable.
    """
    w_on = math.hypot(delta, omega)
    nx, nz = omega / w_on, delta / w_on
    vx, vy, vz = _prefix_state([float(t) for t in prefix], delta, omega)
    dot = nx * vx + nz * vz
    c = nz * dot
    a = vz - c
    b = nx * vy
    amp = math.sqrt(a * a + b * b)
    if amp < abs(c) or amp == 0.0:
        return math.nan, abs(c) - amp
    base = math.atan2(b, a)
    half = math.acos(-c / amp)
    two_pi = 2.0 * math.pi
    p1 = math.fmod(math.fmod(base + half, two_pi) + two_pi, two_pi)
    p2 = math.fmod(math.fmod(base - half, two_pi) + two_pi, two_pi)
    return min(p1, p2) / w_on, 0.0


def rk4_bloch(omegas, durations, delta, dt, v0):
    """Fixed-step RK4 for dr/dt = B x r with B = (omega_k, 0, delta) on segment k."""
    counts = [max(1, int(np.ceil(d / dt * (1.0 - 1e-12)))) for d in durations]
    total = sum(counts)
    times = np.empty(total + 1)
    states = np.empty((total + 1, 3))
    seg = np.empty(total + 1, dtype=np.int64)
    x, y, z = (float(c) for c in v0)
    times[0] = 0.0
    states[0] = (x, y, z)
    seg[0] = 0
    idx = 1
    t0 = 0.0
    for k, (om, dur, nsteps) in enumerate(zip(omegas, durations, counts)):
        for step in range(nsteps):
            last = step == nsteps - 1
            h = dur - step * dt if last else dt
            k1x, k1y, k1z = -delta * y, delta * x - om * z, om * y
            ax, ay, az = x + 0.5 * h * k1x, y + 0.5 * h * k1y, z + 0.5 * h * k1z
            k2x, k2y, k2z = -delta * ay, delta * ax - om * az, om * ay
            ax, ay, az = x + 0.5 * h * k2x, y + 0.5 * h * k2y, z + 0.5 * h * k2z
            k3x, k3y, k3z = -delta * ay, delta * ax - om * az, om * ay
            ax, ay, az = x + h * k3x, y + h * k3y, z + h * k3z
            k4x, k4y, k4z = -delta * ay, delta * ax - om * az, om * ay
            x = x + h * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
            y = y + h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
            z = z + h * (k1z + 2.0 * k2z + 2.0 * k3z + k4z) / 6.0
            times[idx] = t0 + dur if last else t0 + (step + 1) * dt
            states[idx] = (x, y, z)
            seg[idx] = k
            idx += 1
        t0 += dur
    return times, states, seg
