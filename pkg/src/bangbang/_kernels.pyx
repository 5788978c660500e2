# cython: language_level=3
"""Compiled hot loops: batched schedule evaluation and fixed-step RK4.

Every function here has a pure-Python twin in ``_kernels_py`` with the same
signature and semantics; ``bangbang._backend`` picks one at import time.

Schedules are alternating On/Off duration lists that start with On.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, atan2, acos, fabs, fmod, ceil, M_PI, NAN

cnp.import_array()

cdef enum:
    _MAX_SEGMENTS = 64


cdef inline void _rotate(double* v, double nx, double nz, double angle) noexcept nogil:
    # Rodrigues rotation of v about the unit axis (nx, 0, nz).
    cdef double c = cos(angle), s = sin(angle)
    cdef double dot = nx * v[0] + nz * v[2]
    cdef double cx = -nz * v[1]
    cdef double cy = nz * v[0] - nx * v[2]
    cdef double cz = nx * v[1]
    v[0] = v[0] * c + cx * s + nx * dot * (1.0 - c)
    v[1] = v[1] * c + cy * s
    v[2] = v[2] * c + cz * s + nz * dot * (1.0 - c)


cdef inline void _prefix_state(const double* durations, Py_ssize_t count,
                               double delta, double omega, double* v) noexcept nogil:
    cdef double w_on = sqrt(delta * delta + omega * omega)
    cdef double nx = omega / w_on, nz = delta / w_on
    cdef Py_ssize_t j
    v[0] = 0.0
    v[1] = 0.0
    v[2] = 1.0
    for j in range(count):
        if j % 2 == 0:
            _rotate(v, nx, nz, durations[j] * w_on)
        else:
            _rotate(v, 0.0, 1.0, durations[j] * delta)


def schedule_z_batch(const double[:, ::1] durations, double delta, double omega):
    """Terminal z of each row schedule started at the north pole."""
    cdef Py_ssize_t n = durations.shape[0], m = durations.shape[1], i
    cdef double v[3]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for i in range(n):
            _prefix_state(&durations[i, 0], m, delta, omega, v)
            res[i] = v[2]
    return out


def schedule_objective(const double[::1] durations, double delta, double omega,
                       double tol, double weight):
    """Total duration plus ``weight * max(0, |z| - tol)``; durations taken by magnitude."""
    cdef Py_ssize_t m = durations.shape[0], j
    cdef double v[3]
    cdef double d[_MAX_SEGMENTS]
    cdef double total = 0.0
    if m > _MAX_SEGMENTS:
        raise ValueError("schedule too long for schedule_objective")
    for j in range(m):
        d[j] = fabs(durations[j])
        total += d[j]
    _prefix_state(d, m, delta, omega, v)
    if fabs(v[2]) > tol:
        total += weight * (fabs(v[2]) - tol)
    return total


def closing_on_duration(const double[::1] prefix, double delta, double omega):
    """Shortest final On duration bringing the prefix endpoint to z = 0.

    Returns ``(duration, gap)``; when no final On can reach the equator,
    ``duration`` is NaN and ``gap`` is the shortfall in the harmonic amplitude.
    """
    cdef double w_on = sqrt(delta * delta + omega * omega)
    cdef double nx = omega / w_on, nz = delta / w_on
    cdef double v[3]
    cdef double dot, a, b, c, amp, base, half, p1, p2, two_pi = 2.0 * M_PI
    cdef Py_ssize_t m = prefix.shape[0]
    _prefix_state(&prefix[0] if m > 0 else NULL, m, delta, omega, v)
    dot = nx * v[0] + nz * v[2]
    # z(phi) = c + a cos(phi) + b sin(phi)
    c = nz * dot
    a = v[2] - c
    b = nx * v[1]
    amp = sqrt(a * a + b * b)
    if amp < fabs(c) or amp == 0.0:
        return NAN, fabs(c) - amp
    base = atan2(b, a)
    half = acos(-c / amp)
    p1 = fmod(fmod(base + half, two_pi) + two_pi, two_pi)
    p2 = fmod(fmod(base - half, two_pi) + two_pi, two_pi)
    return (p1 if p1 < p2 else p2) / w_on, 0.0


def rk4_bloch(const double[::1] omegas, const double[::1] durations, double delta,
              double dt, v0):
    """Fixed-step RK4 for dr/dt = B x r with B = (omega_k, 0, delta) on segment k.

    Steps never straddle a segment boundary; the last step in each segment is
    shortened to land on it. Returns ``(times, states, segment_index)`` with the
    initial point included (segment index 0).
    """
    cdef Py_ssize_t k, nseg = omegas.shape[0], total_steps = 0, i, step, nsteps, idx
    counts = np.empty(nseg, dtype=np.int64)
    cdef cnp.int64_t[::1] cnt = counts
    for k in range(nseg):
        nsteps = <Py_ssize_t>ceil(durations[k] / dt * (1.0 - 1e-12))
        if nsteps < 1:
            nsteps = 1
        cnt[k] = nsteps
        total_steps += nsteps
    times_arr = np.empty(total_steps + 1, dtype=np.float64)
    states_arr = np.empty((total_steps + 1, 3), dtype=np.float64)
    seg_arr = np.empty(total_steps + 1, dtype=np.int64)
    cdef double[::1] times = times_arr
    cdef double[:, ::1] states = states_arr
    cdef cnp.int64_t[::1] seg = seg_arr
    cdef double x = v0[0], y = v0[1], z = v0[2]
    cdef double t0 = 0.0, h, om
    cdef double k1x, k1y, k1z, k2x, k2y, k2z, k3x, k3y, k3z, k4x, k4y, k4z
    cdef double ax, ay, az
    times[0] = 0.0
    states[0, 0] = x
    states[0, 1] = y
    states[0, 2] = z
    seg[0] = 0
    idx = 1
    with nogil:
        for k in range(nseg):
            om = omegas[k]
            nsteps = cnt[k]
            for step in range(nsteps):
                if step == nsteps - 1:
                    h = durations[k] - step * dt
                else:
                    h = dt
                # B x r = (-delta*y, delta*x - om*z, om*y)
                k1x = -delta * y
                k1y = delta * x - om * z
                k1z = om * y
                ax = x + 0.5 * h * k1x
                ay = y + 0.5 * h * k1y
                az = z + 0.5 * h * k1z
                k2x = -delta * ay
                k2y = delta * ax - om * az
                k2z = om * ay
                ax = x + 0.5 * h * k2x
                ay = y + 0.5 * h * k2y
                az = z + 0.5 * h * k2z
                k3x = -delta * ay
                k3y = delta * ax - om * az
                k3z = om * ay
                ax = x + h * k3x
                ay = y + h * k3y
                az = z + h * k3z
                k4x = -delta * ay
                k4y = delta * ax - om * az
                k4z = om * ay
                x = x + h * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
                y = y + h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
                z = z + h * (k1z + 2.0 * k2z + 2.0 * k3z + k4z) / 6.0
                if step == nsteps - 1:
                    times[idx] = t0 + durations[k]
                else:
                    times[idx] = t0 + (step + 1) * dt
                states[idx, 0] = x
                states[idx, 1] = y
                states[idx, 2] = z
                seg[idx] = k
                idx += 1
            t0 += durations[k]
    return times_arr, states_arr, seg_arr
