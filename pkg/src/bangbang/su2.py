"""Rotation algebra on the Bloch sphere.

Rotations are stored in axis-angle form and composed through unit
quaternions. A propagator exp(-i angle/2 axis.sigma) acts on Bloch vectors as
a right-handed rotation by ``angle`` about ``axis``; global phase is dropped,
so a rotation and its quaternion negative are the same object here.
"""
from dataclasses import dataclass
from enum import Enum
import math
from typing import NamedTuple, Sequence

import numpy as np

from .params import ProblemParams

TWO_PI = 2.0 * math.pi

_NORM_TOL = 1e-9


class Level(str, Enum):
    OFF = "Off"
    ON = "On"


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


NORTH_POLE = BlochVector(0.0, 0.0, 1.0)


class Amplitudes(NamedTuple):
    """Probability amplitudes, ``c1`` on |1> (north pole) and ``c0`` on |0>."""

    c1: complex
    c0: complex

    def norm(self) -> float:
        return math.sqrt(abs(self.c1) ** 2 + abs(self.c0) ** 2)


def _unit(v: Sequence[float]) -> tuple:
    n = math.sqrt(sum(c * c for c in v))
    if n == 0.0 or not math.isfinite(n):
        raise ValueError(f"rotation axis must be a nonzero finite vector, got {tuple(v)}")
    return tuple(float(c) / n for c in v)


@dataclass(frozen=True)
class Rotation:
    """Rotation by ``angle`` (radians, stored in [0, 2pi)) about unit ``axis``.

    Negative angles are folded into a flipped axis. Axes are normalised on
    construction.
    """

    axis: tuple
    angle: float

    def __post_init__(self):
        axis = _unit(self.axis)
        angle = float(self.angle)
        if angle < 0.0:
            axis = tuple(-c for c in axis)
            angle = -angle
        angle = math.fmod(angle, TWO_PI)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "angle", angle)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls((0.0, 0.0, 1.0), 0.0)

    @classmethod
    def from_quaternion(cls, q: Sequence[float]) -> "Rotation":
        """Build from (w, x, y, z); the sign is chosen so that angle lies in [0, pi]."""
        w, x, y, z = (float(c) for c in q)
        if w < 0.0:
            w, x, y, z = -w, -x, -y, -z
        s = math.sqrt(x * x + y * y + z * z)
        if s == 0.0:
            return cls.identity()
        return cls((x / s, y / s, z / s), 2.0 * math.atan2(s, w))

    @property
    def quaternion(self) -> np.ndarray:
        h = 0.5 * self.angle
        s = math.sin(h)
        return np.array([math.cos(h), s * self.axis[0], s * self.axis[1], s * self.axis[2]])

    def matrix(self) -> np.ndarray:
        """3x3 orthogonal matrix of the Bloch-vector action."""
        w, x, y, z = self.quaternion
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
                [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
                [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
            ]
        )

    def su2(self) -> np.ndarray:
        """2x2 unitary cos(a/2) I - i sin(a/2) n.sigma in the (c1, c0) basis."""
        c = math.cos(0.5 * self.angle)
        s = math.sin(0.5 * self.angle)
        nx, ny, nz = self.axis
        return np.array(
            [
                [c - 1j * nz * s, (-1j * nx - ny) * s],
                [(-1j * nx + ny) * s, c + 1j * nz * s],
            ]
        )

    def inverse(self) -> "Rotation":
        return Rotation(tuple(-c for c in self.axis), self.angle)

    def canonical(self) -> "Rotation":
        """Same action with angle in [0, pi]."""
        return Rotation.from_quaternion(self.quaternion)

    def same_action(self, other: "Rotation", atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.matrix(), other.matrix(), rtol=0.0, atol=atol))


@dataclass(frozen=True)
class FieldSegment:
    """Constant-amplitude pulse: Off has amplitude 0, On has the control bound."""

    level: Level
    duration: float
    amplitude: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "level", Level(self.level))
        if not (self.duration >= 0.0 and math.isfinite(self.duration)):
            raise ValueError(f"segment duration must be finite and >= 0, got {self.duration}")
        if self.level is Level.OFF and self.amplitude != 0.0:
            raise ValueError("Off segments carry zero amplitude")
        if self.level is Level.ON and not self.amplitude > 0.0:
            raise ValueError("On segments need a positive amplitude")

    @classmethod
    def on(cls, duration: float, params: ProblemParams) -> "FieldSegment":
        return cls(Level.ON, duration, params.omega_max)

    @classmethod
    def off(cls, duration: float) -> "FieldSegment":
        return cls(Level.OFF, duration, 0.0)


def build_sequence(segments) -> tuple:
    """Freeze a segment iterable into a tuple, dropping zero-length entries."""
    return tuple(seg for seg in segments if seg.duration > 0.0)


def amplitudes_to_bloch(a: Amplitudes) -> BlochVector:
    c1, c0 = complex(a.c1), complex(a.c0)
    norm2 = abs(c1) ** 2 + abs(c0) ** 2
    if abs(norm2 - 1.0) > _NORM_TOL:
        raise ValueError(f"amplitudes not normalised: |c1|^2 + |c0|^2 = {norm2}")
    p = c1 * c0.conjugate()
    return BlochVector(2.0 * p.real, -2.0 * p.imag, abs(c1) ** 2 - abs(c0) ** 2)


def segment_axis(seg: FieldSegment, params: ProblemParams) -> tuple:
    if seg.level is Level.OFF:
        return (0.0, 0.0, 1.0)
    w = math.hypot(params.detuning, seg.amplitude)
    return (seg.amplitude / w, 0.0, params.detuning / w)


def segment_frequency(seg: FieldSegment, params: ProblemParams) -> float:
    """Rotation rate |B| during the segment."""
    if seg.level is Level.OFF:
        return params.detuning
    return math.hypot(params.detuning, seg.amplitude)


def segment_rotation(seg: FieldSegment, params: ProblemParams) -> Rotation:
    return Rotation(segment_axis(seg, params), seg.duration * segment_frequency(seg, params))


def segment_propagator(seg: FieldSegment, params: ProblemParams) -> np.ndarray:
    """2x2 propagator of the segment, built directly from the Hamiltonian entries."""
    w = segment_frequency(seg, params)
    nx = seg.amplitude / w
    nz = params.detuning / w
    g = 0.5 * w * seg.duration
    c, s = math.cos(g), math.sin(g)
    return np.array([[c - 1j * nz * s, -1j * nx * s], [-1j * nx * s, c + 1j * nz * s]])


def _qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def compose(second: Rotation, first: Rotation) -> Rotation:
    """Single rotation equal to applying ``first`` and then ``second``."""
    return Rotation.from_quaternion(_qmul(second.quaternion, first.quaternion))


def compose_all(rotations) -> Rotation:
    """Compose in application order: the first element acts first."""
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for rot in rotations:
        q = _qmul(rot.quaternion, q)
    return Rotation.from_quaternion(q)


def sequence_rotation(sequence, params: ProblemParams) -> Rotation:
    return compose_all(segment_rotation(seg, params) for seg in sequence)


def apply(rot: Rotation, v) -> BlochVector:
    n = np.asarray(rot.axis)
    u = np.asarray(v, dtype=float)
    c, s = math.cos(rot.angle), math.sin(rot.angle)
    out = u * c + np.cross(n, u) * s + n * np.dot(n, u) * (1.0 - c)
    return BlochVector(*(float(t) for t in out))


def rotate_many(axis, angles, v) -> np.ndarray:
    """Rotate one vector about a fixed axis by each entry of ``angles``; shape (N, 3)."""
    n = np.asarray(axis, dtype=float)
    u = np.asarray(v, dtype=float)
    a = np.asarray(angles, dtype=float)[:, None]
    c, s = np.cos(a), np.sin(a)
    return u * c + np.cross(n, u) * s + n * np.dot(n, u) * (1.0 - c)
