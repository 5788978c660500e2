"""Physical problem parameters."""
from dataclasses import dataclass
import math


@dataclass(frozen=True)
class ProblemParams:
    """Detuning and maximum transverse amplitude, both in angular-frequency units.

    Attributes:
        detuning: Fixed longitudinal field, must be positive.
        omega_max: Upper bound of the transverse control, must be positive.
    """

    detuning: float
    omega_max: float

    def __post_init__(self):
        if not (self.detuning > 0 and math.isfinite(self.detuning)):
            raise ValueError(f"detuning must be positive and finite, got {self.detuning}")
        if not (self.omega_max > 0 and math.isfinite(self.omega_max)):
            raise ValueError(f"omega_max must be positive and finite, got {self.omega_max}")

    @classmethod
    def from_ratio(cls, ratio: float, detuning: float = 1.0) -> "ProblemParams":
        # omega_max is stored so that ratio reproduces the requested value exactly
        # whenever detuning is a power of two (including the default 1).
        return cls(detuning=detuning, omega_max=ratio * detuning)

    @property
    def ratio(self) -> float:
        return self.omega_max / self.detuning

    @property
    def on_frequency(self) -> float:
        """Total field magnitude sqrt(detuning^2 + omega_max^2) during an On pulse."""
        return math.hypot(self.detuning, self.omega_max)
