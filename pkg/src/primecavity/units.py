"""Unit system: every energy in the model is a multiple of hbar*omega."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Units:
    """Planck constant and base mode frequency; defaults are natural units."""

    hbar: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0 or self.omega <= 0:
            raise ValueError("hbar and omega must both be positive")

    @property
    def energy_scale(self) -> float:
        return self.hbar * self.omega
