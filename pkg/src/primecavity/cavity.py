"""Truncated state space, diagonal Hamiltonian, and vacuum-coupling operators.

The basis holds one label per integer 1..n_max; the Hamiltonian is diagonal
with entries hbar*omega*log(N). The drive operators are "star" shaped: only
vacuum <-> excited matrix elements are nonzero, which is the minimal operator
reaching every level from the vacuum. Excited-excited couplings and diagonal
shifts are deliberately absent (a diagonal part would only shift levels at
second order and muddy the first-order comparison).

Everything here is immutable after construction and safe to share across
threads; construction itself is single-threaded.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .encoding import OccupationVector, SpectrumTable, factorize
from .errors import ConfigurationError
from .units import Units

COUPLING_MODELS = ("star-uniform", "star-decay")


@dataclass(frozen=True)
class CavityBasis:
    """Labels 1..n_max with their mode occupations and level energies."""

    n_max: int
    units: Units
    occupations: tuple[OccupationVector, ...]
    spectrum: SpectrumTable

    @property
    def dimension(self) -> int:
        return self.n_max

    @property
    def labels(self) -> range:
        return range(1, self.n_max + 1)

    def occupation(self, label: int) -> OccupationVector:
        if not 1 <= label <= self.n_max:
            raise ValueError(f"label {label} outside 1..{self.n_max}")
        return self.occupations[label - 1]

    def energy(self, label: int) -> float:
        return self.spectrum.energy(label)

    @property
    def energy_vector(self) -> np.ndarray:
        """Diagonal of the Hamiltonian; position i holds E_{i+1}."""
        return self.spectrum.energies[1:]


def build_basis(n_max: int, units: Units = Units()) -> CavityBasis:
    """Basis over 1..n_max. Pick n_max >= 2*target for dynamics: off-resonant
    amplitudes fall as 1/detuning^2, so that margin controls truncation error.
    """
    if n_max < 2:
        raise ValueError(f"need the vacuum plus one excited level (got n_max={n_max})")
    occs = tuple(factorize(n) for n in range(1, n_max + 1))
    # every prime factor of N <= n_max is itself <= n_max, so all modes fit
    spectrum = SpectrumTable.build(n_max, units)
    return CavityBasis(n_max=n_max, units=units, occupations=occs, spectrum=spectrum)


@dataclass(frozen=True)
class CouplingOperator:
    """Hermitian transition operator with zero diagonal over a CavityBasis.

    matrix[i, j] is the element between labels i+1 and j+1. Hermiticity and
    the zero diagonal are enforced at construction; reachability (nonzero
    vacuum row) is a separate check so that deliberately broken operators can
    be built and then rejected.
    """

    model: str
    strength: float
    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"coupling matrix must be square, got shape {m.shape}")
        if self.strength < 0:
            raise ValueError("coupling strength must be non-negative")
        if not np.array_equal(m, m.conj().T):
            raise ValueError("coupling matrix must be exactly Hermitian")
        if np.any(m.diagonal() != 0):
            raise ValueError("coupling diagonal must vanish (pure transition operator)")
        m.setflags(write=False)

    @property
    def n_max(self) -> int:
        return self.matrix.shape[0]

    @property
    def vacuum_row(self) -> np.ndarray:
        """Elements <vacuum|W|N> by position N-1 (position 0 is the zero diagonal)."""
        return self.matrix[0]

    def vacuum_coupling(self, label: int) -> complex:
        if not 2 <= label <= self.n_max:
            raise ValueError(f"excited labels run 2..{self.n_max}, got {label}")
        return complex(self.matrix[0, label - 1])


def build_coupling(basis: CavityBasis, model: str, strength: float) -> CouplingOperator:
    """Star coupling of the given model and strength.

    star-uniform: <1|W|N> = strength for every N >= 2, so the first-order
    prefactor is level-independent and the sinc resonance shape is isolated.
    star-decay: <1|W|N> = strength/sqrt(N), a robustness variant probing
    whether a falling coupling changes the scaling conclusions.
    """
    if strength <= 0:
        raise ValueError(f"coupling strength must be positive (got {strength})")
    n = basis.n_max
    w = np.zeros((n, n), dtype=complex)
    if model == "star-uniform":
        w[0, 1:] = strength
    elif model == "star-decay":
        w[0, 1:] = strength / np.sqrt(np.arange(2, n + 1, dtype=float))
    else:
        raise ConfigurationError(
            f"unknown coupling model {model!r}; choose one of {COUPLING_MODELS}"
        )
    w[1:, 0] = np.conj(w[0, 1:])
    return CouplingOperator(model=model, strength=strength, matrix=w)


def verify_reachability(coupling: CouplingOperator) -> bool:
    """True iff the vacuum couples to every excited level in the basis."""
    return bool(np.all(coupling.matrix[0, 1:] != 0))


@dataclass(frozen=True)
class DriveConfig:
    """Periodic drive: frequency Omega and the level it is meant to prepare."""

    frequency: float
    target: int

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError("drive frequency must be positive")
        if self.target < 2:
            raise ValueError("the drive targets an excited level (label >= 2)")

    @classmethod
    def resonant(cls, basis: CavityBasis, target: int) -> "DriveConfig":
        """Tune the drive onto the vacuum -> target transition, Omega = omega*log(target)."""
        if not 2 <= target <= basis.n_max:
            raise ValueError(f"target {target} outside excited range 2..{basis.n_max}")
        return cls(frequency=basis.units.omega * math.log(target), target=target)


def write_matrix_csv(matrix: np.ndarray, path) -> None:
    """Dense row-major debug dump; each complex entry becomes adjacent re,im fields."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.atleast_2d(matrix):
            flat = []
            for z in row:
                z = complex(z)
                flat.append(format(z.real, ".17g"))
                flat.append(format(z.imag, ".17g"))
            writer.writerow(flat)
