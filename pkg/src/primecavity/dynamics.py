"""Exact propagation of the driven cavity and simulated photon counting.

Integrates i*hbar dpsi/dt = (H0 + W cos(Omega t)) psi with fixed-step RK4 on
the truncated basis. The full cosine drive is kept (no rotating-wave
approximation) so the closed-form first-order results are genuinely tested
instead of assumed. Norm drift is a measured error signal: the state is never
renormalized, and drift past tolerance raises instead of being hidden.

Measurement draws multinomial photon-count shots from the Born weights.
First-order driving leaves most of the population in the vacuum, so readout
post-selects on non-vacuum shots; an all-vacuum record is reported as
inconclusive rather than raised.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cavity import CavityBasis, CouplingOperator, DriveConfig
from .encoding import OccupationVector, factorize
from .errors import ConfigurationError, PropagationError

STABILITY_NUMBER = 0.05  # max admissible dt * (max|E| + lambda) / hbar
NORM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class WaveFunction:
    """Complex amplitudes over basis labels; position i holds label i+1."""

    amplitudes: np.ndarray

    @property
    def dimension(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def vacuum_state(basis: CavityBasis) -> WaveFunction:
    amp = np.zeros(basis.n_max, dtype=complex)
    amp[0] = 1.0
    return WaveFunction(amp)


@dataclass(frozen=True)
class Trajectory:
    """Sampled states of one propagation run; states[k] belongs to times[k]."""

    times: np.ndarray
    states: np.ndarray

    @property
    def final(self) -> WaveFunction:
        return WaveFunction(self.states[-1])

    @property
    def norm_drift(self) -> float:
        """Worst deviation of any sampled norm from one."""
        return float(np.abs(np.linalg.norm(self.states, axis=1) - 1.0).max())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.states) ** 2


def max_stable_dt(basis: CavityBasis, coupling: CouplingOperator) -> float:
    """Largest step admitted by the gate dt*(max|E| + lambda)/hbar <= 0.05.

    The gate bounds the step against the fastest phase in the problem; it is
    a stability/accuracy floor, not a drift guarantee. Runs that need norm
    drift near 1e-9 over long horizons should step 2x-8x finer.
    """
    scale = float(basis.energy_vector[-1]) + coupling.strength
    return STABILITY_NUMBER * basis.units.hbar / scale


def propagate(
    psi0: WaveFunction,
    basis: CavityBasis,
    coupling: CouplingOperator,
    drive: DriveConfig,
    t_final: float,
    dt: float,
    sample_stride: int = 1,
    norm_tol: float = NORM_TOLERANCE,
) -> Trajectory:
    """Fixed-step RK4 run from t=0 to t_final; deterministic.

    Stores every sample_stride-th step plus the final state. dt is reduced to
    divide t_final evenly, never enlarged. Raises ConfigurationError when dt
    violates the step gate (the message names the maximum admissible dt) and
    PropagationError when the sampled norm drifts past norm_tol.
    """
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    if psi0.dimension != basis.n_max or coupling.n_max != basis.n_max:
        raise ValueError("state, coupling, and basis dimensions must agree")
    if not 2 <= drive.target <= basis.n_max:
        raise ValueError(f"drive target {drive.target} outside basis 1..{basis.n_max}")
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")

    if t_final == 0:
        times = np.array([0.0])
        states = psi0.amplitudes[None, :].copy()
        return Trajectory(times=times, states=states)

    if dt <= 0:
        raise ValueError("dt must be positive")
    gate = max_stable_dt(basis, coupling)
    if dt > gate * (1 + 1e-12):
        raise ConfigurationError(
            f"dt={dt:g} violates the step gate; maximum admissible dt is {gate:.9g}"
        )

    steps = max(1, math.ceil(t_final / dt - 1e-12))
    h = t_final / steps

    energies = np.asarray(basis.energy_vector, dtype=float)
    w = coupling.matrix
    omega_drive = drive.frequency
    inv_hbar = 1.0 / basis.units.hbar

    if np.any(w[1:, 1:]):
        def apply_w(y):
            return w @ y
    else:
        # star operator: one dot product and one scale instead of a matmul
        row = w[0]
        col = np.conj(row)

        def apply_w(y):
            out = col * y[0]
            out[0] = row @ y
            return out

    def deriv(t, y):
        return (-1j * inv_hbar) * (energies * y + math.cos(omega_drive * t) * apply_w(y))

    psi = psi0.amplitudes.astype(complex, copy=True)
    sample_times = [0.0]
    sample_states = [psi.copy()]
    t = 0.0
    for k in range(1, steps + 1):
        k1 = deriv(t, psi)
        k2 = deriv(t + 0.5 * h, psi + (0.5 * h) * k1)
        k3 = deriv(t + 0.5 * h, psi + (0.5 * h) * k2)
        k4 = deriv(t + h, psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = k * h
        if k % sample_stride == 0 or k == steps:
            sample_times.append(t)
            sample_states.append(psi.copy())

    trajectory = Trajectory(times=np.array(sample_times), states=np.array(sample_states))
    drift = trajectory.norm_drift
    if drift > norm_tol:
        raise PropagationError(
            f"norm drift {drift:.3e} exceeds tolerance {norm_tol:g}; reduce dt below {h:.3e}"
        )
    return trajectory


def occupation_probabilities(psi: WaveFunction) -> np.ndarray:
    """Born weights |c_N|^2 by position N-1; requires a normalized state."""
    if abs(psi.norm() - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"state norm {psi.norm():.12f} is not 1 within {NORM_TOLERANCE:g}")
    return np.abs(psi.amplitudes) ** 2


@dataclass(frozen=True)
class MeasurementResult:
    """Photon-count record of repeated shots on one prepared state.

    counts maps label -> shots that read that label (zero entries omitted).
    readout is the occupation of the most frequent non-vacuum label, None when
    every shot landed on the vacuum (inconclusive, by post-selection).
    """

    shots: int
    counts: dict[int, int]
    readout: OccupationVector | None
    conditional_target_probability: float | None

    @property
    def inconclusive(self) -> bool:
        return self.readout is None


def sample_measurement(
    psi: WaveFunction, shots: int, seed: int, target: int | None = None
) -> MeasurementResult:
    """Draw multinomial shots from the Born weights; bit-reproducible per seed.

    Ties in the modal non-vacuum label resolve to the smallest label. When a
    target label is given, conditional_target_probability is its share of the
    non-vacuum shots.
    """
    if shots < 1:
        raise ValueError("need at least one shot")
    p = occupation_probabilities(psi)
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p / p.sum())  # normalize away float residue
    counts = {i + 1: int(c) for i, c in enumerate(draws) if c}

    excited_total = shots - int(draws[0])
    if excited_total == 0:
        return MeasurementResult(
            shots=shots, counts=counts, readout=None, conditional_target_probability=None
        )
    modal_label = int(np.argmax(draws[1:])) + 2
    conditional = None
    if target is not None:
        conditional = counts.get(target, 0) / excited_total
    return MeasurementResult(
        shots=shots,
        counts=counts,
        readout=factorize(modal_label),
        conditional_target_probability=conditional,
    )


def readout_factorization(result: MeasurementResult) -> OccupationVector | None:
    """Occupation of the modal excited label; None propagates an inconclusive run."""
    return result.readout
