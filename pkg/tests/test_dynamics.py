import math

import numpy as np
import pytest

from primecavity import (
    ConfigurationError,
    CouplingOperator,
    DriveConfig,
    MeasurementResult,
    WaveFunction,
    build_basis,
    build_coupling,
    excitation_probability,
    factorize,
    max_stable_dt,
    occupation_probabilities,
    propagate,
    readout_factorization,
    sample_measurement,
    vacuum_state,
)


def _uniform_setup(n_max, target, lam):
    basis = build_basis(n_max)
    coupling = build_coupling(basis, "star-uniform", lam)
    drive = DriveConfig.resonant(basis, target)
    return basis, coupling, drive


def test_free_evolution_phases():
    # zero coupling: moduli constant, phases advance as exp(-i E t)
    n = 16
    basis = build_basis(n)
    zero = CouplingOperator(model="star-uniform", strength=0.0,
                            matrix=np.zeros((n, n), dtype=complex))
    rng = np.random.default_rng(11)
    amp = rng.normal(size=n) + 1j * rng.normal(size=n)
    amp /= np.linalg.norm(amp)
    t_final = 7.0
    run = propagate(WaveFunction(amp.copy()), basis, zero,
                    DriveConfig(frequency=1.0, target=2), t_final, 1e-3)
    expected = amp * np.exp(-1j * basis.energy_vector * t_final)
    assert np.abs(run.final.amplitudes - expected).max() < 1e-8
    assert np.abs(np.abs(run.final.amplitudes) - np.abs(amp)).max() < 1e-10


def test_zero_time_returns_initial_state():
    basis, coupling, drive = _uniform_setup(8, 3, 1e-3)
    psi0 = vacuum_state(basis)
    run = propagate(psi0, basis, coupling, drive, 0.0, 1e-2)
    assert run.times.tolist() == [0.0]
    assert np.array_equal(run.final.amplitudes, psi0.amplitudes)


def test_dt_gate_names_maximum():
    basis, coupling, drive = _uniform_setup(24, 6, 1e-3)
    gate = max_stable_dt(basis, coupling)
    with pytest.raises(ConfigurationError) as err:
        propagate(vacuum_state(basis), basis, coupling, drive, 1.0, gate * 2)
    assert "maximum admissible dt" in str(err.value)
    assert f"{gate:.9g}" in str(err.value)


def test_norm_drift_and_integrator_order():
    basis, coupling, drive = _uniform_setup(24, 6, 1e-3)
    gate = max_stable_dt(basis, coupling)
    run_coarse = propagate(vacuum_state(basis), basis, coupling, drive, 10.0, gate)
    run_fine = propagate(vacuum_state(basis), basis, coupling, drive, 10.0, gate / 2)
    assert run_coarse.norm_drift <= 1e-9
    # halving dt must cut the drift at least 8x (the scheme is 4th order;
    # the norm defect itself shrinks like dt^5 per unit time)
    assert run_coarse.norm_drift / max(run_fine.norm_drift, 1e-17) >= 8.0


def test_propagation_is_deterministic():
    basis, coupling, drive = _uniform_setup(12, 3, 1e-3)
    dt = max_stable_dt(basis, coupling) / 4
    a = propagate(vacuum_state(basis), basis, coupling, drive, 9.0, dt)
    b = propagate(vacuum_state(basis), basis, coupling, drive, 9.0, dt)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.times, b.times)


def test_exact_matches_full_first_order():
    basis, coupling, drive = _uniform_setup(12, 3, 1e-3)
    t_final = 10.0
    run = propagate(vacuum_state(basis), basis, coupling, drive, t_final,
                    max_stable_dt(basis, coupling) / 4)
    p = occupation_probabilities(run.final)
    checked = 0
    for i in range(1, 12):
        if p[i] <= 1e-12:
            continue
        predicted = excitation_probability(i + 1, 3, t_final, 1e-3, counter_rotating=True)
        assert abs(p[i] - predicted) / p[i] <= 0.02, f"level {i + 1}"
        checked += 1
    assert checked >= 5


def test_first_order_discrepancy_shrinks_quadratically():
    # the star coupling has zero diagonal, so even-order corrections to the
    # excited amplitudes vanish and the leading error term scales as lambda^2:
    # halving lambda divides the worst relative discrepancy by about 4
    t_final = 10.0

    def worst_discrepancy(lam):
        basis, coupling, drive = _uniform_setup(12, 3, lam)
        run = propagate(vacuum_state(basis), basis, coupling, drive, t_final,
                        max_stable_dt(basis, coupling) / 8)
        p = occupation_probabilities(run.final)
        worst = 0.0
        for i in range(1, 12):
            if p[i] <= 1e-14:
                continue
            predicted = excitation_probability(i + 1, 3, t_final, lam, counter_rotating=True)
            worst = max(worst, abs(p[i] - predicted) / p[i])
        return worst

    ratio = worst_discrepancy(1e-3) / worst_discrepancy(5e-4)
    assert 3.0 <= ratio <= 5.0


def test_occupation_probabilities():
    basis = build_basis(6)
    assert occupation_probabilities(vacuum_state(basis)).tolist() == [1, 0, 0, 0, 0, 0]

    amp = np.zeros(6, dtype=complex)
    amp[1] = amp[2] = 1 / math.sqrt(2)
    p = occupation_probabilities(WaveFunction(amp))
    assert p[1] == pytest.approx(0.5, rel=1e-12)
    assert p[2] == pytest.approx(0.5, rel=1e-12)

    with pytest.raises(ValueError):
        occupation_probabilities(WaveFunction(amp * 2))


def test_propagated_probabilities_sum_to_one():
    basis, coupling, drive = _uniform_setup(24, 6, 1e-3)
    run = propagate(vacuum_state(basis), basis, coupling, drive, 20.0,
                    max_stable_dt(basis, coupling) / 4)
    p = occupation_probabilities(run.final)
    assert abs(p.sum() - 1.0) <= 2e-9


def test_sample_pure_state():
    basis = build_basis(14)
    amp = np.zeros(14, dtype=complex)
    amp[11] = 1.0  # pure state encoding 12
    result = sample_measurement(WaveFunction(amp), 1000, seed=5, target=12)
    assert result.counts == {12: 1000}
    assert result.readout.as_dict() == {2: 2, 3: 1}
    assert result.conditional_target_probability == 1.0
    assert not result.inconclusive


def test_sample_vacuum_is_inconclusive():
    basis = build_basis(8)
    result = sample_measurement(vacuum_state(basis), 500, seed=0, target=4)
    assert result.inconclusive
    assert result.readout is None
    assert result.conditional_target_probability is None
    assert result.counts == {1: 500}
    assert readout_factorization(result) is None


def test_sample_counts_always_total_shots():
    amp = np.zeros(10, dtype=complex)
    amp[0] = math.sqrt(0.7)
    amp[5] = math.sqrt(0.2)
    amp[6] = math.sqrt(0.1)
    for seed in range(5):
        result = sample_measurement(WaveFunction(amp), 777, seed=seed, target=6)
        assert sum(result.counts.values()) == 777


def test_sample_modal_readout_and_conditional():
    amp = np.zeros(10, dtype=complex)
    amp[0] = math.sqrt(0.90)   # vacuum
    amp[5] = math.sqrt(0.08)   # label 6, modal excited
    amp[3] = math.sqrt(0.02)   # label 4
    result = sample_measurement(WaveFunction(amp), 20_000, seed=3, target=6)
    assert result.readout == factorize(6)
    excited = result.counts.get(6, 0) + result.counts.get(4, 0)
    assert result.conditional_target_probability == result.counts[6] / excited
    assert readout_factorization(result) == factorize(6)


def test_sampling_determinism():
    amp = np.zeros(8, dtype=complex)
    amp[0] = math.sqrt(0.5)
    amp[2] = math.sqrt(0.3)
    amp[6] = math.sqrt(0.2)
    a = sample_measurement(WaveFunction(amp), 5000, seed=42, target=3)
    b = sample_measurement(WaveFunction(amp), 5000, seed=42, target=3)
    assert a == b
    c = sample_measurement(WaveFunction(amp), 5000, seed=43, target=3)
    assert c.counts != a.counts


def test_sample_validation():
    basis = build_basis(4)
    with pytest.raises(ValueError):
        sample_measurement(vacuum_state(basis), 0, seed=1)


def test_readout_factorization_passthrough():
    result = MeasurementResult(shots=10, counts={1: 1, 6: 9},
                               readout=factorize(6),
                               conditional_target_probability=1.0)
    assert readout_factorization(result) == factorize(6)


def test_propagate_dimension_checks():
    basis, coupling, drive = _uniform_setup(8, 3, 1e-3)
    other = build_basis(9)
    with pytest.raises(ValueError):
        propagate(vacuum_state(other), basis, coupling, drive, 1.0, 1e-3)
    with pytest.raises(ValueError):
        propagate(vacuum_state(basis), basis, coupling, drive, -1.0, 1e-3)
    with pytest.raises(ValueError):
        propagate(vacuum_state(basis), basis, coupling, drive, 1.0, -1e-3)
