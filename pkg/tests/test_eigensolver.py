import numpy as np
import pytest

from tfim_locc import (
    ConvergenceError,
    GroundState,
    HamiltonianSpec,
    SolverOptions,
    ValidationError,
    build_sector_map,
    dense_matrix,
    free_fermion_ground_energy,
    ground_state,
    reduced_spectrum,
)


def _analytic_sum(n, h):
    # independent evaluation of the antiperiodic-momentum sum
    return -sum(
        np.sqrt(1.0 + h * h - 2.0 * h * np.cos((2 * m + 1) * np.pi / n))
        for m in range(n)
    )


def test_two_site_energy_analytic():
    state = ground_state(HamiltonianSpec(2, 1.0))
    assert state.energy == pytest.approx(-2.0 * np.sqrt(2.0), abs=1e-12)


def test_classical_limit_cat_state():
    # h=0 ground state in the even sector is the x-aligned cat state:
    # uniform amplitudes over all even-popcount labels
    state = ground_state(HamiltonianSpec(4, 0.0))
    assert state.energy == pytest.approx(-4.0, abs=1e-10)
    assert np.allclose(state.amplitudes, 1.0 / np.sqrt(8.0), atol=1e-9)


def test_eight_site_critical_energy():
    state = ground_state(HamiltonianSpec(8, 1.0))
    assert state.energy == pytest.approx(-10.251661790966, abs=1e-9)
    assert state.energy == pytest.approx(_analytic_sum(8, 1.0), abs=1e-9)


def test_free_fermion_trivial_values():
    for n in (2, 4, 8, 14):
        assert free_fermion_ground_energy(n, 0.0) == pytest.approx(-float(n), abs=1e-12)
    assert free_fermion_ground_energy(2, 1.0) == pytest.approx(-2.0 * np.sqrt(2.0), abs=1e-12)
    assert free_fermion_ground_energy(8, 1.0) == pytest.approx(-10.2517, abs=5e-5)


def test_free_fermion_continuum_limit():
    # per-site energy at h=1 approaches -4/pi from below as N grows
    per_site = free_fermion_ground_energy(512, 1.0) / 512
    assert per_site == pytest.approx(-4.0 / np.pi, abs=1e-4)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 12])
def test_oracle_validated_against_dense(n):
    # the analytic oracle itself must match dense diagonalization before
    # it is trusted at sizes the dense path cannot reach
    sector = build_sector_map(n, "even")
    for h in (0.0, 0.5, 1.0, 1.7, 2.5):
        dense_e0 = np.linalg.eigvalsh(dense_matrix(HamiltonianSpec(n, h), sector))[0]
        assert abs(dense_e0 - free_fermion_ground_energy(n, h)) / n < 1e-9


@pytest.mark.parametrize("n,h", [(6, 0.8), (10, 1.9)])
def test_dense_and_krylov_agree(n, h):
    spec = HamiltonianSpec(n, h)
    krylov = ground_state(spec)
    dense = ground_state(spec, SolverOptions(prefer_dense=True))
    assert dense.method == "dense"
    assert krylov.method == "krylov"
    assert krylov.energy == pytest.approx(dense.energy, rel=1e-10)
    for block in [(0, 1), tuple(range(n // 2))]:
        lam_k = reduced_spectrum(krylov, block).lambdas
        lam_d = reduced_spectrum(dense, block).lambdas
        assert np.max(np.abs(lam_k - lam_d)) < 1e-9


def test_residual_meets_tolerance():
    opts = SolverOptions(tolerance=1e-12)
    state = ground_state(HamiltonianSpec(12, 1.0), opts)
    assert state.residual_norm <= 1e-12 * max(1.0, abs(state.energy))
    assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-12


def test_energy_monotone_in_field():
    energies = [ground_state(HamiltonianSpec(8, h)).energy for h in np.arange(0.5, 2.51, 0.1)]
    assert np.all(np.diff(energies) <= 1e-12)


def test_deterministic_bit_identical():
    opts = SolverOptions(seed=77)
    a = ground_state(HamiltonianSpec(10, 1.1), opts)
    b = ground_state(HamiltonianSpec(10, 1.1), opts)
    assert a.energy == b.energy
    assert a.residual_norm == b.residual_norm
    assert a.iterations == b.iterations
    assert np.array_equal(a.amplitudes, b.amplitudes)


def test_sign_convention():
    state = ground_state(HamiltonianSpec(8, 1.5))
    assert state.amplitudes[np.argmax(np.abs(state.amplitudes))] > 0


def test_nonconvergence_error_carries_diagnostics():
    with pytest.raises(ConvergenceError) as info:
        ground_state(HamiltonianSpec(12, 1.0), SolverOptions(max_iterations=3))
    assert info.value.best_residual is not None
    assert info.value.best_residual > 0
    assert info.value.iterations is not None


def test_gap_warning_on_near_degeneracy(monkeypatch):
    import tfim_locc.eigensolver as solver_module

    def tiny_gap_matrix(spec, sector):
        return np.diag([-10.0, -10.0 + 1e-9, 3.0])

    monkeypatch.setattr(solver_module, "dense_matrix", tiny_gap_matrix)
    state = ground_state(HamiltonianSpec(2, 1.0), SolverOptions(prefer_dense=True))
    assert state.warning is not None
    assert "gap" in state.warning


def test_options_validation():
    with pytest.raises(ValidationError):
        SolverOptions(tolerance=0.0)
    with pytest.raises(ValidationError):
        SolverOptions(max_iterations=0)
    with pytest.raises(ValidationError):
        free_fermion_ground_energy(8, -0.5)


def test_ground_state_record_fields():
    state = ground_state(HamiltonianSpec(6, 1.2))
    assert isinstance(state, GroundState)
    assert state.n_sites == 6
    assert state.field == 1.2
    assert state.gap > 0
    assert state.warning is None
