import numpy as np
import pytest

from tfim_locc import (
    HamiltonianSpec,
    ShapeError,
    SizeError,
    ValidationError,
    apply_hamiltonian,
    build_sector_map,
    dense_matrix,
)


def test_two_site_even_matrix():
    # direct term-by-term expansion: diag -h(N - 2 popcount), bond counted twice
    for h in (0.3, 1.0, 2.5):
        sector = build_sector_map(2, "even")
        m = dense_matrix(HamiltonianSpec(2, h), sector)
        assert np.array_equal(m, np.array([[-2.0 * h, -2.0], [-2.0, 2.0 * h]]))


def test_two_site_eigenvalues_analytic():
    m = dense_matrix(HamiltonianSpec(2, 1.0), build_sector_map(2, "even"))
    evals = np.linalg.eigvalsh(m)
    assert evals == pytest.approx([-2.0 * np.sqrt(2.0), 2.0 * np.sqrt(2.0)], abs=1e-12)


def test_indicator_image_all_up():
    # at h=1 the all-up label contributes diagonal -N; each bond flip image -1.
    # at h=0 the diagonal vanishes entirely (field term only).
    sector = build_sector_map(4, "even")
    v = np.zeros(sector.dim)
    r0 = sector.rank_of(0)
    v[r0] = 1.0
    images = [sector.rank_of(lbl) for lbl in (0b0011, 0b0110, 0b1100, 0b1001)]

    w = apply_hamiltonian(HamiltonianSpec(4, 1.0), sector, v)
    expected = np.zeros(sector.dim)
    expected[r0] = -4.0
    for r in images:
        expected[r] -= 1.0
    assert np.array_equal(w, expected)

    w0 = apply_hamiltonian(HamiltonianSpec(4, 0.0), sector, v)
    expected[r0] = 0.0
    assert np.array_equal(w0, expected)


def test_classical_limit_minimum_eigenvalue():
    m = dense_matrix(HamiltonianSpec(4, 0.0), build_sector_map(4, "even"))
    assert np.linalg.eigvalsh(m)[0] == pytest.approx(-4.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_matvec_columns_assemble_dense(n):
    # brute-force column-by-column comparison of the two code paths
    sector = build_sector_map(n, "even")
    spec = HamiltonianSpec(n, 1.3)
    dense = dense_matrix(spec, sector)
    columns = np.empty_like(dense)
    e = np.zeros(sector.dim)
    for j in range(sector.dim):
        e[j] = 1.0
        columns[:, j] = apply_hamiltonian(spec, sector, e)
        e[j] = 0.0
    assert np.array_equal(columns, dense)


def test_dense_matrix_symmetric():
    m = dense_matrix(HamiltonianSpec(8, 0.7), build_sector_map(8, "even"))
    assert np.array_equal(m, m.T)


def test_linearity_randomized():
    sector = build_sector_map(10, "even")
    spec = HamiltonianSpec(10, 1.7)
    rng = np.random.default_rng(42)
    for _ in range(5):
        u = rng.standard_normal(sector.dim)
        v = rng.standard_normal(sector.dim)
        a, b = rng.standard_normal(2)
        lhs = apply_hamiltonian(spec, sector, a * u + b * v)
        rhs = a * apply_hamiltonian(spec, sector, u) + b * apply_hamiltonian(spec, sector, v)
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(rhs)))


def test_symmetry_randomized():
    sector = build_sector_map(10, "even")
    spec = HamiltonianSpec(10, 0.9)
    rng = np.random.default_rng(43)
    for _ in range(5):
        u = rng.standard_normal(sector.dim)
        v = rng.standard_normal(sector.dim)
        assert np.dot(u, apply_hamiltonian(spec, sector, v)) == pytest.approx(
            np.dot(apply_hamiltonian(spec, sector, u), v), rel=1e-12, abs=1e-12
        )


@pytest.mark.parametrize("h", [0.0, 0.5, 1.0, 2.5])
def test_variational_bound(h):
    # product state all-up and the x-aligned cat state are witnesses
    m = dense_matrix(HamiltonianSpec(8, h), build_sector_map(8, "even"))
    assert np.linalg.eigvalsh(m)[0] <= -8.0 * max(1.0, h) + 1e-9


def test_shape_errors():
    sector = build_sector_map(4, "even")
    with pytest.raises(ShapeError):
        apply_hamiltonian(HamiltonianSpec(4, 1.0), sector, np.zeros(sector.dim + 1))
    with pytest.raises(ShapeError):
        apply_hamiltonian(HamiltonianSpec(6, 1.0), sector, np.zeros(sector.dim))


def test_dense_cap():
    sector = build_sector_map(15, "even")
    with pytest.raises(SizeError):
        dense_matrix(HamiltonianSpec(15, 1.0), sector)


def test_spec_validation():
    with pytest.raises(ValidationError):
        HamiltonianSpec(1, 1.0)
    with pytest.raises(ValidationError):
        HamiltonianSpec(4, float("nan"))
    with pytest.raises(ValidationError):
        HamiltonianSpec(4, 1.0, coupling=2.0)
    with pytest.raises(ValidationError):
        HamiltonianSpec(4, 1.0, boundary="open")
