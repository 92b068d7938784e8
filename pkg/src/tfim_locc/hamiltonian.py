"""Transverse-field Ising chain restricted to a parity sector.

    H = -sum_i (sigma^x_i sigma^x_{i+1} + h sigma^z_i),   site N+1 -> 1.

In the z-basis the field term is diagonal, -h (N - 2 popcount(s)) for
label s, and each bond flips bits (i, i+1 mod N) with coefficient -1.
Bond flips preserve spin-flip parity, so the sector is invariant.

The primary representation is a matrix-free matvec (sector dimension is
2^21 at N = 22); a dense matrix is assembled independently for small
sectors so the two code paths can cross-validate each other.

For N = 2 the bond sum visits (1,2) and (2,1), so the single physical
bond is counted twice; this is kept as the literal term-by-term sum and
N >= 4 is used for physics runs.
"""

from dataclasses import dataclass

import numba
import numpy as np

from .errors import ShapeError, SizeError, ValidationError
from .spin_basis import SectorMap

DENSE_DIM_CAP = 1 << 13


@dataclass(frozen=True)
class HamiltonianSpec:
    """Chain size and field of the Ising Hamiltonian; coupling fixed at 1."""

    n_sites: int
    field: float
    coupling: float = 1.0
    boundary: str = "periodic"

    def __post_init__(self):
        if not isinstance(self.n_sites, (int, np.integer)) or self.n_sites < 2:
            raise ValidationError(f"n_sites must be an integer >= 2, got {self.n_sites!r}")
        if not np.isfinite(self.field):
            raise ValidationError(f"field must be finite, got {self.field!r}")
        if self.coupling != 1.0:
            raise ValidationError("coupling is fixed at 1; rescale the field instead")
        if self.boundary != "periodic":
            raise ValidationError(f"only periodic boundaries are supported, got {self.boundary!r}")


@numba.njit(cache=True)
def _bond_flip_matvec(labels, rank, diag, masks, v, out):
    # out[r] accumulates in a fixed order per element, so the result is
    # deterministic regardless of how callers parallelize over r-ranges.
    n_bonds = masks.shape[0]
    for r in range(labels.shape[0]):
        s = labels[r]
        acc = diag[r] * v[r]
        for b in range(n_bonds):
            acc -= v[rank[s ^ masks[b]]]
        out[r] = acc


def _bond_masks(n_sites: int) -> np.ndarray:
    return np.array(
        [(1 << i) | (1 << ((i + 1) % n_sites)) for i in range(n_sites)],
        dtype=np.int64,
    )


def _check_pair(spec: HamiltonianSpec, sector: SectorMap):
    if spec.n_sites != sector.n_sites:
        raise ShapeError(
            f"spec has {spec.n_sites} sites but sector has {sector.n_sites}"
        )


class SectorOperator:
    """Reusable H-apply for one (spec, sector) pair.

    Precomputes the diagonal and bond masks once so repeated matvecs
    (Krylov iterations) pay only the kernel cost.  Pure: distinct vectors
    may be applied concurrently.
    """

    def __init__(self, spec: HamiltonianSpec, sector: SectorMap):
        _check_pair(spec, sector)
        self.spec = spec
        self.sector = sector
        self.dim = sector.dim
        self._diag = -spec.field * (spec.n_sites - 2.0 * sector.site_popcounts)
        self._masks = _bond_masks(spec.n_sites)

    def apply(self, v: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.dim,):
            raise ShapeError(f"vector has shape {v.shape}, sector dimension is {self.dim}")
        if out is None:
            out = np.empty(self.dim, dtype=np.float64)
        _bond_flip_matvec(self.sector.labels, self.sector.rank, self._diag, self._masks, v, out)
        return out

    __call__ = apply


def apply_hamiltonian(spec: HamiltonianSpec, sector: SectorMap, v: np.ndarray) -> np.ndarray:
    """Return H @ v for a sector vector, without forming H."""
    return SectorOperator(spec, sector).apply(v)


def dense_matrix(spec: HamiltonianSpec, sector: SectorMap) -> np.ndarray:
    """Assemble the sector Hamiltonian as an explicit symmetric matrix.

    Independent of :func:`apply_hamiltonian` (direct index assembly, no
    matvec calls), so equality of the two is a meaningful test.  Capped
    at sector dimension 2^13.
    """
    _check_pair(spec, sector)
    dim = sector.dim
    if dim > DENSE_DIM_CAP:
        raise SizeError(f"sector dimension {dim} exceeds dense cap {DENSE_DIM_CAP}")
    h = np.zeros((dim, dim), dtype=np.float64)
    cols = np.arange(dim)
    h[cols, cols] = -spec.field * (spec.n_sites - 2.0 * sector.site_popcounts)
    for mask in _bond_masks(spec.n_sites):
        rows = sector.rank[sector.labels ^ mask]
        if np.any(rows < 0):
            raise ValidationError("bond flip left the sector; inconsistent SectorMap")
        np.add.at(h, (rows, cols), -1.0)
    return h
