"""Reduced spectra of ground states and Renyi entropies.

The reduced density matrix of a contiguous site block is never formed on
the large side: the sector state is scattered into the 2^L x 2^(N-L)
coefficient matrix G and the spectrum is taken from the Gram matrix on
the smaller side (at most 2048 x 2048 for the sizes treated here).

Renyi entropies use log base 2.  Eigenvalues at or below 1e-12 are
treated as numerical zeros everywhere; this fixes the rank entering the
alpha -> 0 limit and keeps small-alpha entropies free of noise from
eigenvalues that are exact zeros in theory.
"""

from dataclasses import dataclass

import math

import numpy as np

from .eigensolver import GroundState
from .errors import ShapeError, UnsupportedBlockError, ValidationError
from .spin_basis import build_sector_map

EIGENVALUE_FLOOR = 1e-12
NEGATIVE_EIGENVALUE_TOL = -1e-12
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class ReducedSpectrum:
    """Descending eigenvalues of a block reduced density matrix.

    lambdas has length 2^min(L, N-L) (zeros included) and trace is the
    eigenvalue sum before clamping, which must be 1 within 1e-10.
    Spectra are invariant under translating the block around the
    periodic chain.
    """

    n_sites: int
    field: float
    block: tuple[int, ...]
    lambdas: np.ndarray
    trace: float


@dataclass(frozen=True)
class RenyiCurve:
    """Renyi entropies over an alpha grid plus the three limit values.

    alphas excludes exactly 1; s_vn, s_zero and s_inf carry the
    alpha -> 1, alpha -> 0 and alpha -> infinity limits.
    """

    alphas: tuple[float, ...]
    values: tuple[float, ...]
    s_vn: float
    s_zero: float
    s_inf: float


def _validate_block(block, n_sites: int) -> tuple[int, ...]:
    block = tuple(int(s) for s in block)
    if not block:
        raise ShapeError("block must contain at least one site")
    if any(s < 0 or s >= n_sites for s in block):
        raise UnsupportedBlockError(f"block sites {block} outside chain of {n_sites} sites")
    if any(b - a != 1 for a, b in zip(block, block[1:])):
        raise UnsupportedBlockError(
            f"block {block} is not a contiguous ascending site run"
        )
    if len(block) >= n_sites:
        raise ShapeError(f"block length must be <= {n_sites - 1}, got {len(block)}")
    return block


def reduced_spectrum(state: GroundState, block) -> ReducedSpectrum:
    """Eigenvalues of the reduced density matrix of ``block``, descending.

    ``block`` must be a contiguous ascending run of sites, length
    1 <= L <= N-1.  The spectrum is computed from G G^T (or G^T G,
    whichever side is smaller), where G is the coefficient matrix of the
    state under the block / rest bit split.
    """
    n = state.n_sites
    block = _validate_block(block, n)
    start, length = block[0], len(block)

    # Scatter sector amplitudes into the coefficient matrix: row index is
    # the block bits, column index the remaining bits (low | high).
    labels = build_sector_map(n, "even").labels
    block_mask = (1 << length) - 1
    rows = (labels >> start) & block_mask
    low = labels & ((1 << start) - 1)
    high = labels >> (start + length)
    cols = low | (high << start)

    g = np.zeros((1 << length, 1 << (n - length)), dtype=np.float64)
    g[rows, cols] = state.amplitudes

    gram = g @ g.T if length <= n - length else g.T @ g
    lams = np.linalg.eigvalsh(gram)[::-1]

    trace = float(np.sum(lams))
    if abs(trace - 1.0) > TRACE_TOL:
        raise ValidationError(f"reduced spectrum trace {trace!r} deviates from 1 beyond {TRACE_TOL:g}")
    if lams[-1] < NEGATIVE_EIGENVALUE_TOL:
        raise ValidationError(
            f"reduced spectrum has eigenvalue {lams[-1]!r} below {NEGATIVE_EIGENVALUE_TOL:g}"
        )
    lams = np.clip(lams, 0.0, None)
    lams.setflags(write=False)
    return ReducedSpectrum(
        n_sites=n,
        field=state.field,
        block=block,
        lambdas=lams,
        trace=trace,
    )


def _as_lambdas(spectrum) -> np.ndarray:
    if isinstance(spectrum, ReducedSpectrum):
        return spectrum.lambdas
    return np.asarray(spectrum, dtype=np.float64)


def renyi_entropy(spectrum, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` in bits.

    alpha = 1 gives the von Neumann entropy, alpha = 0 the log2 of the
    rank (eigenvalues above the 1e-12 floor), alpha = inf the min
    entropy -log2(lambda_max).  Accepts a ReducedSpectrum or a plain
    probability vector.
    """
    if not alpha >= 0:
        raise ValidationError(f"alpha must be >= 0, got {alpha!r}")
    lams = _as_lambdas(spectrum)
    lams = lams[lams > EIGENVALUE_FLOOR]
    if lams.size == 0:
        raise ValidationError("spectrum has no eigenvalue above the zero floor")
    if math.isinf(alpha):
        return float(-np.log2(np.max(lams)))
    if alpha == 0:
        return float(np.log2(lams.size))
    if alpha == 1:
        return float(-np.sum(lams * np.log2(lams)))
    return float(np.log2(np.sum(lams ** alpha)) / (1.0 - alpha))


def default_alpha_grid() -> tuple[float, ...]:
    """60 log-spaced orders in [0.05, 5] plus 10 and 50.

    Crossings of interest occur at moderate alpha; the 0, 1 and inf
    limits are tracked separately by RenyiCurve.
    """
    return tuple(float(a) for a in np.geomspace(0.05, 5.0, 60)) + (10.0, 50.0)


def renyi_curve(spectrum, alphas=None) -> RenyiCurve:
    """Evaluate Renyi entropies on an alpha grid and at the three limits."""
    if alphas is None:
        alphas = default_alpha_grid()
    alphas = tuple(float(a) for a in alphas)
    for a in alphas:
        if not a >= 0:
            raise ValidationError(f"alpha grid contains invalid value {a!r}")
        if a == 1.0 or math.isinf(a):
            raise ValidationError("alpha grid must exclude exactly 1 and inf; limits are implicit")
    values = tuple(renyi_entropy(spectrum, a) for a in alphas)
    return RenyiCurve(
        alphas=alphas,
        values=values,
        s_vn=renyi_entropy(spectrum, 1.0),
        s_zero=renyi_entropy(spectrum, 0.0),
        s_inf=renyi_entropy(spectrum, math.inf),
    )
