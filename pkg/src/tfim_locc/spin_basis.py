"""Spin-flip-parity sectors of the z-basis of a spin-1/2 chain.

Basis labels are integers in [0, 2^N): bit i encodes site i, with bit
value 0 = spin up along z and 1 = spin down.  The all-up product state is
therefore label 0, which lives in the even sector and becomes the first
basis vector (it is the exact ground state for infinite transverse field).

The chain Hamiltonian used downstream commutes with the global spin-flip
parity (-1)^popcount, so each parity sector is invariant and the physical
ground state for positive field lies in the even sector, where the
spectral gap stays O(1) instead of collapsing like h^N.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import SizeError, ValidationError

MAX_SITES = 28  # hard cap: rank table is a dense 2^N array


def popcounts(values: np.ndarray, n_bits: int) -> np.ndarray:
    """Per-element popcount of the low ``n_bits`` bits of an integer array."""
    out = np.zeros(values.shape, dtype=np.int8)
    for b in range(n_bits):
        out += ((values >> b) & 1).astype(np.int8)
    return out


@dataclass(frozen=True)
class SectorMap:
    """Ordered basis of one parity sector with bidirectional rank lookup.

    Attributes
    ----------
    n_sites : int
        Chain length N.
    parity : str
        ``"even"`` or ``"odd"`` parity of the number of down spins.
    labels : (2^(N-1),) int64 array
        Sector labels, strictly ascending.
    rank : (2^N,) int32 array
        ``rank[label]`` is the index of ``label`` in ``labels``; -1 for
        labels of the other parity.
    site_popcounts : (2^(N-1),) int8 array
        popcount(labels), cached for diagonal Hamiltonian terms.

    Immutable after construction; safe for shared concurrent reads.
    """

    n_sites: int
    parity: str
    labels: np.ndarray = field(repr=False)
    rank: np.ndarray = field(repr=False)
    site_popcounts: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.labels.shape[0]

    def rank_of(self, label: int) -> int:
        """Index of ``label`` inside the sector; raises if it is outside."""
        if not 0 <= label < (1 << self.n_sites):
            raise ValidationError(f"label {label} outside [0, 2^{self.n_sites})")
        r = int(self.rank[label])
        if r < 0:
            raise ValidationError(f"label {label} has the wrong parity for this sector")
        return r

    def label_of(self, r: int) -> int:
        return int(self.labels[r])


def build_sector_map(n_sites: int, parity: str) -> SectorMap:
    """Enumerate all z-basis labels of the requested spin-flip parity.

    Parameters
    ----------
    n_sites : int
        Chain length, 2 <= n_sites <= 28.
    parity : str
        ``"even"`` or ``"odd"``.

    Returns
    -------
    SectorMap
        Labels ascending; ``rank`` inverts ``labels`` on the sector.
        Instances are immutable and memoized, so repeated calls share
        one map per (n_sites, parity).
    """
    if not isinstance(n_sites, (int, np.integer)) or isinstance(n_sites, bool):
        raise SizeError(f"n_sites must be an integer, got {n_sites!r}")
    if not 2 <= n_sites <= MAX_SITES:
        raise SizeError(f"n_sites must be in [2, {MAX_SITES}], got {n_sites}")
    if parity not in ("even", "odd"):
        raise ValidationError(f"parity must be 'even' or 'odd', got {parity!r}")
    return _build_sector_map(int(n_sites), parity)


@lru_cache(maxsize=8)
def _build_sector_map(n_sites: int, parity: str) -> SectorMap:
    all_labels = np.arange(1 << n_sites, dtype=np.int64)
    pops = popcounts(all_labels, n_sites)
    want = 0 if parity == "even" else 1
    labels = all_labels[(pops & 1) == want]

    rank = np.full(1 << n_sites, -1, dtype=np.int32)
    rank[labels] = np.arange(labels.shape[0], dtype=np.int32)

    sector = SectorMap(
        n_sites=int(n_sites),
        parity=parity,
        labels=labels,
        rank=rank,
        site_popcounts=pops[labels],
    )
    sector.labels.setflags(write=False)
    sector.rank.setflags(write=False)
    sector.site_popcounts.setflags(write=False)
    return sector
