"""Majorization and entropy-ordering verdicts between ground states.

A state with Schmidt vector lambda_a converts deterministically under
LOCC into one with lambda_b exactly when lambda_b majorizes lambda_a
(every leading partial sum of b dominates a's).  Verdicts name the
convertible direction: LOWER_TO_HIGHER means the first argument converts
to the second.

For the Ising chain the two-neighbor-spin Schmidt vector has four
entries whose total is 1, so majorization between neighboring fields
reduces to the monotonicity of the three partial sums f1, f2, f3 along
the sweep; their minima locate the convertibility transition.

Entropy-assisted (catalytic) conversion replaces partial sums with the
ordering of complete Renyi curves: a directed verdict requires one curve
to dominate at every order including the 0, 1 and infinity limits, and a
crossing anywhere makes the pair incomparable.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .entanglement import ReducedSpectrum, RenyiCurve
from .errors import GridError, ValidationError

PARTIAL_SUM_TOL = 1e-10
DERIVATIVE_ZERO_TOL = 1e-12
NORMALIZATION_TOL = 1e-8


class Verdict(enum.Enum):
    """Convertibility between an ordered pair (a, b) of states."""

    LOWER_TO_HIGHER = "lower_to_higher"  # a -> b with certainty
    HIGHER_TO_LOWER = "higher_to_lower"  # b -> a with certainty
    BOTH_WAYS = "both"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class SchmidtVector:
    """Descending probability vector of a bipartite pure state."""

    probs: np.ndarray

    @property
    def dim(self) -> int:
        return self.probs.shape[0]


def schmidt_vector(probs) -> SchmidtVector:
    """Validate and normalize ordering of a probability vector.

    Entries may undershoot zero by at most 1e-12 (clamped); the sum must
    be 1 within 1e-8.
    """
    p = np.asarray(probs, dtype=np.float64).ravel()
    if p.size == 0:
        raise ValidationError("Schmidt vector must be non-empty")
    if np.any(p < -1e-12) or np.any(p > 1.0 + 1e-12):
        raise ValidationError(f"Schmidt entries must lie in [0, 1], got {p!r}")
    total = float(np.sum(p))
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(
            f"Schmidt vector sums to {total!r}, off from 1 beyond {NORMALIZATION_TOL:g}"
        )
    p = np.sort(np.clip(p, 0.0, None))[::-1].copy()
    p.setflags(write=False)
    return SchmidtVector(probs=p)


@dataclass(frozen=True)
class MajorizationVerdict:
    """Outcome of a partial-sum comparison.

    first_violation_ab is the smallest 1-based l at which the condition
    for a -> b conversion fails (b's partial sum undershoots a's beyond
    tolerance); analogously first_violation_ba.  Both are None for
    BOTH_WAYS, and the witness for a holding direction is None.
    """

    direction: Verdict
    first_violation_ab: int | None
    first_violation_ba: int | None


def majorize(a: SchmidtVector, b: SchmidtVector, tol: float = PARTIAL_SUM_TOL) -> MajorizationVerdict:
    """Compare all partial sums of two Schmidt vectors.

    The shorter vector is zero-padded to the common dimension.  Partial
    sums equal within ``tol`` count as ties; BOTH_WAYS requires ties at
    every l.  Returns LOWER_TO_HIGHER when b dominates everywhere
    (a converts to b with certainty).
    """
    if not isinstance(a, SchmidtVector):
        a = schmidt_vector(a)
    if not isinstance(b, SchmidtVector):
        b = schmidt_vector(b)
    d = max(a.dim, b.dim)
    pa = np.cumsum(np.pad(a.probs, (0, d - a.dim)))
    pb = np.cumsum(np.pad(b.probs, (0, d - b.dim)))

    ab_bad = np.nonzero(pb < pa - tol)[0]  # where "b majorizes a" fails
    ba_bad = np.nonzero(pa < pb - tol)[0]
    first_ab = int(ab_bad[0]) + 1 if ab_bad.size else None
    first_ba = int(ba_bad[0]) + 1 if ba_bad.size else None

    if first_ab is None and first_ba is None:
        return MajorizationVerdict(Verdict.BOTH_WAYS, None, None)
    if first_ab is None:
        return MajorizationVerdict(Verdict.LOWER_TO_HIGHER, None, first_ba)
    if first_ba is None:
        return MajorizationVerdict(Verdict.HIGHER_TO_LOWER, first_ab, None)
    return MajorizationVerdict(Verdict.INCOMPARABLE, first_ab, first_ba)


@dataclass(frozen=True)
class MonotonicityProfile:
    """Leading partial sums of the two-spin spectrum over a field grid.

    f1 <= f2 <= f3 <= 1 point-wise; d1, d2, d3 are central-difference
    derivatives (one-sided at the endpoints) with the grid step.
    """

    n_sites: int
    h_grid: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray

    def observable(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        if name == "f1":
            return self.f1, self.d1
        if name == "f2":
            return self.f2, self.d2
        if name == "f3":
            return self.f3, self.d3
        raise ValidationError(f"unknown observable {name!r}")


def _numerical_derivative(h: np.ndarray, f: np.ndarray) -> np.ndarray:
    d = np.empty_like(f)
    step = h[1] - h[0]
    d[1:-1] = (f[2:] - f[:-2]) / (2.0 * step)
    d[0] = (f[1] - f[0]) / step
    d[-1] = (f[-1] - f[-2]) / step
    return d


def build_profiles(records: list[ReducedSpectrum]) -> MonotonicityProfile:
    """Assemble f1, f2, f3 and their derivatives from per-field spectra.

    All records must share n_sites and block, and their fields must form
    a strictly increasing uniform grid (step deviations above 1e-12 are
    rejected).
    """
    if len(records) < 2:
        raise GridError("need at least two grid points to build a profile")
    n = records[0].n_sites
    block = records[0].block
    for r in records:
        if r.n_sites != n or r.block != block:
            raise ValidationError("records mix system sizes or blocks")
    h = np.array([r.field for r in records], dtype=np.float64)
    steps = np.diff(h)
    if np.any(steps <= 0):
        raise GridError("field grid must be strictly increasing")
    if np.max(np.abs(steps - steps[0])) > 1e-12:
        raise GridError("field grid must be uniform within 1e-12")

    lams = np.zeros((len(records), 3))
    for i, r in enumerate(records):
        take = min(3, r.lambdas.shape[0])
        lams[i, :take] = r.lambdas[:take]
    f1 = lams[:, 0].copy()
    f2 = f1 + lams[:, 1]
    f3 = f2 + lams[:, 2]
    if np.any(f3 > 1.0 + 1e-10):
        raise ValidationError("partial sums exceed 1 beyond tolerance")

    profile = MonotonicityProfile(
        n_sites=n,
        h_grid=h,
        f1=f1,
        f2=f2,
        f3=f3,
        d1=_numerical_derivative(h, f1),
        d2=_numerical_derivative(h, f2),
        d3=_numerical_derivative(h, f3),
    )
    for arr in (profile.h_grid, profile.f1, profile.f2, profile.f3,
                profile.d1, profile.d2, profile.d3):
        arr.setflags(write=False)
    return profile


@dataclass(frozen=True)
class MinimumPoint:
    """Refined interior minimum of one partial-sum observable.

    n_sign_changes counts the distinct minus-to-plus derivative
    transitions on the grid; values above 1 flag an ambiguous profile
    (the reported point is then the one with the lowest value).
    """

    observable: str
    h_min: float
    f_min: float
    n_sites: int
    refinement: str
    n_sign_changes: int


def find_minimum(profile: MonotonicityProfile, observable: str) -> MinimumPoint | None:
    """Locate the interior minimum of f2 or f3, refined parabolically.

    Scans the numerical derivative for minus-to-plus sign changes
    (values within 1e-12 of zero are treated as zero), picks the grid
    point with the lowest observable value near each change, and refines
    through the parabola of the three surrounding points.  Returns None
    for profiles without an interior minimum, which is the legitimate
    outcome for f1.
    """
    f, d = profile.observable(observable)
    m = f.shape[0]
    if m < 5:
        raise GridError(f"need at least 5 grid points to locate a minimum, got {m}")

    signs = np.zeros(m, dtype=np.int8)
    signs[d > DERIVATIVE_ZERO_TOL] = 1
    signs[d < -DERIVATIVE_ZERO_TOL] = -1
    nz = np.nonzero(signs)[0]
    candidates = []
    for prev, nxt in zip(nz, nz[1:]):
        if signs[prev] == -1 and signs[nxt] == 1:
            span = np.arange(prev, nxt + 1)
            candidates.append(int(span[np.argmin(f[span])]))
    if not candidates:
        return None

    i = min(candidates, key=lambda j: f[j])
    i = min(max(i, 1), m - 2)

    h = profile.h_grid
    step = h[1] - h[0]
    curvature = f[i - 1] - 2.0 * f[i] + f[i + 1]
    if curvature > 0:
        offset = 0.5 * step * (f[i - 1] - f[i + 1]) / curvature
        h_min = float(h[i] + offset)
        f_min = float(f[i] - (f[i - 1] - f[i + 1]) ** 2 / (8.0 * curvature))
        refinement = "parabolic"
    else:
        h_min = float(h[i])
        f_min = float(f[i])
        refinement = "grid"

    return MinimumPoint(
        observable=observable,
        h_min=h_min,
        f_min=f_min,
        n_sites=profile.n_sites,
        refinement=refinement,
        n_sign_changes=len(candidates),
    )


def classify_locc_pair(
    a: ReducedSpectrum, b: ReducedSpectrum, tol: float = PARTIAL_SUM_TOL
) -> MajorizationVerdict:
    """Majorization verdict between ground states at neighboring fields.

    ``a`` is the state at the lower field, ``b`` at the higher one.
    LOWER_TO_HIGHER means the lower-field state converts to the
    higher-field one with certainty.
    """
    if a.n_sites != b.n_sites:
        raise ValidationError(f"system sizes differ: {a.n_sites} vs {b.n_sites}")
    if a.block != b.block:
        raise ValidationError(f"blocks differ: {a.block} vs {b.block}")
    if b.field < a.field:
        raise ValidationError("second spectrum must be at the equal or larger field")
    return majorize(SchmidtVector(a.lambdas), SchmidtVector(b.lambdas), tol)


@dataclass(frozen=True)
class EloccVerdict:
    """Entropy-ordering verdict; crossing_alpha marks the first order at
    which the sign of S_alpha(a) - S_alpha(b) flips (incomparable only)."""

    direction: Verdict
    crossing_alpha: float | None


def elocc_compare(a: RenyiCurve, b: RenyiCurve, tol: float = PARTIAL_SUM_TOL) -> EloccVerdict:
    """Compare two Renyi curves at every order including the limits.

    A directed verdict requires one curve to dominate (within ``tol``)
    at all grid orders and all three limit values; any sign change makes
    the pair incomparable, with the first crossing order recorded.
    """
    if a.alphas != b.alphas:
        raise ValidationError("Renyi curves were evaluated on different alpha grids")

    merged = [(0.0, a.s_zero, b.s_zero)]
    merged += sorted(
        [(al, va, vb) for al, va, vb in zip(a.alphas, a.values, b.values)]
        + [(1.0, a.s_vn, b.s_vn)]
    )
    merged.append((float("inf"), a.s_inf, b.s_inf))

    diffs = np.array([va - vb for _, va, vb in merged])
    a_dominates = bool(np.all(diffs >= -tol))
    b_dominates = bool(np.all(diffs <= tol))
    if a_dominates and b_dominates:
        return EloccVerdict(Verdict.BOTH_WAYS, None)
    if a_dominates:
        return EloccVerdict(Verdict.LOWER_TO_HIGHER, None)
    if b_dominates:
        return EloccVerdict(Verdict.HIGHER_TO_LOWER, None)

    crossing = None
    prev_sign = 0
    for (alpha, _, _), diff in zip(merged, diffs):
        sign = 1 if diff > tol else (-1 if diff < -tol else 0)
        if sign and prev_sign and sign != prev_sign:
            crossing = alpha
            break
        if sign:
            prev_sign = sign
    return EloccVerdict(Verdict.INCOMPARABLE, crossing)
