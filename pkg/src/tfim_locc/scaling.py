"""Finite-size extrapolation of minimum locations.

Fits h_min(N) = a / N^b + c by separating the parameters: for fixed b
the model is linear in (a, c) and solved exactly by least squares, so
only the exponent needs a one-dimensional search.  A log-spaced scan
brackets the optimum and golden-section refines it, which keeps the fit
deterministic with no starting-point sensitivity.  The constant c is the
thermodynamic-limit location of the convertibility transition.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FitError

B_GRID_LO = 0.25
B_GRID_HI = 3.0
B_GRID_POINTS = 400
B_REFINE_TOL = 1e-6
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScalingFit:
    """Fitted power law h_min(N) = a / N^b + c with its RMS residual."""

    observable: str
    a: float
    b: float
    c: float
    rms_residual: float
    points: tuple[tuple[int, float], ...]


def _solve_linear(ns: np.ndarray, y: np.ndarray, b: float):
    x = ns ** (-b)
    design = np.column_stack([x, np.ones_like(x)])
    coeff, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = y - design @ coeff
    return float(np.sqrt(np.mean(residual**2))), float(coeff[0]), float(coeff[1])


def fit_power_law(points, observable: str = "") -> ScalingFit:
    """Least-squares fit of (N, h_min) pairs to a / N^b + c.

    Requires at least three points with distinct N.  The exponent b is
    scanned over a 400-point log grid on [0.25, 3] and refined by golden
    section to 1e-6.
    """
    points = tuple((int(n), float(h)) for n, h in points)
    ns = np.array([p[0] for p in points], dtype=np.float64)
    y = np.array([p[1] for p in points], dtype=np.float64)
    if len(set(p[0] for p in points)) < 3:
        raise FitError(f"need at least 3 distinct sizes, got {sorted(set(ns))}")
    if np.any(ns < 2):
        raise FitError("sizes must be >= 2")

    b_grid = np.geomspace(B_GRID_LO, B_GRID_HI, B_GRID_POINTS)
    scan = [_solve_linear(ns, y, b)[0] for b in b_grid]
    i = int(np.argmin(scan))
    lo = b_grid[max(i - 1, 0)]
    hi = b_grid[min(i + 1, B_GRID_POINTS - 1)]

    c_probe = hi - _INVPHI * (hi - lo)
    d_probe = lo + _INVPHI * (hi - lo)
    while hi - lo > B_REFINE_TOL:
        if _solve_linear(ns, y, c_probe)[0] < _solve_linear(ns, y, d_probe)[0]:
            hi = d_probe
        else:
            lo = c_probe
        c_probe = hi - _INVPHI * (hi - lo)
        d_probe = lo + _INVPHI * (hi - lo)

    b_best = 0.5 * (lo + hi)
    rms, a, c = _solve_linear(ns, y, b_best)
    return ScalingFit(
        observable=observable,
        a=a,
        b=b_best,
        c=c,
        rms_residual=rms,
        points=points,
    )
