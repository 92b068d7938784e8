"""Field-sweep orchestration, on-disk caching, and report assembly.

Each (N, h) grid point is an independent pure computation producing a
SweepRecord; points are cached one file per point so reruns and larger
follow-up analyses never repeat a solve.  Reals are serialized through
Python's shortest round-trip repr, so a reloaded record is equal to the
original field for field; verdicts near tolerance boundaries therefore
cannot flip on reload.

Report assembly is strict: it refuses to interpolate over missing or
failed grid points and instead raises a CoverageError naming them.
"""

import csv
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .convertibility import (
    EloccVerdict,
    MajorizationVerdict,
    MinimumPoint,
    MonotonicityProfile,
    build_profiles,
    classify_locc_pair,
    elocc_compare,
    find_minimum,
)
from .eigensolver import SolverOptions, ground_state
from .entanglement import ReducedSpectrum, RenyiCurve, default_alpha_grid, reduced_spectrum, renyi_curve
from .errors import ConfigurationError, ConvergenceError, CoverageError
from .hamiltonian import HamiltonianSpec
from .scaling import ScalingFit, fit_power_law
from .version import __version__

FORMAT_VERSION = 1
DEFAULT_SIZES = tuple(range(4, 23, 2))


@dataclass(frozen=True)
class SweepConfig:
    """Grid, blocks, tolerances and execution knobs of one sweep."""

    sizes: tuple[int, ...] = DEFAULT_SIZES
    h_start: float = 0.5
    h_end: float = 2.5
    h_step: float = 0.02
    majorization_block: tuple[int, int] = (0, 1)
    elocc_block_fraction: float = 0.5
    alphas: tuple[float, ...] = default_alpha_grid()
    solver: SolverOptions = SolverOptions()
    majorization_tol: float = 1e-10
    elocc_tol: float = 1e-10
    cache_dir: str | None = None
    workers: int = 1

    def __post_init__(self):
        if not self.sizes:
            raise ConfigurationError("sizes must be non-empty")
        if any(n < 4 for n in self.sizes):
            raise ConfigurationError(f"sizes must all be >= 4, got {self.sizes}")
        if not self.h_start < self.h_end:
            raise ConfigurationError(
                f"h_start must be < h_end, got {self.h_start} >= {self.h_end}"
            )
        if not self.h_step > 0:
            raise ConfigurationError(f"h_step must be > 0, got {self.h_step}")
        if not 0 < self.elocc_block_fraction < 1:
            raise ConfigurationError(
                f"elocc_block_fraction must lie in (0, 1), got {self.elocc_block_fraction}"
            )
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")

    def field_grid(self) -> tuple[float, ...]:
        count = int(np.floor((self.h_end - self.h_start) / self.h_step + 1e-9)) + 1
        return tuple(self.h_start + i * self.h_step for i in range(count))

    def elocc_block(self, n_sites: int) -> tuple[int, ...]:
        length = int(round(n_sites * self.elocc_block_fraction))
        length = min(max(length, 1), n_sites - 1)
        return tuple(range(length))


@dataclass(frozen=True)
class SweepRecord:
    """Everything retained from one (N, h) ground-state solve.

    lambdas are the two-neighbor-spin eigenvalues, descending, padded to
    four entries.  error is set (and the physics fields are None) when
    the solver failed at this point.
    """

    n_sites: int
    h: float
    energy: float | None
    lambdas: tuple[float, float, float, float] | None
    block: tuple[int, int]
    renyi_block_size: int | None
    renyi_alphas: tuple[float, ...] | None
    renyi_values: tuple[float, ...] | None
    s_vn: float | None
    s_zero: float | None
    s_inf: float | None
    residual_norm: float | None
    iterations: int | None
    method: str | None
    gap: float | None
    warning: str | None
    format_version: int
    tolerance: float
    code_version: str
    error: str | None = None

    def renyi(self) -> RenyiCurve:
        return RenyiCurve(
            alphas=self.renyi_alphas,
            values=self.renyi_values,
            s_vn=self.s_vn,
            s_zero=self.s_zero,
            s_inf=self.s_inf,
        )

    def two_spin_spectrum(self) -> ReducedSpectrum:
        lams = np.array(self.lambdas, dtype=np.float64)
        lams.setflags(write=False)
        return ReducedSpectrum(
            n_sites=self.n_sites,
            field=self.h,
            block=self.block,
            lambdas=lams,
            trace=float(sum(self.lambdas)),
        )


def compute_record(config: SweepConfig, n_sites: int, h: float) -> SweepRecord:
    """Solve one grid point; non-convergence becomes an error record."""
    meta = dict(
        n_sites=n_sites,
        h=h,
        block=tuple(config.majorization_block),
        format_version=FORMAT_VERSION,
        tolerance=config.solver.tolerance,
        code_version=__version__,
    )
    try:
        state = ground_state(HamiltonianSpec(n_sites, h), config.solver)
    except ConvergenceError as exc:
        return SweepRecord(
            energy=None, lambdas=None, renyi_block_size=None, renyi_alphas=None,
            renyi_values=None, s_vn=None, s_zero=None, s_inf=None,
            residual_norm=exc.best_residual, iterations=exc.iterations,
            method="krylov", gap=None, warning=None, error=str(exc), **meta,
        )

    two = reduced_spectrum(state, config.majorization_block)
    lams = tuple(float(x) for x in two.lambdas[:4])
    lams = lams + (0.0,) * (4 - len(lams))

    block = config.elocc_block(n_sites)
    curve = renyi_curve(reduced_spectrum(state, block), config.alphas)

    return SweepRecord(
        energy=state.energy,
        lambdas=lams,
        renyi_block_size=len(block),
        renyi_alphas=curve.alphas,
        renyi_values=curve.values,
        s_vn=curve.s_vn,
        s_zero=curve.s_zero,
        s_inf=curve.s_inf,
        residual_norm=state.residual_norm,
        iterations=state.iterations,
        method=state.method,
        gap=state.gap,
        warning=state.warning,
        error=None,
        **meta,
    )


# ---------------------------------------------------------------------------
# cache

def record_path(cache_dir, n_sites: int, h: float) -> Path:
    return Path(cache_dir) / f"N{n_sites}" / f"h{round(h, 9):.9f}.rec"


def save_record(cache_dir, record: SweepRecord) -> Path:
    """Atomically write one record (temp file + rename)."""
    path = record_path(cache_dir, record.n_sites, record.h)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = asdict(record)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=0)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _tuple_or_none(value):
    return None if value is None else tuple(value)


def load_record(cache_dir, n_sites: int, h: float, tolerance: float) -> SweepRecord | None:
    """Return the cached record when the key matches, else None.

    The key is (format version, N, h rounded to 1e-9, solver tolerance);
    any mismatch or unreadable file counts as a miss.
    """
    path = record_path(cache_dir, n_sites, h)
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if payload.get("format_version") != FORMAT_VERSION:
        return None
    if payload.get("n_sites") != n_sites:
        return None
    if round(payload.get("h", np.nan), 9) != round(h, 9):
        return None
    if payload.get("tolerance") != tolerance:
        return None
    for key in ("block", "lambdas", "renyi_alphas", "renyi_values"):
        payload[key] = _tuple_or_none(payload.get(key))
    try:
        return SweepRecord(**payload)
    except TypeError:
        return None


# ---------------------------------------------------------------------------
# sweep

def _prepare_cache(cache_dir) -> Path:
    path = Path(cache_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = tempfile.TemporaryFile(dir=path)
        probe.close()
    except OSError as exc:
        raise ConfigurationError(f"cache directory {path} is not writable: {exc}") from exc
    return path


def run_sweep(config: SweepConfig, progress=None) -> list[SweepRecord]:
    """Compute (or load) one record per grid point.

    Records come back ordered by (position in config.sizes, h).  Cache
    hits bypass the solver entirely and reproduce the stored record
    bit-identically.  ``progress`` is an optional callable taking the
    finished record, invoked in completion order.
    """
    cache_dir = _prepare_cache(config.cache_dir) if config.cache_dir is not None else None
    grid = config.field_grid()
    tasks = [(n, h) for n in config.sizes for h in grid]

    records: dict[tuple[int, float], SweepRecord] = {}
    pending: list[tuple[int, float]] = []
    for n, h in tasks:
        cached = load_record(cache_dir, n, h, config.solver.tolerance) if cache_dir else None
        if cached is not None:
            records[(n, h)] = cached
            if progress is not None:
                progress(cached)
        else:
            pending.append((n, h))

    def finish(record: SweepRecord):
        if cache_dir is not None and record.error is None:
            save_record(cache_dir, record)
        records[(record.n_sites, record.h)] = record
        if progress is not None:
            progress(record)

    if config.workers == 1 or len(pending) <= 1:
        for n, h in pending:
            finish(compute_record(config, n, h))
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(compute_record, config, n, h) for n, h in pending]
            for future in as_completed(futures):
                finish(future.result())

    return [records[key] for key in tasks]


# ---------------------------------------------------------------------------
# report

@dataclass(frozen=True)
class RegionSummary:
    """Run-length view of the LOCC verdict sequence for one size.

    ranges lists (h_lo, h_hi, verdict token) spans covering the grid.
    incomparable_below is the top of the leading incomparable span;
    convertible_above the bottom of the trailing lower_to_higher span.
    """

    n_sites: int
    ranges: tuple[tuple[float, float, str], ...]
    incomparable_below: float | None
    convertible_above: float | None


@dataclass(frozen=True)
class ReportBundle:
    """Assembled sweep analysis keyed by system size."""

    profiles: dict[int, MonotonicityProfile]
    minima: dict[int, dict[str, MinimumPoint | None]]
    locc_verdicts: dict[int, tuple[MajorizationVerdict, ...]]
    elocc_verdicts: dict[int, tuple[EloccVerdict, ...]]
    fits: tuple[ScalingFit, ...]
    h_c: float | None
    regions: dict[int, RegionSummary]

    def fit_for(self, observable: str) -> ScalingFit | None:
        for fit in self.fits:
            if fit.observable == observable:
                return fit
        return None


def _summarize_regions(n_sites, grid, verdicts) -> RegionSummary:
    tokens = [v.direction.value for v in verdicts]
    ranges = []
    start = 0
    for i in range(1, len(tokens) + 1):
        if i == len(tokens) or tokens[i] != tokens[start]:
            ranges.append((grid[start], grid[i], tokens[start]))
            start = i
    incomparable_below = ranges[0][1] if ranges and ranges[0][2] == "incomparable" else None
    convertible_above = ranges[-1][0] if ranges and ranges[-1][2] == "lower_to_higher" else None
    return RegionSummary(
        n_sites=n_sites,
        ranges=tuple(ranges),
        incomparable_below=incomparable_below,
        convertible_above=convertible_above,
    )


def build_report(records: list[SweepRecord], config: SweepConfig) -> ReportBundle:
    """Profiles, minima, verdict sequences, fits and the extrapolated h_c.

    Requires a complete, error-free record grid for every configured
    size; anything missing raises CoverageError naming the points.
    """
    grid = config.field_grid()
    by_key = {(r.n_sites, round(r.h, 9)): r for r in records}
    missing = []
    for n in config.sizes:
        for h in grid:
            rec = by_key.get((n, round(h, 9)))
            if rec is None:
                missing.append((n, h, "missing"))
            elif rec.error is not None:
                missing.append((n, h, rec.error))
    if missing:
        listing = "; ".join(f"N={n} h={h:g} ({why})" for n, h, why in missing[:10])
        if len(missing) > 10:
            listing += f"; ... {len(missing) - 10} more"
        raise CoverageError(f"sweep grid incomplete: {listing}", missing=missing)

    profiles = {}
    minima = {}
    locc = {}
    elocc = {}
    regions = {}
    for n in sorted(set(config.sizes)):
        row = [by_key[(n, round(h, 9))] for h in grid]
        spectra = [r.two_spin_spectrum() for r in row]
        profile = build_profiles(spectra)
        profiles[n] = profile
        if len(grid) >= 5:
            minima[n] = {
                "f2": find_minimum(profile, "f2"),
                "f3": find_minimum(profile, "f3"),
            }
        else:
            # grid too short to locate minima; report none rather than fail
            minima[n] = {"f2": None, "f3": None}
        locc[n] = tuple(
            classify_locc_pair(a, b, config.majorization_tol)
            for a, b in zip(spectra, spectra[1:])
        )
        curves = [r.renyi() for r in row]
        elocc[n] = tuple(
            elocc_compare(a, b, config.elocc_tol) for a, b in zip(curves, curves[1:])
        )
        regions[n] = _summarize_regions(n, grid, locc[n])

    fits = []
    for observable in ("f2", "f3"):
        points = [
            (n, minima[n][observable].h_min)
            for n in sorted(minima)
            if minima[n][observable] is not None
        ]
        if len({p[0] for p in points}) >= 3:
            fits.append(fit_power_law(points, observable=observable))

    fit_f2 = next((f for f in fits if f.observable == "f2"), None)
    return ReportBundle(
        profiles=profiles,
        minima=minima,
        locc_verdicts=locc,
        elocc_verdicts=elocc,
        fits=tuple(fits),
        h_c=fit_f2.c if fit_f2 is not None else None,
        regions=regions,
    )


# ---------------------------------------------------------------------------
# file outputs (full-precision decimal, shortest round-trip repr)

def _fmt(x) -> str:
    return repr(float(x))


def write_spectra_csv(records: list[SweepRecord], path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_sites", "h", "energy", "lam1", "lam2", "lam3", "lam4"])
        for r in records:
            if r.error is not None:
                continue
            writer.writerow([r.n_sites, _fmt(r.h), _fmt(r.energy)] + [_fmt(x) for x in r.lambdas])


def write_renyi_csv(records: list[SweepRecord], path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_sites", "h", "block_size", "alpha", "entropy"])
        for r in records:
            if r.error is not None:
                continue
            prefix = [r.n_sites, _fmt(r.h), r.renyi_block_size]
            writer.writerow(prefix + ["0", _fmt(r.s_zero)])
            rows = sorted(list(zip(r.renyi_alphas, r.renyi_values)) + [(1.0, r.s_vn)])
            for alpha, value in rows:
                writer.writerow(prefix + ["1" if alpha == 1.0 else _fmt(alpha), _fmt(value)])
            writer.writerow(prefix + ["inf", _fmt(r.s_inf)])


def write_verdicts_csv(bundle: ReportBundle, config: SweepConfig, path):
    grid = config.field_grid()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_sites", "h_lo", "h_hi", "locc_verdict", "elocc_verdict"])
        for n in sorted(bundle.locc_verdicts):
            pairs = zip(bundle.locc_verdicts[n], bundle.elocc_verdicts[n])
            for i, (m_verdict, e_verdict) in enumerate(pairs):
                writer.writerow([
                    n, _fmt(grid[i]), _fmt(grid[i + 1]),
                    m_verdict.direction.value, e_verdict.direction.value,
                ])


def write_minima_csv(bundle: ReportBundle, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_sites", "observable", "h_min", "f_min"])
        for n in sorted(bundle.minima):
            for observable in ("f2", "f3"):
                point = bundle.minima[n][observable]
                if point is not None:
                    writer.writerow([n, observable, _fmt(point.h_min), _fmt(point.f_min)])


def write_fit_json(fits, path):
    payload = [
        {
            "observable": fit.observable,
            "a": fit.a,
            "b": fit.b,
            "c": fit.c,
            "rms_residual": fit.rms_residual,
            "n_points": len(fit.points),
        }
        for fit in fits
    ]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
