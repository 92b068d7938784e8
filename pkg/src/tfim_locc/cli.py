"""Command-line front end.

Every subcommand is a thin adapter over the library: identical inputs
through the CLI and through direct calls yield identical outputs.

Exit codes: 0 success, 1 computational error (non-convergence, missing
coverage), 2 usage error.  Flag values override config-file values,
which override defaults; the cache directory can additionally come from
the TFIM_LOCC_CACHE environment variable (between flag and config file
in precedence).  The resolved effective configuration is echoed to
stderr on every run; stdout carries only results, full precision unless
--pretty is given.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .convertibility import elocc_compare, majorize, schmidt_vector
from .eigensolver import SolverOptions, ground_state
from .entanglement import reduced_spectrum, renyi_curve, renyi_entropy
from .errors import ValidationError
from .hamiltonian import HamiltonianSpec
from .spin_basis import build_sector_map
from .pipeline import (
    SweepConfig,
    build_report,
    run_sweep,
    write_fit_json,
    write_minima_csv,
    write_renyi_csv,
    write_spectra_csv,
    write_verdicts_csv,
)
from .version import __version__

CACHE_ENV_VAR = "TFIM_LOCC_CACHE"

_DEFAULT_SWEEP = SweepConfig()
_DEFAULT_SOLVER = SolverOptions()

DEFAULTS = {
    "sizes": ",".join(str(n) for n in _DEFAULT_SWEEP.sizes),
    "h_start": _DEFAULT_SWEEP.h_start,
    "h_end": _DEFAULT_SWEEP.h_end,
    "h_step": _DEFAULT_SWEEP.h_step,
    "block": "0,1",
    "elocc_block_fraction": _DEFAULT_SWEEP.elocc_block_fraction,
    "alphas": None,
    "tolerance": _DEFAULT_SOLVER.tolerance,
    "max_iterations": _DEFAULT_SOLVER.max_iterations,
    "seed": _DEFAULT_SOLVER.seed,
    "krylov_block": _DEFAULT_SOLVER.krylov_block,
    "prefer_dense": False,
    "majorization_tol": _DEFAULT_SWEEP.majorization_tol,
    "elocc_tol": _DEFAULT_SWEEP.elocc_tol,
    "cache_dir": None,
    "workers": 1,
    "out_dir": ".",
    "pretty": False,
}


def _parse_float_list(text: str, flag: str):
    try:
        return tuple(float(part) for part in str(text).split(",") if part.strip() != "")
    except ValueError as exc:
        raise ValidationError(f"{flag} expects a comma-separated number list, got {text!r}") from exc


def _parse_int_list(text: str, flag: str):
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip() != "")
    except ValueError as exc:
        raise ValidationError(f"{flag} expects a comma-separated integer list, got {text!r}") from exc


def _parse_alpha(text: str):
    if str(text).strip().lower() == "inf":
        return math.inf
    try:
        return float(text)
    except ValueError as exc:
        raise ValidationError(f"--alpha expects a number or 'inf', got {text!r}") from exc


class _Resolver:
    """flag > (env for cache_dir) > config file > default."""

    def __init__(self, args: argparse.Namespace):
        self.args = vars(args)
        self.file_values = {}
        config_path = self.args.get("config")
        if config_path:
            try:
                with open(config_path) as fh:
                    self.file_values = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"--config file {config_path!r} unusable: {exc}") from exc
            unknown = set(self.file_values) - set(DEFAULTS)
            if unknown:
                raise ValidationError(f"--config contains unknown keys: {sorted(unknown)}")
        self.resolved = {}

    def get(self, key: str):
        value = self.args.get(key)
        if value is None and key == "cache_dir":
            value = os.environ.get(CACHE_ENV_VAR)
        if value is None:
            value = self.file_values.get(key)
        if value is None:
            value = DEFAULTS[key]
        self.resolved[key] = value
        return value

    def echo(self):
        for key in sorted(self.resolved):
            print(f"# {key} = {self.resolved[key]}", file=sys.stderr)


def _solver_options(r: _Resolver) -> SolverOptions:
    return SolverOptions(
        tolerance=float(r.get("tolerance")),
        max_iterations=int(r.get("max_iterations")),
        seed=int(r.get("seed")),
        krylov_block=int(r.get("krylov_block")),
        prefer_dense=bool(r.get("prefer_dense")),
    )


def _sweep_config(r: _Resolver, sizes=None) -> SweepConfig:
    if sizes is None:
        sizes = _parse_int_list(r.get("sizes"), "--sizes")
    alphas_raw = r.get("alphas")
    alphas = _parse_float_list(alphas_raw, "--alphas") if alphas_raw else None
    block = _parse_int_list(r.get("block"), "--block")
    kwargs = dict(
        sizes=tuple(sizes),
        h_start=float(r.get("h_start")),
        h_end=float(r.get("h_end")),
        h_step=float(r.get("h_step")),
        majorization_block=block,
        elocc_block_fraction=float(r.get("elocc_block_fraction")),
        solver=_solver_options(r),
        majorization_tol=float(r.get("majorization_tol")),
        elocc_tol=float(r.get("elocc_tol")),
        cache_dir=r.get("cache_dir"),
        workers=int(r.get("workers")),
    )
    if alphas is not None:
        kwargs["alphas"] = alphas
    return SweepConfig(**kwargs)


def _fmt(value, pretty: bool) -> str:
    return f"{value:.6f}" if pretty else repr(float(value))


def _progress(record):
    status = record.error or f"E0={record.energy!r}"
    print(f"# done N={record.n_sites} h={record.h:g} {status}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_ground(r: _Resolver, args) -> int:
    n = int(args.n)
    h = float(args.h)
    r.resolved.update({"n": n, "h": h})
    opts = _solver_options(r)
    pretty = bool(r.get("pretty"))
    block = _parse_int_list(r.get("block"), "--block")
    r.echo()
    state = ground_state(HamiltonianSpec(n, h), opts)
    print(f"energy {_fmt(state.energy, pretty)}")
    print(f"residual_norm {_fmt(state.residual_norm, pretty)}")
    print(f"iterations {state.iterations}")
    print(f"method {state.method}")
    print(f"gap {_fmt(state.gap, pretty)}")
    if state.warning:
        print(f"# warning: {state.warning}", file=sys.stderr)
    spectrum = reduced_spectrum(state, block)
    lams = " ".join(_fmt(x, pretty) for x in spectrum.lambdas)
    print(f"block_lambdas {lams}")
    if args.amplitudes_out:
        labels = build_sector_map(n, "even").labels
        with open(args.amplitudes_out, "w") as fh:
            fh.write("label,amplitude\n")
            for label, amp in zip(labels, state.amplitudes):
                fh.write(f"{int(label)},{repr(float(amp))}\n")
        print(f"# amplitudes written to {args.amplitudes_out}", file=sys.stderr)
    return 0


def _cmd_majorize(r: _Resolver, args) -> int:
    tol = float(args.tol) if args.tol is not None else float(r.get("majorization_tol"))
    r.echo()
    try:
        a = schmidt_vector(_parse_float_list(args.a, "--a"))
    except ValidationError as exc:
        raise ValidationError(f"--a: {exc}") from exc
    try:
        b = schmidt_vector(_parse_float_list(args.b, "--b"))
    except ValidationError as exc:
        raise ValidationError(f"--b: {exc}") from exc
    verdict = majorize(a, b, tol)
    print(verdict.direction.value)
    return 0


def _cmd_renyi(r: _Resolver, args) -> int:
    r.echo()
    pretty = bool(r.get("pretty"))
    try:
        probs = schmidt_vector(_parse_float_list(args.lambdas, "--lambdas"))
    except ValidationError as exc:
        raise ValidationError(f"--lambdas: {exc}") from exc
    if args.alpha is not None:
        print(_fmt(renyi_entropy(probs.probs, _parse_alpha(args.alpha)), pretty))
        return 0
    alphas_raw = r.get("alphas")
    alphas = _parse_float_list(alphas_raw, "--alphas") if alphas_raw else None
    curve = renyi_curve(probs.probs, alphas)
    print(f"0 {_fmt(curve.s_zero, pretty)}")
    for alpha, value in sorted(list(zip(curve.alphas, curve.values)) + [(1.0, curve.s_vn)]):
        label = "1" if alpha == 1.0 else _fmt(alpha, pretty)
        print(f"{label} {_fmt(value, pretty)}")
    print(f"inf {_fmt(curve.s_inf, pretty)}")
    return 0


def _cmd_elocc(r: _Resolver, args) -> int:
    n = int(args.n)
    h_lo = float(args.h_lo)
    h_hi = float(args.h_hi)
    r.resolved.update({"n": n, "h_lo": h_lo, "h_hi": h_hi})
    opts = _solver_options(r)
    fraction = float(r.get("elocc_block_fraction"))
    tol = float(args.tol) if args.tol is not None else float(r.get("elocc_tol"))
    alphas_raw = r.get("alphas")
    alphas = _parse_float_list(alphas_raw, "--alphas") if alphas_raw else None
    r.echo()
    length = min(max(int(round(n * fraction)), 1), n - 1)
    block = tuple(range(length))
    curves = []
    for h in (h_lo, h_hi):
        state = ground_state(HamiltonianSpec(n, h), opts)
        curves.append(renyi_curve(reduced_spectrum(state, block), alphas))
    verdict = elocc_compare(curves[0], curves[1], tol)
    print(verdict.direction.value)
    if verdict.crossing_alpha is not None:
        print(f"# first crossing at alpha = {verdict.crossing_alpha!r}", file=sys.stderr)
    return 0


def _run_sweep_with_progress(config: SweepConfig):
    return run_sweep(config, progress=_progress)


def _cmd_sweep(r: _Resolver, args) -> int:
    config = _sweep_config(r)
    out_dir = Path(r.get("out_dir"))
    r.echo()
    out_dir.mkdir(parents=True, exist_ok=True)
    records = _run_sweep_with_progress(config)
    errors = [rec for rec in records if rec.error is not None]
    write_spectra_csv(records, out_dir / "spectra.csv")
    write_renyi_csv(records, out_dir / "renyi.csv")
    print(f"records {len(records)}")
    print(f"errors {len(errors)}")
    print(f"spectra_csv {out_dir / 'spectra.csv'}")
    print(f"renyi_csv {out_dir / 'renyi.csv'}")
    return 0


def _cmd_profiles(r: _Resolver, args) -> int:
    config = _sweep_config(r)
    r.echo()
    pretty = bool(r.get("pretty"))
    records = _run_sweep_with_progress(config)
    bundle = build_report(records, config)
    print("n_sites,h,f1,f2,f3,d1,d2,d3")
    for n in sorted(bundle.profiles):
        p = bundle.profiles[n]
        for i, h in enumerate(p.h_grid):
            cells = [p.f1[i], p.f2[i], p.f3[i], p.d1[i], p.d2[i], p.d3[i]]
            print(f"{n},{_fmt(h, pretty)}," + ",".join(_fmt(c, pretty) for c in cells))
    return 0


def _cmd_minima(r: _Resolver, args) -> int:
    config = _sweep_config(r)
    out_dir = Path(r.get("out_dir"))
    r.echo()
    pretty = bool(r.get("pretty"))
    out_dir.mkdir(parents=True, exist_ok=True)
    records = _run_sweep_with_progress(config)
    bundle = build_report(records, config)
    write_minima_csv(bundle, out_dir / "minima.csv")
    for n in sorted(bundle.minima):
        for observable in ("f2", "f3"):
            point = bundle.minima[n][observable]
            if point is None:
                print(f"{n} {observable} no_minimum")
            else:
                print(f"{n} {observable} {_fmt(point.h_min, pretty)} {_fmt(point.f_min, pretty)}")
    print(f"# minima.csv written to {out_dir / 'minima.csv'}", file=sys.stderr)
    return 0


def _cmd_fit(r: _Resolver, args) -> int:
    config = _sweep_config(r)
    out_dir = Path(r.get("out_dir"))
    observables = ("f2", "f3") if args.observable == "both" else (args.observable,)
    r.resolved["observable"] = args.observable
    r.echo()
    pretty = bool(r.get("pretty"))
    out_dir.mkdir(parents=True, exist_ok=True)
    records = _run_sweep_with_progress(config)
    bundle = build_report(records, config)
    fits = [f for f in bundle.fits if f.observable in observables]
    if len(fits) < len(observables):
        missing = set(observables) - {f.observable for f in fits}
        raise ValidationError(
            f"not enough minima to fit {sorted(missing)}; need >= 3 sizes with interior minima"
        )
    write_fit_json(fits, out_dir / "fit.json")
    for fit in fits:
        print(
            f"{fit.observable} a={_fmt(fit.a, pretty)} b={_fmt(fit.b, pretty)} "
            f"c={_fmt(fit.c, pretty)} rms={_fmt(fit.rms_residual, pretty)} n={len(fit.points)}"
        )
    print(f"# fit.json written to {out_dir / 'fit.json'}", file=sys.stderr)
    return 0


def _cmd_report(r: _Resolver, args) -> int:
    config = _sweep_config(r)
    out_dir = Path(r.get("out_dir"))
    r.echo()
    pretty = bool(r.get("pretty"))
    out_dir.mkdir(parents=True, exist_ok=True)
    records = _run_sweep_with_progress(config)
    bundle = build_report(records, config)
    write_spectra_csv(records, out_dir / "spectra.csv")
    write_renyi_csv(records, out_dir / "renyi.csv")
    write_verdicts_csv(bundle, config, out_dir / "verdicts.csv")
    write_minima_csv(bundle, out_dir / "minima.csv")
    write_fit_json(bundle.fits, out_dir / "fit.json")

    for n in sorted(bundle.regions):
        region = bundle.regions[n]
        below = "none" if region.incomparable_below is None else _fmt(region.incomparable_below, pretty)
        above = "none" if region.convertible_above is None else _fmt(region.convertible_above, pretty)
        print(f"N={n} incomparable_below {below} lower_to_higher_above {above}")
    for fit in bundle.fits:
        print(
            f"fit {fit.observable} a={_fmt(fit.a, pretty)} b={_fmt(fit.b, pretty)} "
            f"c={_fmt(fit.c, pretty)} rms={_fmt(fit.rms_residual, pretty)}"
        )
    if bundle.h_c is not None:
        print(f"h_c {_fmt(bundle.h_c, pretty)}")
    print(f"# outputs written to {out_dir}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common(parser):
    parser.add_argument("--config", help="JSON file with flag defaults")
    parser.add_argument("--pretty", action="store_true", default=None,
                        help="human-readable rounded output instead of full precision")


def _add_solver_flags(parser):
    parser.add_argument("--tolerance", type=float, help="solver residual tolerance (relative)")
    parser.add_argument("--max-iterations", type=int, dest="max_iterations")
    parser.add_argument("--seed", type=int, help="start-vector seed")
    parser.add_argument("--krylov-block", type=int, dest="krylov_block")
    parser.add_argument("--prefer-dense", action="store_true", default=None, dest="prefer_dense",
                        help="use dense diagonalization for small sectors")


def _add_sweep_flags(parser):
    parser.add_argument("--sizes", help="comma-separated system sizes")
    parser.add_argument("--n", type=int, help="single system size (shorthand for --sizes N)")
    parser.add_argument("--h-start", type=float, dest="h_start")
    parser.add_argument("--h-end", type=float, dest="h_end")
    parser.add_argument("--h-step", type=float, dest="h_step")
    parser.add_argument("--block", help="majorization block sites, e.g. 0,1")
    parser.add_argument("--elocc-block-fraction", type=float, dest="elocc_block_fraction")
    parser.add_argument("--alphas", help="explicit comma-separated Renyi alpha grid")
    parser.add_argument("--majorization-tol", type=float, dest="majorization_tol")
    parser.add_argument("--elocc-tol", type=float, dest="elocc_tol")
    parser.add_argument("--cache-dir", dest="cache_dir",
                        help=f"record cache directory (env {CACHE_ENV_VAR})")
    parser.add_argument("--workers", type=int, help="parallel grid-point workers")
    parser.add_argument("--out-dir", dest="out_dir", help="directory for emitted files")
    _add_solver_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfim-locc",
        description="LOCC convertibility analysis of transverse-field Ising ground states",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground", help="ground energy and two-spin spectrum at one point")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--block", help="reduced block sites, default 0,1")
    p.add_argument("--amplitudes-out", dest="amplitudes_out", help="CSV dump of amplitudes")
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_ground)

    p = sub.add_parser("majorize", help="majorization verdict between two Schmidt vectors")
    p.add_argument("--a", required=True, help="first probability vector, e.g. 0.5,0.3,0.2")
    p.add_argument("--b", required=True, help="second probability vector")
    p.add_argument("--tol", type=float, help="partial-sum tolerance")
    _add_common(p)
    p.set_defaults(func=_cmd_majorize)

    p = sub.add_parser("renyi", help="Renyi entropies of a probability vector")
    p.add_argument("--lambdas", required=True, help="probability vector, e.g. 0.5,0.3,0.2")
    p.add_argument("--alpha", help="single order (number or 'inf'); omit for the full curve")
    p.add_argument("--alphas", help="explicit alpha grid for the curve")
    _add_common(p)
    p.set_defaults(func=_cmd_renyi)

    p = sub.add_parser("elocc", help="Renyi-ordering verdict between two ground states")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h-lo", type=float, required=True, dest="h_lo")
    p.add_argument("--h-hi", type=float, required=True, dest="h_hi")
    p.add_argument("--tol", type=float, help="entropy-ordering tolerance")
    p.add_argument("--elocc-block-fraction", type=float, dest="elocc_block_fraction")
    p.add_argument("--alphas", help="explicit comma-separated Renyi alpha grid")
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_elocc)

    for name, func, help_text in [
        ("sweep", _cmd_sweep, "run the grid sweep and write spectra.csv / renyi.csv"),
        ("profiles", _cmd_profiles, "print f1, f2, f3 and derivatives over the grid"),
        ("minima", _cmd_minima, "locate f2 / f3 minima and write minima.csv"),
        ("report", _cmd_report, "full analysis: all CSV outputs, fits and regions"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_sweep_flags(p)
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("fit", help="power-law fit of minimum locations, writes fit.json")
    p.add_argument("--observable", choices=("f2", "f3", "both"), default="both")
    _add_sweep_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        resolver = _Resolver(args)
        if getattr(args, "n", None) is not None and hasattr(args, "sizes") and args.sizes is None:
            args.sizes = str(args.n)
            resolver.args["sizes"] = args.sizes
        return args.func(resolver, args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
