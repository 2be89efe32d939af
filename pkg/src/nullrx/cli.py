"""Command-line interface for figure-data generation, sweeps, and exponent summaries.

Commands: fig3, fig4, sweep, exponents, simulate. All CSV outputs use the
schema ``x,receiver,kind,value,flag`` (a trailing ``ci`` column is appended
for Monte Carlo rows) with 17-significant-digit decimal values, so repeated
runs are byte-identical. Exit codes: 0 success, 1 validation error, 2 I/O
error. The NULLRX_THREADS environment variable caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bounds import (
    direct_detection_ppm_error,
    heterodyne_epe,
    heterodyne_qpsk_exact,
    heterodyne_union_bound,
    helstrom_epe,
    srm_error,
)
from .ensemble import (
    CoherentEnsemble,
    PureStateEnsemble,
    build_ppm,
    build_psk,
    coherent_as_pure,
    load_ensemble,
    scale_to_energy,
)
from .exponents import P_FLOOR, RESIDUAL_WARN, SweepCurve, evaluate_grid, fit_epe
from .st import qce, st_exact_error, st_simulate, st_upper_bound
from .swn import swn_exact_error, swn_exponent_bound, swn_simulate, swn_upper_bound

__all__ = ["main", "RunConfig", "cmd_fig3", "cmd_fig4", "cmd_sweep", "cmd_exponents", "cmd_simulate"]

CSV_HEADER = ["x", "receiver", "kind", "value", "flag"]
VALUE_CAP = 10.0

FIG3_GRID = np.linspace(0.5, 25.0, 50)
FIG3_SLICES = (4, 8, 12)
FIG4_GRID = np.linspace(0.5, 30.0, 60)
FIG4_SLICES = (8, 16, 64)
FIG4_NOTES = (
    "note: the conditional-pulse-nulling curve is omitted (not computed by this tool)",
    "note: the heterodyne lower-bound curve is omitted (not computed by this tool)",
)

SWEEP_RECEIVERS = (
    "swn-exact", "swn-bound", "swn-sim",
    "st-exact", "st-bound", "st-sim",
    "srm", "het-union", "het-qpsk", "dd-ppm",
)
_ENERGY_RECEIVERS = {"swn-exact", "swn-bound", "swn-sim", "srm", "het-union", "het-qpsk", "dd-ppm"}
_KIND_BY_RECEIVER = {
    "swn-exact": "exact", "swn-bound": "bound", "swn-sim": "sim",
    "st-exact": "exact", "st-bound": "bound", "st-sim": "sim",
    "srm": "exact", "het-union": "bound", "het-qpsk": "exact", "dd-ppm": "exact",
}


@dataclass
class RunConfig:
    """Parsed invocation: source ensemble, receiver knobs, grid, and output."""

    command: str
    ensemble: str | None = None
    M: int | None = None
    L: int | None = None
    receiver: str | None = None
    energy_grid: np.ndarray | None = None
    copies_grid: np.ndarray | None = None
    trials: int = 1_000_000
    seed: int = 0
    out: Path | None = None
    window: tuple[float, float] | None = None


def parse_grid(text: str) -> np.ndarray:
    """Parse 'min:max:points[:log]' (or a single number) into a grid."""
    parts = text.split(":")
    if len(parts) == 1:
        return np.array([float(parts[0])])
    if len(parts) == 4 and parts[3] == "log":
        log = True
    elif len(parts) == 3:
        log = False
    else:
        raise ValueError(f"grid {text!r} must look like min:max:points or min:max:points:log")
    lo, hi = float(parts[0]), float(parts[1])
    points = int(parts[2])
    if points < 1:
        raise ValueError(f"grid {text!r}: points must be >= 1")
    if points > 1 and not lo < hi:
        raise ValueError(f"grid {text!r}: bounds must satisfy min < max")
    if not lo > 0:
        raise ValueError(f"grid {text!r}: bounds must be positive")
    if points == 1:
        return np.array([lo])
    if log:
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


def parse_copies_grid(text: str) -> np.ndarray:
    """Parse a copies grid and collapse it to strictly increasing integers."""
    values = np.unique(np.rint(parse_grid(text)).astype(int))
    if values[0] < 1:
        raise ValueError(f"copies grid {text!r} must contain integers >= 1")
    return values


def parse_window(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"window {text!r} must look like min:max")
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise ValueError(f"window {text!r}: bounds must satisfy min < max")
    return (lo, hi)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _load_source(cfg: RunConfig):
    """Resolve the ensemble flag to (source_tag, ensemble)."""
    if cfg.ensemble is None:
        raise ValueError("an ensemble source is required: --ensemble psk|ppm|file:PATH")
    if cfg.ensemble in ("psk", "ppm"):
        if cfg.M is None:
            raise ValueError(f"--ensemble {cfg.ensemble} requires --M")
        builder = build_psk if cfg.ensemble == "psk" else build_ppm
        return cfg.ensemble, builder(cfg.M, 1.0)
    if cfg.ensemble.startswith("file:"):
        return "file", load_ensemble(cfg.ensemble[len("file:"):])
    raise ValueError(
        f"unknown ensemble source {cfg.ensemble!r}; expected psk, ppm, or file:PATH"
    )


def _require_slices_flag(cfg: RunConfig) -> int:
    if cfg.L is None:
        raise ValueError(f"receiver {cfg.receiver!r} requires --L")
    return cfg.L


def _ensure_pure(ens) -> PureStateEnsemble:
    if isinstance(ens, PureStateEnsemble):
        return ens
    return coherent_as_pure(ens)


def _write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.parent / f".{path.name}.{os.getpid()}.tmp"
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    finally:
        tmp.unlink(missing_ok=True)


def _render_csv(rows: list[list[str]], header: list[str], comments=()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _curve_rows(xs, values, receiver: str, kind: str, cis=None) -> list[list[str]]:
    """Format one curve, capping values above VALUE_CAP and dropping underflow."""
    rows = []
    for i, (x, v) in enumerate(zip(xs, values)):
        if v < P_FLOOR and kind != "sim":
            continue
        if kind == "sim" and v <= 0.0:
            continue
        flag = ""
        out = v
        if v > VALUE_CAP:
            out, flag = VALUE_CAP, "capped"
        row = [_fmt(x), receiver, kind, _fmt(out), flag]
        if cis is not None:
            row.append(_fmt(cis[i]))
        rows.append(row)
    return rows


def _fit_summary_row(xs, values, receiver: str, window=None) -> list[str] | None:
    """Fit the exponent of one curve; None when too few usable points."""
    usable = [(x, v) for x, v in zip(xs, values) if 0.0 < v <= 1.0]
    if len(usable) < 2:
        return None
    try:
        estimate = fit_epe(SweepCurve(points=tuple(usable), label=receiver), window)
    except ValueError:
        return None
    flag = "pre-asymptotic" if estimate.max_abs_residual > RESIDUAL_WARN else ""
    return [_fmt(0.0), receiver, "fit", _fmt(estimate.slope), flag]


def _figure_rows(base: CoherentEnsemble, grid: np.ndarray, slices) -> list[tuple[str, str, list[float]]]:
    """Shared assembly for the two figure commands."""
    curves: list[tuple[str, str, list[float]]] = []
    curves.append(
        ("helstrom", "exact", evaluate_grid(lambda N: srm_error(scale_to_energy(base, N)), grid))
    )
    for L in slices:
        curves.append((
            f"swn-L{L}", "exact",
            evaluate_grid(lambda N, L=L: swn_exact_error(scale_to_energy(base, N), L).average, grid),
        ))
    return curves


def cmd_fig3(out: Path) -> None:
    """Write the 4-ary phase-keying comparison data (8 curves plus fits)."""
    base = build_psk(4, 1.0)
    curves = _figure_rows(base, FIG3_GRID, FIG3_SLICES)
    for L in FIG3_SLICES:
        curves.append((
            f"swn-L{L}", "bound",
            evaluate_grid(lambda N, L=L: swn_upper_bound(scale_to_energy(base, N), L), FIG3_GRID),
        ))
    curves.append(("heterodyne", "exact", evaluate_grid(heterodyne_qpsk_exact, FIG3_GRID)))
    rows = []
    for receiver, kind, values in curves:
        rows.extend(_curve_rows(FIG3_GRID, values, receiver, kind))
    for receiver, kind, values in curves:
        if kind == "exact":
            fit = _fit_summary_row(FIG3_GRID, values, receiver)
            if fit is not None:
                rows.append(fit)
    _write_atomic(out, _render_csv(rows, CSV_HEADER))


def cmd_fig4(out: Path) -> None:
    """Write the 6-ary pulse-position comparison data (6 curves plus fits)."""
    base = build_ppm(6, 1.0)
    curves = _figure_rows(base, FIG4_GRID, FIG4_SLICES)
    curves.append((
        "direct-detection", "exact",
        evaluate_grid(lambda N: direct_detection_ppm_error(6, N), FIG4_GRID),
    ))
    curves.append((
        "het-union", "bound",
        evaluate_grid(lambda N: heterodyne_union_bound(scale_to_energy(base, N)), FIG4_GRID),
    ))
    rows = []
    for receiver, kind, values in curves:
        rows.extend(_curve_rows(FIG4_GRID, values, receiver, kind))
    for receiver, kind, values in curves:
        fit = _fit_summary_row(FIG4_GRID, values, receiver)
        if fit is not None:
            rows.append(fit)
    _write_atomic(out, _render_csv(rows, CSV_HEADER, comments=FIG4_NOTES))


def _sweep_point_functions(cfg: RunConfig, source: str, ens):
    """Build (grid, values, cis) for the configured receiver."""
    receiver = cfg.receiver
    if receiver in _ENERGY_RECEIVERS:
        if isinstance(ens, PureStateEnsemble):
            raise ValueError(
                f"receiver {receiver!r} requires a coherent ensemble "
                "(pure ensembles have no energy axis)"
            )
        if cfg.energy_grid is None:
            raise ValueError(f"receiver {receiver!r} requires an energy grid via --n")
        grid = cfg.energy_grid
    else:
        if cfg.copies_grid is None:
            raise ValueError(f"receiver {receiver!r} requires a copies grid via --copies")
        grid = cfg.copies_grid

    cis = None
    if receiver == "swn-exact":
        L = _require_slices_flag(cfg)
        values = evaluate_grid(
            lambda N: swn_exact_error(scale_to_energy(ens, N), L).average, grid
        )
    elif receiver == "swn-bound":
        L = _require_slices_flag(cfg)
        values = evaluate_grid(lambda N: swn_upper_bound(scale_to_energy(ens, N), L), grid)
    elif receiver == "swn-sim":
        L = _require_slices_flag(cfg)
        estimates = [
            swn_simulate(scale_to_energy(ens, N), L, cfg.trials, cfg.seed + i)
            for i, N in enumerate(grid)
        ]
        values = [e.point for e in estimates]
        cis = [e.ci_halfwidth for e in estimates]
    elif receiver == "st-exact":
        pure = _ensure_pure(ens)
        values = evaluate_grid(lambda n: st_exact_error(pure, int(n)).average, grid)
    elif receiver == "st-bound":
        pure = _ensure_pure(ens)
        values = evaluate_grid(lambda n: st_upper_bound(pure, int(n)), grid)
    elif receiver == "st-sim":
        pure = _ensure_pure(ens)
        estimates = [
            st_simulate(pure, int(n), cfg.trials, cfg.seed + i) for i, n in enumerate(grid)
        ]
        values = [e.point for e in estimates]
        cis = [e.ci_halfwidth for e in estimates]
    elif receiver == "srm":
        values = evaluate_grid(lambda N: srm_error(scale_to_energy(ens, N)), grid)
    elif receiver == "het-union":
        values = evaluate_grid(lambda N: heterodyne_union_bound(scale_to_energy(ens, N)), grid)
    elif receiver == "het-qpsk":
        if source != "psk" or ens.num_states != 4:
            raise ValueError(
                "receiver 'het-qpsk' is only valid with --ensemble psk --M 4; "
                f"got source {source!r} with M = {ens.num_states}"
            )
        values = evaluate_grid(heterodyne_qpsk_exact, grid)
    elif receiver == "dd-ppm":
        if source != "ppm":
            raise ValueError(
                f"receiver 'dd-ppm' is only valid with --ensemble ppm; got source {source!r}"
            )
        M = ens.num_states
        values = evaluate_grid(lambda N: direct_detection_ppm_error(M, N), grid)
    else:
        raise ValueError(f"unknown receiver {cfg.receiver!r}; expected one of {SWEEP_RECEIVERS}")
    return grid, values, cis


def cmd_sweep(cfg: RunConfig) -> None:
    """Generic (ensemble, receiver, grid) sweep to CSV."""
    if cfg.out is None:
        raise ValueError("sweep requires --out")
    source, ens = _load_source(cfg)
    grid, values, cis = _sweep_point_functions(cfg, source, ens)
    kind = _KIND_BY_RECEIVER[cfg.receiver]
    rows = _curve_rows(grid, values, cfg.receiver, kind, cis)
    if not rows:
        raise ValueError("sweep produced no rows (all points below the probability floor)")
    header = (CSV_HEADER + ["ci"]) if cis is not None else CSV_HEADER
    _write_atomic(cfg.out, _render_csv(rows, header))


_DEFAULT_ENERGY_GRID = np.linspace(0.5, 25.0, 50)
_DEFAULT_COPIES_GRID = np.arange(1, 201)


def cmd_exponents(cfg: RunConfig) -> list[str]:
    """Analytic exponents plus fitted empirical slopes; returns printed lines."""
    source, ens = _load_source(cfg)
    lines: list[str] = []
    csv_rows: list[list[str]] = []

    def emit(name: str, value: float, flag: str = "") -> None:
        lines.append(f"{name} = {value:.12g}" + (f"  [{flag}]" if flag else ""))
        csv_rows.append([_fmt(0.0), name, "fit", _fmt(value), flag])

    if isinstance(ens, CoherentEnsemble):
        kappa = helstrom_epe(ens)
        emit("kappa", kappa, "analytic")
        emit("heterodyne-epe", heterodyne_epe(ens), "analytic")
        lines.append(f"helstrom/heterodyne exponent ratio = {kappa / (kappa / 4.0):.12g}")
        if cfg.L is not None:
            emit(f"swn-bound-L{cfg.L}", swn_exponent_bound(ens, cfg.L), "analytic")
        grid = cfg.energy_grid if cfg.energy_grid is not None else _DEFAULT_ENERGY_GRID
        fits = [("srm", lambda N: srm_error(scale_to_energy(ens, N)))]
        if cfg.L is not None:
            fits.append((
                f"swn-L{cfg.L}",
                lambda N: swn_exact_error(scale_to_energy(ens, N), cfg.L).average,
            ))
        for name, fn in fits:
            row = _fit_summary_row(grid, evaluate_grid(fn, grid), name, cfg.window)
            if row is None:
                lines.append(f"fit {name}: unavailable (too few usable points in the grid)")
            else:
                emit(f"fit-{name}", float(row[3]), row[4])
    else:
        exponent = qce(ens)
        emit("qce", exponent, "analytic")
        grid = cfg.copies_grid if cfg.copies_grid is not None else _DEFAULT_COPIES_GRID
        values = evaluate_grid(lambda n: st_exact_error(ens, int(n)).average, grid)
        row = _fit_summary_row(grid, values, "st", cfg.window)
        if row is None:
            lines.append("fit st: unavailable (too few usable points in the grid)")
        else:
            emit("fit-st", float(row[3]), row[4])

    for line in lines:
        print(line)
    if cfg.out is not None:
        _write_atomic(cfg.out, _render_csv(csv_rows, CSV_HEADER))
    return lines


def cmd_simulate(cfg: RunConfig) -> list[str]:
    """One-off Monte Carlo run with its exact counterpart; returns printed lines."""
    source, ens = _load_source(cfg)
    if isinstance(ens, CoherentEnsemble):
        if cfg.L is None:
            raise ValueError("simulate on a coherent ensemble requires --L")
        L = cfg.L
        if cfg.energy_grid is None:
            target = ens.avg_energy
        elif cfg.energy_grid.size != 1:
            raise ValueError("simulate takes a single energy via --n VALUE")
        else:
            target = float(cfg.energy_grid[0])
        scaled = scale_to_energy(ens, target)
        estimate = swn_simulate(scaled, L, cfg.trials, cfg.seed)
        exact = swn_exact_error(scaled, L).average
        x, receiver = target, "swn-sim"
        lines = [f"receiver = swn (L = {L}), average energy = {target:.12g}"]
    else:
        if cfg.copies_grid is None or cfg.copies_grid.size != 1:
            raise ValueError("simulate on a pure ensemble takes a single --copies VALUE")
        n = int(cfg.copies_grid[0])
        estimate = st_simulate(ens, n, cfg.trials, cfg.seed)
        exact = st_exact_error(ens, n).average
        x, receiver = n, "st-sim"
        lines = [f"receiver = st (copies = {n})"]
    lines += [
        f"trials = {estimate.trials}, seed = {estimate.seed}",
        f"estimate = {estimate.point:.12g} +/- {estimate.ci_halfwidth:.12g} (95% CI)",
        f"exact = {exact:.12g}",
    ]
    for line in lines:
        print(line)
    if cfg.out is not None:
        row = [
            _fmt(x), receiver, "sim", _fmt(estimate.point), "", _fmt(estimate.ci_halfwidth),
        ]
        _write_atomic(cfg.out, _render_csv([row], CSV_HEADER + ["ci"]))
    return lines


class _UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ensemble", help="psk, ppm, or file:PATH")
    parser.add_argument("--M", type=int, help="constellation size for psk/ppm sources")
    parser.add_argument("--L", type=int, help="slice count for the nulling receiver")
    parser.add_argument("--copies", type=parse_copies_grid, help="copy-count grid min:max:points")
    parser.add_argument("--n", type=parse_grid, dest="energy_grid",
                        help="energy grid min:max:points[:log] or a single value")
    parser.add_argument("--trials", type=lambda s: int(float(s)), default=1_000_000,
                        help="Monte Carlo trials (default 1e6)")
    parser.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    parser.add_argument("--out", type=Path, help="output CSV path")
    parser.add_argument("--window", type=parse_window, help="fit window min:max")


def _build_parser() -> _Parser:
    parser = _Parser(prog="nullrx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_fig3 = sub.add_parser("fig3", help="4-ary phase-keying comparison CSV")
    p_fig3.add_argument("--out", type=Path, default=Path("fig3.csv"))
    p_fig4 = sub.add_parser("fig4", help="6-ary pulse-position comparison CSV")
    p_fig4.add_argument("--out", type=Path, default=Path("fig4.csv"))

    p_sweep = sub.add_parser("sweep", help="one receiver over one grid")
    p_sweep.add_argument("--receiver", required=True, choices=SWEEP_RECEIVERS)
    _add_common_flags(p_sweep)

    p_exp = sub.add_parser("exponents", help="analytic and fitted exponent summary")
    _add_common_flags(p_exp)

    p_sim = sub.add_parser("simulate", help="one-off Monte Carlo estimate")
    _add_common_flags(p_sim)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        ensemble=getattr(args, "ensemble", None),
        M=getattr(args, "M", None),
        L=getattr(args, "L", None),
        receiver=getattr(args, "receiver", None),
        energy_grid=getattr(args, "energy_grid", None),
        copies_grid=getattr(args, "copies", None),
        trials=getattr(args, "trials", 1_000_000),
        seed=getattr(args, "seed", 0),
        out=getattr(args, "out", None),
        window=getattr(args, "window", None),
    )


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "fig3":
            cmd_fig3(args.out)
        elif args.command == "fig4":
            cmd_fig4(args.out)
        elif args.command == "sweep":
            cmd_sweep(_config_from_args(args))
        elif args.command == "exponents":
            cmd_exponents(_config_from_args(args))
        elif args.command == "simulate":
            cmd_simulate(_config_from_args(args))
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
