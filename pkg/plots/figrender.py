"""Render receiver-comparison CSVs into log-scale error-probability figures.

Consumes the CSV schema ``x,receiver,kind,value,flag[,ci]`` produced by the
nullrx CLI (never recomputing any physics): exact curves are drawn solid,
bounds dashed, simulations as markers with error bars when a ci column is
present, and fit-summary rows are skipped. One figure per CSV, linear x,
logarithmic y.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

DEFAULT_FLOOR = 1e-12
REQUIRED_COLUMNS = ("x", "receiver", "kind", "value")

KIND_STYLES = {
    "exact": {"linestyle": "-"},
    "bound": {"linestyle": "--"},
    "sim": {"linestyle": "none", "marker": "o", "markersize": 4},
}


@dataclass
class PlotSpec:
    """One rendering job: input CSV, output image, floor, and style overrides."""

    csv_path: Path
    out_path: Path
    floor: float = DEFAULT_FLOOR
    styles: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.floor > 0.0:
            raise ValueError(f"floor must be positive, got {self.floor!r}")

    def style_for(self, receiver: str, kind: str) -> dict:
        if (receiver, kind) in self.styles:
            return dict(self.styles[(receiver, kind)])
        return dict(KIND_STYLES.get(kind, {"linestyle": ":"}))


def load_curves(csv_path) -> dict:
    """Parse the CSV into {(receiver, kind): (xs, values, cis-or-None)}.

    Raises ValueError for structural problems: missing columns, short rows,
    or unparseable numbers (with the offending line number).
    """
    with open(csv_path, encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError(f"{csv_path}: empty CSV") from None
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise ValueError(f"{csv_path}: missing required columns {missing}")
    col = {name: header.index(name) for name in header}
    has_ci = "ci" in col

    curves: dict = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) < len(header):
            raise ValueError(f"{csv_path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        kind = row[col["kind"]]
        if kind == "fit":
            continue
        try:
            x = float(row[col["x"]])
            value = float(row[col["value"]])
            ci = float(row[col["ci"]]) if has_ci and row[col["ci"]] else None
        except ValueError as exc:
            raise ValueError(f"{csv_path}:{lineno}: non-numeric field ({exc})") from None
        key = (row[col["receiver"]], kind)
        curves.setdefault(key, ([], [], []))
        xs, values, cis = curves[key]
        xs.append(x)
        values.append(value)
        cis.append(ci)
    if not curves:
        raise ValueError(f"{csv_path}: no curve rows found")
    return curves


def build_figure(spec: PlotSpec):
    """Build the matplotlib figure for a spec; pure function of the CSV bytes."""
    curves = load_curves(spec.csv_path)
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    drawn = 0
    for (receiver, kind) in sorted(curves):
        xs, values, cis = curves[(receiver, kind)]
        kept = [(x, v, c) for x, v, c in zip(xs, values, cis) if v >= spec.floor]
        if not kept:
            continue
        xs = [k[0] for k in kept]
        values = [k[1] for k in kept]
        label = receiver if kind == "exact" else f"{receiver} ({kind})"
        style = spec.style_for(receiver, kind)
        if kind == "sim" and any(k[2] is not None for k in kept):
            errs = [k[2] or 0.0 for k in kept]
            ax.errorbar(xs, values, yerr=errs, label=label, capsize=2, **style)
        else:
            ax.plot(xs, values, label=label, **style)
        drawn += 1
    if drawn == 0:
        raise ValueError(
            f"{spec.csv_path}: every value fell below the {spec.floor:g} floor"
        )
    ax.set_yscale("log")
    ax.set_xlabel("average photon number / copies")
    ax.set_ylabel("error probability")
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> None:
    fig = build_figure(spec)
    try:
        fig.savefig(spec.out_path, dpi=150)
    finally:
        plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots/render",
        description="Render a receiver-comparison CSV to a log-scale figure.",
    )
    parser.add_argument("csv", type=Path)
    parser.add_argument("out", type=Path)
    parser.add_argument("--floor", type=float, default=DEFAULT_FLOOR)
    args = parser.parse_args(argv)
    try:
        render(PlotSpec(csv_path=args.csv, out_path=args.out, floor=args.floor))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
