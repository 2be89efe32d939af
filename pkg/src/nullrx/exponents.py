"""Error-probability sweeps and empirical exponent fits.

A sweep evaluates one receiver/ensemble family over a grid of average
energies (or copy counts); the exponent is estimated as the least-squares
slope of -ln(p) against the grid variable inside a probability band that
avoids both pre-asymptotic curvature and underflow.
"""

from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = ["SweepCurve", "ExponentEstimate", "sweep", "fit_epe"]

logger = logging.getLogger(__name__)

P_FLOOR = 1e-30
FIT_BAND = (1e-28, 1e-2)
MIN_FIT_POINTS = 5
RESIDUAL_WARN = 0.5
THREADS_ENV = "NULLRX_THREADS"


def worker_count() -> int:
    """Worker parallelism, capped by the NULLRX_THREADS environment variable."""
    cap = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            cap = min(cap, max(1, int(raw)))
        except ValueError:
            logger.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
    return cap


def evaluate_grid(point_fn: Callable[[float], float], grid: Sequence[float]) -> list[float]:
    """Evaluate point_fn over the grid, in parallel, preserving order."""
    workers = worker_count()
    if workers == 1 or len(grid) < 2:
        return [point_fn(x) for x in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(point_fn, grid))


@dataclass(frozen=True, eq=False)
class SweepCurve:
    """Ordered (x, p_e) samples for one receiver/ensemble family."""

    points: tuple[tuple[float, float], ...]
    label: str = ""

    def __post_init__(self):
        pts = tuple((float(x), float(p)) for x, p in self.points)
        xs = [x for x, _ in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError(f"curve {self.label!r}: x values must be strictly increasing")
        for x, p in pts:
            if not 0.0 < p <= 1.0:
                raise ValueError(
                    f"curve {self.label!r}: probability {p!r} at x = {x} outside (0, 1]"
                )
        object.__setattr__(self, "points", pts)

    @property
    def x(self) -> np.ndarray:
        return np.array([x for x, _ in self.points])

    @property
    def p_e(self) -> np.ndarray:
        return np.array([p for _, p in self.points])


@dataclass(frozen=True)
class ExponentEstimate:
    """Fitted slope of -ln(p_e) with log-domain residual diagnostics."""

    slope: float
    intercept: float
    max_abs_residual: float
    window: tuple[float, float]


def sweep(
    point_fn: Callable[[float], float],
    grid: Sequence[float],
    label: str = "",
    floor: float = P_FLOOR,
) -> SweepCurve:
    """Evaluate an error-probability function over a strictly increasing grid.

    `point_fn` maps the grid variable (average energy in photons, or a copy
    count) to the exact error probability; the caller closes it over the
    receiver and ensemble family. Points that underflow below `floor`
    (default 1e-30, or to exactly 0) are dropped and reported via logging;
    pass a smaller floor for deep-tail exponent studies.
    """
    xs = [float(x) for x in grid]
    if not xs:
        raise ValueError("sweep grid is empty")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("sweep grid must be strictly increasing")
    values = evaluate_grid(point_fn, xs)
    kept = [(x, p) for x, p in zip(xs, values) if p >= floor and p > 0.0]
    dropped = len(xs) - len(kept)
    if dropped:
        logger.warning(
            "sweep %r: dropped %d of %d points below the %g probability floor",
            label, dropped, len(xs), floor,
        )
    if not kept:
        raise ValueError(f"sweep {label!r}: every point fell below the probability floor")
    return SweepCurve(points=tuple(kept), label=label)


def fit_epe(
    curve: SweepCurve,
    window: tuple[float, float] | None = None,
    band: tuple[float, float] = FIT_BAND,
) -> ExponentEstimate:
    """Least-squares exponent of -ln(p_e) versus x.

    Only points with p_e inside `band` are used (optionally intersected with
    an explicit x window); at least MIN_FIT_POINTS must survive. The default
    band avoids both pre-asymptotic curvature and underflow noise; widen it
    deliberately for receivers whose exact values stay accurate deeper. A
    max |residual| above RESIDUAL_WARN in the log domain emits a
    pre-asymptotic warning rather than failing.
    """
    x = curve.x
    p = curve.p_e
    mask = (p >= band[0]) & (p <= band[1])
    if window is not None:
        lo, hi = (float(window[0]), float(window[1]))
        if not lo < hi:
            raise ValueError(f"window must satisfy min < max, got {window!r}")
        mask &= (x >= lo) & (x <= hi)
    if int(mask.sum()) < MIN_FIT_POINTS:
        raise ValueError(
            f"curve {curve.label!r}: only {int(mask.sum())} usable points for the fit "
            f"(need >= {MIN_FIT_POINTS} with p_e in [{band[0]:g}, {band[1]:g}])"
        )
    xs = x[mask]
    ys = -np.log(p[mask])
    slope, intercept = np.polyfit(xs, ys, 1)
    residual = float(np.abs(ys - (slope * xs + intercept)).max())
    if residual > RESIDUAL_WARN:
        warnings.warn(
            f"curve {curve.label!r}: max log-domain residual {residual:.3g} suggests "
            "pre-asymptotic curvature; the fitted slope may understate the exponent",
            RuntimeWarning,
            stacklevel=2,
        )
    return ExponentEstimate(
        slope=float(slope),
        intercept=float(intercept),
        max_abs_residual=residual,
        window=(float(xs.min()), float(xs.max())),
    )
