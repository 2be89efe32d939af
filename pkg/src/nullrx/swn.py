"""Sequential waveform nulling receiver on coherent-state ensembles.

The input field is split into L equal-amplitude slices. Slice by slice the
receiver displaces the field by the negative of the currently tracked
hypothesis (scaled by 1/sqrt(L)) and photon-counts the result; a click
advances the tracked hypothesis. With ideal detectors the slice click
probability is 1 - exp(-delta[mu, m]/L), where delta is the pairwise
difference-energy matrix, so the whole receiver reduces to the elimination
chain in `_dp`. Hypotheses are nulled in the fixed order 1..M; permute the
ensemble to null in a different order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._dp import final_distribution, run_chain
from .ensemble import CoherentEnsemble, difference_energies, geometry, _min_offdiag

__all__ = [
    "ErrorReport",
    "SimEstimate",
    "swn_exact_error",
    "swn_bruteforce_error",
    "swn_upper_bound",
    "swn_exponent_bound",
    "swn_simulate",
]

BRUTEFORCE_MAX_SLICES = 20
BRUTEFORCE_MAX_STATES = 8


@dataclass(frozen=True, eq=False)
class ErrorReport:
    """Conditional error probabilities per hypothesis and their prior-weighted mean."""

    per_hypothesis: np.ndarray
    average: float

    def __post_init__(self):
        per = np.asarray(self.per_hypothesis, dtype=float)
        if np.any(per < 0.0) or np.any(per > 1.0):
            raise ValueError(f"conditional error probabilities outside [0, 1]: {per}")
        per.setflags(write=False)
        object.__setattr__(self, "per_hypothesis", per)


@dataclass(frozen=True)
class SimEstimate:
    """Monte Carlo estimate with a 95% normal-approximation half-width."""

    point: float
    trials: int
    ci_halfwidth: float
    seed: int


def _make_report(per_hypothesis: np.ndarray, priors: np.ndarray) -> ErrorReport:
    per = np.clip(np.asarray(per_hypothesis, dtype=float), 0.0, 1.0)
    return ErrorReport(per_hypothesis=per, average=float(priors @ per))


def _make_estimate(wrong: int, trials: int, seed: int) -> SimEstimate:
    p = wrong / trials
    ci = 1.96 * math.sqrt(p * (1.0 - p) / trials)
    return SimEstimate(point=p, trials=trials, ci_halfwidth=ci, seed=seed)


def _require_slices(L: int) -> int:
    if not isinstance(L, (int, np.integer)) or L < 1:
        raise ValueError(f"slice count L must be an integer >= 1, got {L!r}")
    return int(L)


def _require_trials(trials: int) -> int:
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise ValueError(f"trials must be an integer >= 1, got {trials!r}")
    return int(trials)


def _error_mass(f: np.ndarray, m: int) -> float:
    """Error probability from the final chain distribution, for true index m.

    1 - f[m] is well conditioned when f[m] < 1/2 (and exact for unreachable
    hypotheses, where f[m] is exactly 0); otherwise summing the off-target
    mass keeps full relative accuracy for errors far below 1.
    """
    fm = float(f[m])
    if fm < 0.5:
        return 1.0 - fm
    return float(f[:m].sum() + f[m + 1:].sum())


def swn_exact_error(ens: CoherentEnsemble, L: int) -> ErrorReport:
    """Exact error probabilities of the nulling receiver with L slices.

    For true hypothesis m the tracked index stays with per-slice probability
    exp(-delta[mu, m]/L) and advances otherwise; the conditional error is the
    probability that the index has not reached m after L slices. Hypothesis 1
    is never misidentified. If L < m - 1 the index cannot reach m at all and
    the conditional error is exactly 1.
    """
    L = _require_slices(L)
    delta = difference_energies(ens)
    M = ens.num_states
    per = np.empty(M)
    for m in range(M):
        x = delta[:, m] / L
        stay = np.exp(-x)
        advance = -np.expm1(-x)
        f = final_distribution(stay, advance, L)
        per[m] = _error_mass(f, m)
    return _make_report(per, ens.priors)


def swn_bruteforce_error(ens: CoherentEnsemble, L: int) -> ErrorReport:
    """Independent combinatorial evaluation of the nulling receiver error.

    Sums, for each true hypothesis m and each click count K <= m - 2, over
    every increasing vector of click locations: no-click slices contribute
    exp(-delta[mu, m]/L) per slice and each click contributes
    1 - exp(-delta[mu, m]/L). Exponential in L, so limited to small problems;
    serves as the oracle for `swn_exact_error`.
    """
    L = _require_slices(L)
    M = ens.num_states
    if L > BRUTEFORCE_MAX_SLICES or M > BRUTEFORCE_MAX_STATES:
        raise ValueError(
            f"brute force limited to L <= {BRUTEFORCE_MAX_SLICES} and "
            f"M <= {BRUTEFORCE_MAX_STATES}, got L = {L}, M = {M}"
        )
    delta = difference_energies(ens)
    per = np.empty(M)
    for m in range(M):
        no_click = np.exp(-delta[:, m] / L)
        click = -np.expm1(-delta[:, m] / L)
        total = 0.0
        # K clicks with K < m leave the tracked index short of hypothesis m.
        for K in range(m):
            for locs in combinations(range(1, L + 1), K):
                prob = 1.0
                prev = 0
                for k, loc in enumerate(locs):
                    prob *= no_click[k] ** (loc - prev - 1) * click[k]
                    prev = loc
                total += prob * no_click[K] ** (L - prev)
        per[m] = total
    return _make_report(per, ens.priors)


def swn_upper_bound(ens: CoherentEnsemble, L: int) -> float:
    """Closed-form upper bound on the average nulling-receiver error.

    sum_m pi_m sum_{K=0}^{m-2} C(L, K) exp(-min_delta (L - K)/L). Always at
    least the exact average error; may exceed 1 (vacuous but valid).
    """
    L = _require_slices(L)
    min_delta = _min_offdiag(difference_energies(ens))
    total = 0.0
    for m, prior in enumerate(ens.priors):
        total += prior * sum(
            math.comb(L, K) * math.exp(-min_delta * (L - K) / L) for K in range(m)
        )
    return total


def swn_exponent_bound(ens: CoherentEnsemble, L: int) -> float:
    """Lower bound (1 - (M-2)/L) * kappa on the receiver's error exponent.

    Floored at 0; with fewer than M - 1 slices the last hypothesis is
    unreachable and the exponent vanishes.
    """
    L = _require_slices(L)
    g = geometry(ens)
    M = ens.num_states
    return max(0.0, (1.0 - (M - 2) / L) * g.kappa)


def swn_simulate(ens: CoherentEnsemble, L: int, trials: int, seed: int) -> SimEstimate:
    """Monte Carlo of the nulling receiver; reproducible for a given seed."""
    L = _require_slices(L)
    trials = _require_trials(trials)
    advance = -np.expm1(-difference_energies(ens) / L)
    wrong = run_chain(advance, ens.priors, L, trials, seed)
    return _make_estimate(wrong, trials, seed)
