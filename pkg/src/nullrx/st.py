"""Sequential testing receiver for n copies of an M-ary pure-state ensemble.

Each copy is measured with the binary projector onto the currently tracked
hypothesis state; a perpendicular outcome advances the tracked hypothesis.
Measuring a copy of the tracked state itself can never give a perpendicular
outcome, so the receiver is the same elimination chain as the nulling
receiver with per-copy stay probability F[mu, m] = |<psi_mu|psi_m>|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._dp import final_distribution, run_chain
from .ensemble import PureStateEnsemble
from .swn import (
    ErrorReport,
    SimEstimate,
    _error_mass,
    _make_estimate,
    _make_report,
    _require_trials,
)

__all__ = [
    "FidelityMatrix",
    "fidelity_matrix",
    "st_exact_error",
    "st_upper_bound",
    "st_simulate",
    "qce",
]


@dataclass(frozen=True, eq=False)
class FidelityMatrix:
    """Pairwise fidelities |<psi_m|psi_m'>|^2 and their off-diagonal maximum."""

    entries: np.ndarray
    f_max: float


def fidelity_matrix(ens: PureStateEnsemble) -> FidelityMatrix:
    """Compute all pairwise fidelities once; reused across copy counts."""
    overlaps = ens.vectors.conj() @ ens.vectors.T
    fid = overlaps.real**2 + overlaps.imag**2
    fid = 0.5 * (fid + fid.T)
    np.clip(fid, 0.0, 1.0, out=fid)
    np.fill_diagonal(fid, 1.0)
    M = fid.shape[0]
    f_max = float(fid[~np.eye(M, dtype=bool)].max())
    fid.setflags(write=False)
    return FidelityMatrix(entries=fid, f_max=f_max)


def _require_copies(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"copy count n must be an integer >= 1, got {n!r}")
    return int(n)


def st_exact_error(ens: PureStateEnsemble, n: int) -> ErrorReport:
    """Exact error probabilities of the testing receiver on n copies."""
    n = _require_copies(n)
    fid = fidelity_matrix(ens).entries
    M = ens.num_states
    per = np.empty(M)
    for m in range(M):
        stay = fid[:, m]
        f = final_distribution(stay, 1.0 - stay, n)
        per[m] = _error_mass(f, m)
    return _make_report(per, ens.priors)


def st_upper_bound(ens: PureStateEnsemble, n: int) -> float:
    """Closed-form bound sum_m pi_m sum_{K=0}^{m-2} C(n, K) F_max^(n-K)."""
    n = _require_copies(n)
    f_max = fidelity_matrix(ens).f_max
    total = 0.0
    for m, prior in enumerate(ens.priors):
        total += prior * sum(math.comb(n, K) * f_max ** (n - K) for K in range(m))
    return total


def st_simulate(ens: PureStateEnsemble, n: int, trials: int, seed: int) -> SimEstimate:
    """Monte Carlo of the testing receiver; reproducible for a given seed."""
    n = _require_copies(n)
    trials = _require_trials(trials)
    advance = 1.0 - fidelity_matrix(ens).entries
    wrong = run_chain(advance, ens.priors, n, trials, seed)
    return _make_estimate(wrong, trials, seed)


def qce(ens: PureStateEnsemble) -> float:
    """Best achievable per-copy error exponent, -ln F_max.

    Returns float('inf') for mutually orthogonal ensembles (F_max = 0); the
    CSV layer serializes that as the literal string "inf".
    """
    f_max = fidelity_matrix(ens).f_max
    if f_max == 0.0:
        return math.inf
    return -math.log(f_max)
