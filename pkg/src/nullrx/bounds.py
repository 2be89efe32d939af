"""Reference receivers and limits: SRM, binary Helstrom, heterodyne, direct detection.

The square-root measurement doubles as the optimum-error ("Helstrom") curve
generator for the equiprobable geometrically uniform sets used in the figure
outputs (phase keying, pulse-position keying); for other ensembles its result
is reported as the SRM error without an optimality claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .ensemble import (
    CoherentEnsemble,
    PureStateEnsemble,
    coherent_as_pure,
    difference_energies,
    geometry,
)

__all__ = [
    "GramMatrix",
    "gram_matrix",
    "srm_error",
    "helstrom_binary",
    "helstrom_epe",
    "heterodyne_epe",
    "heterodyne_union_bound",
    "heterodyne_qpsk_exact",
    "direct_detection_ppm_error",
    "qfunc",
]

EIG_TOL = 1e-10
_SQRT2 = math.sqrt(2.0)


def qfunc(x):
    """Standard normal tail probability Q(x) = erfc(x / sqrt(2)) / 2."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / _SQRT2)


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Prior-weighted Gram matrix G[i, j] = sqrt(pi_i pi_j) <psi_i|psi_j>."""

    entries: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.entries, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"Gram matrix must be square, got shape {g.shape}")
        if not np.allclose(g, g.conj().T, atol=1e-12, rtol=0.0):
            raise ValueError("Gram matrix is not Hermitian")
        w = np.linalg.eigvalsh(g)
        if w[0] < -EIG_TOL:
            raise ValueError(f"Gram matrix has eigenvalue {w[0]!r} below -{EIG_TOL}")
        trace = float(np.trace(g).real)
        if abs(trace - 1.0) > 1e-12:
            raise ValueError(f"Gram matrix trace must be 1 within 1e-12, got {trace!r}")
        g.setflags(write=False)
        object.__setattr__(self, "entries", g)


def _as_pure(ens: PureStateEnsemble | CoherentEnsemble) -> PureStateEnsemble:
    if isinstance(ens, CoherentEnsemble):
        return coherent_as_pure(ens)
    return ens


def gram_matrix(ens: PureStateEnsemble | CoherentEnsemble) -> GramMatrix:
    """Build the prior-weighted Gram matrix of an ensemble."""
    pure = _as_pure(ens)
    vecs = pure.vectors
    norms = np.sqrt((vecs.real**2 + vecs.imag**2).sum(axis=1))
    vecs = vecs / norms[:, None]
    overlaps = vecs.conj() @ vecs.T
    weights = np.sqrt(np.outer(pure.priors, pure.priors))
    return GramMatrix(entries=weights * overlaps)


def srm_error(ens: PureStateEnsemble | CoherentEnsemble) -> float:
    """Average error of the square-root measurement.

    The success probability is the squared-modulus sum of the diagonal of the
    principal square root R of the weighted Gram matrix; eigenvalues in
    [-EIG_TOL, 0) are clipped to 0. Since trace(R^2) = trace(G) = 1, the
    error 1 - sum_i |R_ii|^2 equals sum_{i != j} |R_ij|^2, which stays
    accurate in relative terms when the error is far below 1 (the diagonal
    form loses everything to cancellation under ~1e-14).
    """
    g = gram_matrix(ens).entries
    w, u = np.linalg.eigh(g)
    w = np.clip(w, 0.0, None)
    root = (u * np.sqrt(w)) @ u.conj().T
    sq = root.real**2 + root.imag**2
    np.fill_diagonal(sq, 0.0)
    return min(1.0, float(sq.sum()))


def helstrom_binary(priors, fidelity: float) -> float:
    """Minimum error for two pure states: (1 - sqrt(1 - 4 pi1 pi2 F)) / 2."""
    p1, p2 = (float(p) for p in priors)
    if p1 < 0.0 or p2 < 0.0 or abs(p1 + p2 - 1.0) > 1e-12:
        raise ValueError(f"priors must be nonnegative and sum to 1, got ({p1}, {p2})")
    fidelity = float(fidelity)
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {fidelity!r}")
    x = 4.0 * p1 * p2 * fidelity
    # (1 - sqrt(1 - x))/2 rewritten to stay accurate for nearly orthogonal states
    return x / (2.0 * (1.0 + math.sqrt(max(0.0, 1.0 - x))))


def helstrom_epe(ens: CoherentEnsemble) -> float:
    """Error exponent of the optimal receiver: kappa = min_delta / N."""
    return geometry(ens).kappa


def heterodyne_epe(ens: CoherentEnsemble) -> float:
    """Error exponent of ideal heterodyne detection: kappa / 4."""
    return geometry(ens).kappa / 4.0


def heterodyne_union_bound(ens: CoherentEnsemble) -> float:
    """Union bound on the heterodyne error from pairwise Gaussian tests.

    Heterodyning all S modes yields the amplitude vector plus Gaussian noise
    of variance 1/2 per quadrature, so each wrong pair contributes
    Q(||alpha_m - alpha_m'|| / sqrt(2)).
    """
    delta = difference_energies(ens)
    tails = qfunc(np.sqrt(delta / 2.0))
    np.fill_diagonal(tails, 0.0)  # sum only wrong pairs; keeps tiny tails accurate
    return float(ens.priors @ tails.sum(axis=1))


def heterodyne_qpsk_exact(N: float) -> float:
    """Exact heterodyne error for 4-ary phase keying with quadrant decisions.

    Both quadratures of the diagonal constellation carry mean sqrt(N/2) and
    variance 1/2, so P_e = 1 - (1 - Q(sqrt(N)))^2.
    """
    N = float(N)
    if N < 0.0:
        raise ValueError(f"N must be >= 0, got {N!r}")
    q = float(qfunc(math.sqrt(N)))
    # 1 - (1 - q)^2 expanded; avoids cancellation once q is tiny
    return q * (2.0 - q)


def direct_detection_ppm_error(M: int, N: float) -> float:
    """Direct-detection error for M-ary pulse-position keying.

    The pulse slot fires with probability 1 - exp(-N); an all-dark record
    forces a uniform guess, so P_e = (M - 1)/M * exp(-N).
    """
    if not isinstance(M, (int, np.integer)) or M < 2:
        raise ValueError(f"M must be an integer >= 2, got {M!r}")
    N = float(N)
    if N < 0.0:
        raise ValueError(f"N must be >= 0, got {N!r}")
    return (M - 1) / M * math.exp(-N)
