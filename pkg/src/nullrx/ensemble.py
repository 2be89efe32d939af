"""Coherent-state and pure-state ensembles and their geometric invariants.

A coherent ensemble is a set of M points in an S-mode complex phase space
(amplitudes in units of sqrt(photons)) together with prior probabilities.
All receiver performance quantities downstream reduce to the pairwise
difference energies ``delta[m, m'] = ||alpha_m - alpha_m'||^2``, the minimum
such energy, the prior-weighted average energy N, and their ratio kappa.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "CoherentEnsemble",
    "PureStateEnsemble",
    "EnsembleGeometry",
    "build_psk",
    "build_ppm",
    "load_ensemble",
    "geometry",
    "difference_energies",
    "scale_to_energy",
    "coherent_overlap",
    "coherent_as_pure",
]

PRIOR_TOL = 1e-12
NORM_TOL = 1e-10
PSD_CLIP_TOL = 1e-10


def _validate_priors(priors: np.ndarray, n_states: int) -> np.ndarray:
    p = np.asarray(priors, dtype=float)
    if p.ndim != 1 or p.size != n_states:
        raise ValueError(
            f"priors must be a flat sequence of {n_states} probabilities, got shape {p.shape}"
        )
    if np.any(p < 0.0):
        bad = int(np.argmin(p))
        raise ValueError(f"priors must be nonnegative; priors[{bad}] = {p[bad]}")
    total = float(p.sum())
    if abs(total - 1.0) > PRIOR_TOL:
        raise ValueError(f"priors must sum to 1 within {PRIOR_TOL}; got {total!r}")
    p.setflags(write=False)
    return p


def _to_state_matrix(states, label: str) -> np.ndarray:
    """Convert a sequence of equal-length complex vectors to an (M, S) array."""
    rows = list(states)
    if len(rows) < 2:
        raise ValueError(f"an ensemble needs at least 2 {label}s, got {len(rows)}")
    first_len = np.asarray(rows[0]).shape[-1] if np.ndim(rows[0]) else 1
    converted = []
    for i, row in enumerate(rows):
        vec = np.atleast_1d(np.asarray(row, dtype=complex))
        if vec.ndim != 1:
            raise ValueError(f"{label} {i} is not a flat vector")
        if vec.size != first_len:
            raise ValueError(
                f"{label} {i} has {vec.size} components, expected {first_len} like {label} 0"
            )
        converted.append(vec)
    mat = np.array(converted, dtype=complex)
    if mat.shape[1] < 1:
        raise ValueError(f"{label}s must have at least one component")
    mat.setflags(write=False)
    return mat


@dataclass(frozen=True, eq=False)
class CoherentEnsemble:
    """M coherent states on S shared modes with prior probabilities.

    ``states[m, s]`` is the complex amplitude of state m in mode s, in units
    of sqrt(photons). Immutable after construction; safe to share across
    workers.
    """

    states: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        mat = _to_state_matrix(self.states, "state")
        object.__setattr__(self, "states", mat)
        object.__setattr__(self, "priors", _validate_priors(self.priors, mat.shape[0]))

    @property
    def num_states(self) -> int:
        return self.states.shape[0]

    @property
    def num_modes(self) -> int:
        return self.states.shape[1]

    @property
    def energies(self) -> np.ndarray:
        """Per-state energies ||alpha_m||^2 in photons."""
        s = self.states
        return (s.real**2 + s.imag**2).sum(axis=1)

    @property
    def avg_energy(self) -> float:
        return float(self.priors @ self.energies)


@dataclass(frozen=True, eq=False)
class PureStateEnsemble:
    """M unit vectors in a d-dimensional complex space with priors."""

    vectors: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        mat = _to_state_matrix(self.vectors, "vector")
        norms = np.sqrt((mat.real**2 + mat.imag**2).sum(axis=1))
        off = np.abs(norms - 1.0)
        if np.any(off > NORM_TOL):
            bad = int(np.argmax(off))
            raise ValueError(
                f"vector {bad} is not normalized: ||psi|| = {norms[bad]!r} "
                f"(tolerance {NORM_TOL})"
            )
        object.__setattr__(self, "vectors", mat)
        object.__setattr__(self, "priors", _validate_priors(self.priors, mat.shape[0]))

    @property
    def num_states(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True, eq=False)
class EnsembleGeometry:
    """Pairwise difference energies and the derived scale-free constants.

    ``delta`` is the symmetric M x M matrix of difference energies (photons),
    ``min_delta`` its smallest off-diagonal entry, ``avg_energy`` the
    prior-weighted mean state energy N, and ``kappa = min_delta / avg_energy``
    the scale-invariant exponent of the optimal receiver.
    """

    delta: np.ndarray
    min_delta: float
    avg_energy: float
    kappa: float


def _require_count(M: int) -> int:
    if not isinstance(M, (int, np.integer)) or M < 2:
        raise ValueError(f"M must be an integer >= 2, got {M!r}")
    return int(M)


def _require_positive(value: float, name: str) -> float:
    v = float(value)
    if not v > 0.0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    return v


def build_psk(M: int, N: float) -> CoherentEnsemble:
    """Equiprobable single-mode phase-shift keying with average energy N.

    State m sits at phase (2m - 1)*pi/M, m = 1..M, so M = 4 gives the four
    diagonal quadrature points.
    """
    M = _require_count(M)
    N = _require_positive(N, "N")
    phases = (2.0 * np.arange(1, M + 1) - 1.0) * np.pi / M
    amps = np.sqrt(N) * np.exp(1j * phases)
    return CoherentEnsemble(states=amps[:, None], priors=np.full(M, 1.0 / M))


def build_ppm(M: int, N: float) -> CoherentEnsemble:
    """Equiprobable pulse-position keying: all energy N in one of M modes."""
    M = _require_count(M)
    N = _require_positive(N, "N")
    states = np.sqrt(N) * np.eye(M, dtype=complex)
    return CoherentEnsemble(states=states, priors=np.full(M, 1.0 / M))


def difference_energies(ens: CoherentEnsemble) -> np.ndarray:
    """Matrix of pairwise difference energies ||alpha_m - alpha_m'||^2."""
    diff = ens.states[:, None, :] - ens.states[None, :, :]
    delta = (diff.real**2 + diff.imag**2).sum(axis=-1)
    delta.setflags(write=False)
    return delta


def _min_offdiag(delta: np.ndarray) -> float:
    M = delta.shape[0]
    mask = ~np.eye(M, dtype=bool)
    return float(delta[mask].min())


def geometry(ens: CoherentEnsemble) -> EnsembleGeometry:
    """Difference energies, minimum distance, average energy, and kappa."""
    delta = difference_energies(ens)
    avg = ens.avg_energy
    if avg == 0.0:
        raise ValueError("all-vacuum ensemble: average energy is 0, kappa undefined")
    min_delta = _min_offdiag(delta)
    if min_delta == 0.0:
        warnings.warn(
            "ensemble contains duplicate states (minimum difference energy 0); "
            "kappa and all error exponents are 0",
            RuntimeWarning,
            stacklevel=2,
        )
    return EnsembleGeometry(
        delta=delta,
        min_delta=min_delta,
        avg_energy=avg,
        kappa=min_delta / avg,
    )


def scale_to_energy(ens: CoherentEnsemble, target: float) -> CoherentEnsemble:
    """Rescale all amplitudes by a common real factor to average energy `target`.

    Leaves kappa unchanged.
    """
    target = _require_positive(target, "target")
    avg = ens.avg_energy
    if avg == 0.0:
        raise ValueError("cannot rescale an all-vacuum ensemble (average energy 0)")
    factor = np.sqrt(target / avg)
    return CoherentEnsemble(states=ens.states * factor, priors=ens.priors)


def coherent_overlap(ens: CoherentEnsemble, m: int, m_prime: int) -> complex:
    """Inner product <alpha_m | alpha_m'> of two coherent states.

    Uses the convention exp(-||a||^2/2 - ||b||^2/2 + a^dagger b); its squared
    modulus equals exp(-delta[m, m']).
    """
    states = ens.states
    M = states.shape[0]
    for idx in (m, m_prime):
        if not 0 <= idx < M:
            raise IndexError(f"state index {idx} out of range for M = {M}")
    a, b = states[m], states[m_prime]
    ea = float((a.real**2 + a.imag**2).sum())
    eb = float((b.real**2 + b.imag**2).sum())
    return complex(np.exp(-0.5 * ea - 0.5 * eb + np.vdot(a, b)))


def _overlap_matrix(ens: CoherentEnsemble) -> np.ndarray:
    energies = ens.energies
    cross = ens.states.conj() @ ens.states.T
    return np.exp(-0.5 * energies[:, None] - 0.5 * energies[None, :] + cross)


def coherent_as_pure(ens: CoherentEnsemble) -> PureStateEnsemble:
    """Represent the coherent states as unit vectors with the same Gram matrix.

    Factorizes the overlap matrix through its eigendecomposition; eigenvalues
    in [-PSD_CLIP_TOL, 0) are clipped to 0 and directions below the clip
    tolerance are dropped, so duplicated states yield dimension d < M.
    """
    overlaps = _overlap_matrix(ens)
    w, u = np.linalg.eigh(overlaps)
    if w[0] < -PSD_CLIP_TOL:
        raise ValueError(
            f"overlap matrix is not positive semidefinite: eigenvalue {w[0]!r} "
            f"below -{PSD_CLIP_TOL}"
        )
    keep = w > PSD_CLIP_TOL
    vectors = u[:, keep].conj() * np.sqrt(w[keep])[None, :]
    return PureStateEnsemble(vectors=vectors, priors=ens.priors)


def _states_from_json(raw, label: str) -> list[np.ndarray]:
    if not isinstance(raw, list) or len(raw) < 2:
        raise ValueError(f"'states' must be a list of at least 2 {label}s")
    rows = []
    for i, entry in enumerate(raw):
        try:
            pairs = np.asarray(entry, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{label} {i} is not a list of [re, im] pairs") from exc
        if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] < 1:
            raise ValueError(f"{label} {i} is not a list of [re, im] pairs")
        rows.append(pairs[:, 0] + 1j * pairs[:, 1])
    return rows


def load_ensemble(path) -> CoherentEnsemble | PureStateEnsemble:
    """Load a coherent or pure ensemble from its JSON file format.

    The format is an object with keys ``kind`` ("coherent" or "pure"),
    ``priors`` (list of M probabilities), and ``states`` (M lists of
    [re, im] pairs). Validation failures name the offending field or index.
    """
    text = Path(path).read_text(encoding="utf-8")
    raw = json.loads(text)
    if not isinstance(raw, dict):
        raise ValueError("ensemble file must contain a JSON object")
    for key in ("kind", "priors", "states"):
        if key not in raw:
            raise ValueError(f"ensemble file missing required key '{key}'")
    kind = raw["kind"]
    if kind == "coherent":
        rows = _states_from_json(raw["states"], "state")
        return CoherentEnsemble(states=rows, priors=raw["priors"])
    if kind == "pure":
        rows = _states_from_json(raw["states"], "vector")
        return PureStateEnsemble(vectors=rows, priors=raw["priors"])
    raise ValueError(f"unknown ensemble kind {kind!r}; expected 'coherent' or 'pure'")
