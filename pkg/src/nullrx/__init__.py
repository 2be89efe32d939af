"""Error probabilities, bounds, and exponents for sequential quantum receivers.

The package covers the sequential waveform-nulling receiver on arbitrary
multimode coherent-state constellations, the sequential testing receiver on
multi-copy pure-state ensembles, and the reference baselines (square-root
measurement, binary optimum, heterodyne, direct detection), together with
sweep and exponent-fitting utilities and a CSV-producing CLI.
"""

from .ensemble import (
    CoherentEnsemble,
    EnsembleGeometry,
    PureStateEnsemble,
    build_ppm,
    build_psk,
    coherent_as_pure,
    coherent_overlap,
    difference_energies,
    geometry,
    load_ensemble,
    scale_to_energy,
)
from .swn import (
    ErrorReport,
    SimEstimate,
    swn_bruteforce_error,
    swn_exact_error,
    swn_exponent_bound,
    swn_simulate,
    swn_upper_bound,
)
from .st import (
    FidelityMatrix,
    fidelity_matrix,
    qce,
    st_exact_error,
    st_simulate,
    st_upper_bound,
)
from .bounds import (
    GramMatrix,
    direct_detection_ppm_error,
    gram_matrix,
    helstrom_binary,
    helstrom_epe,
    heterodyne_epe,
    heterodyne_qpsk_exact,
    heterodyne_union_bound,
    qfunc,
    srm_error,
)
from .exponents import ExponentEstimate, SweepCurve, fit_epe, sweep

__version__ = "0.1.0"

__all__ = [
    "CoherentEnsemble",
    "PureStateEnsemble",
    "EnsembleGeometry",
    "ErrorReport",
    "SimEstimate",
    "FidelityMatrix",
    "GramMatrix",
    "SweepCurve",
    "ExponentEstimate",
    "build_psk",
    "build_ppm",
    "load_ensemble",
    "geometry",
    "difference_energies",
    "scale_to_energy",
    "coherent_overlap",
    "coherent_as_pure",
    "swn_exact_error",
    "swn_bruteforce_error",
    "swn_upper_bound",
    "swn_exponent_bound",
    "swn_simulate",
    "fidelity_matrix",
    "st_exact_error",
    "st_upper_bound",
    "st_simulate",
    "qce",
    "gram_matrix",
    "srm_error",
    "helstrom_binary",
    "helstrom_epe",
    "heterodyne_epe",
    "heterodyne_union_bound",
    "heterodyne_qpsk_exact",
    "direct_detection_ppm_error",
    "qfunc",
    "sweep",
    "fit_epe",
]
