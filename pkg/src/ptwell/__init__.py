"""Solver for the real bound-state spectrum of a PT-symmetric square well.

The model is an infinite hard-wall well on (-L, L) whose potential acquires
two purely imaginary steps +-ig outside the inner interval (-ell, ell).  The
package computes the real spectrum from the transcendental matching
condition, tracks levels along parameter sweeps, locates level mergers
(exceptional points), classifies levels as robust or fragile under growth of
the coupling, solves the infinite-width shallow limit, and cross-checks
everything against an independent finite-difference discretization.
"""

from .model import PhysicalParams, ScaledParams, energy_from_R, physical_params, potential_at, scale_params
from .secular import (
    MatchCoefficients,
    SecularSample,
    SigmaTau,
    eval_Dratio,
    eval_M,
    eval_N,
    matching_residual,
    secular_det_R,
    sigma_of_R,
    solve_coefficients,
    tau_of_R,
    wavefunction_at,
)
from .lattice import LatticeCoords, TrigConstants, bracket_hints, lattice_map_R, trig_constants
from .spectrum import Root, ScanDiagnostics, Spectrum, Stability, count_real_roots, scan_roots, solve_nsw
from .continuation import (
    Branch,
    ContinuationError,
    ExceptionalPoint,
    Track,
    classify_levels,
    find_exceptional,
    sweep,
    touching_lambda_in,
    touching_lambda_out,
    verify_touching_lambda_in,
)
from .shallow import (
    ShallowLevel,
    ShallowParams,
    shallow_wavefunction,
    slope_parameters,
    solve_level,
    solve_levels,
    strong_coupling_omega,
    weak_coupling_eta,
)
from .oracle import GridSpec, OracleSpectrum, PTSymmetryError, char_det, oracle_spectrum

__version__ = "0.1.0"

__all__ = [
    "PhysicalParams",
    "ScaledParams",
    "scale_params",
    "physical_params",
    "potential_at",
    "energy_from_R",
    "SigmaTau",
    "SecularSample",
    "MatchCoefficients",
    "eval_M",
    "eval_N",
    "eval_Dratio",
    "sigma_of_R",
    "tau_of_R",
    "secular_det_R",
    "matching_residual",
    "solve_coefficients",
    "wavefunction_at",
    "LatticeCoords",
    "TrigConstants",
    "trig_constants",
    "lattice_map_R",
    "bracket_hints",
    "Root",
    "Spectrum",
    "Stability",
    "ScanDiagnostics",
    "scan_roots",
    "solve_nsw",
    "count_real_roots",
    "Branch",
    "Track",
    "ExceptionalPoint",
    "ContinuationError",
    "sweep",
    "find_exceptional",
    "classify_levels",
    "touching_lambda_in",
    "verify_touching_lambda_in",
    "touching_lambda_out",
    "ShallowParams",
    "ShallowLevel",
    "solve_level",
    "solve_levels",
    "weak_coupling_eta",
    "strong_coupling_omega",
    "slope_parameters",
    "shallow_wavefunction",
    "GridSpec",
    "OracleSpectrum",
    "PTSymmetryError",
    "char_det",
    "oracle_spectrum",
    "__version__",
]
