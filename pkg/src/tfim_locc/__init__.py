"""Majorization-based LOCC convertibility of transverse-field Ising ground states.

Exact even-sector ground states for chains of 4 to 22 spins, reduced
spectra and Renyi entropies, partial-sum monotonicity profiles with
minimum detection, LOCC/entropy-ordering verdicts, and finite-size
power-law extrapolation of the convertibility transition.
"""

from .convertibility import (
    EloccVerdict,
    MajorizationVerdict,
    MinimumPoint,
    MonotonicityProfile,
    SchmidtVector,
    Verdict,
    build_profiles,
    classify_locc_pair,
    elocc_compare,
    find_minimum,
    majorize,
    schmidt_vector,
)
from .eigensolver import GroundState, SolverOptions, free_fermion_ground_energy, ground_state
from .entanglement import (
    ReducedSpectrum,
    RenyiCurve,
    default_alpha_grid,
    reduced_spectrum,
    renyi_curve,
    renyi_entropy,
)
from .errors import (
    ConfigurationError,
    ConvergenceError,
    CoverageError,
    FitError,
    GridError,
    ShapeError,
    SizeError,
    UnsupportedBlockError,
    ValidationError,
)
from .hamiltonian import HamiltonianSpec, SectorOperator, apply_hamiltonian, dense_matrix
from .pipeline import (
    ReportBundle,
    SweepConfig,
    SweepRecord,
    build_report,
    load_record,
    run_sweep,
    save_record,
)
from .scaling import ScalingFit, fit_power_law
from .spin_basis import SectorMap, build_sector_map
from .version import __version__

__all__ = [
    "__version__",
    "EloccVerdict",
    "MajorizationVerdict",
    "MinimumPoint",
    "MonotonicityProfile",
    "SchmidtVector",
    "Verdict",
    "build_profiles",
    "classify_locc_pair",
    "elocc_compare",
    "find_minimum",
    "majorize",
    "schmidt_vector",
    "GroundState",
    "SolverOptions",
    "free_fermion_ground_energy",
    "ground_state",
    "ReducedSpectrum",
    "RenyiCurve",
    "default_alpha_grid",
    "reduced_spectrum",
    "renyi_curve",
    "renyi_entropy",
    "ConfigurationError",
    "ConvergenceError",
    "CoverageError",
    "FitError",
    "GridError",
    "ShapeError",
    "SizeError",
    "UnsupportedBlockError",
    "ValidationError",
    "HamiltonianSpec",
    "SectorOperator",
    "apply_hamiltonian",
    "dense_matrix",
    "ReportBundle",
    "SweepConfig",
    "SweepRecord",
    "build_report",
    "load_record",
    "run_sweep",
    "save_record",
    "ScalingFit",
    "fit_power_law",
    "SectorMap",
    "build_sector_map",
]
