"""Forward and inverse three-spectra solver for Sturm-Liouville problems
with non-separated boundary conditions on [0, 1]."""

from .core import (
    DEFAULT_STEPS,
    BoundaryMatrix,
    FundamentalAtOne,
    NumericOverflowError,
    Potential,
    ProblemKind,
    ProblemSpec,
    asymptotic_fundamental,
    evaluate_potential,
    integrate_fundamental,
    u_accumulated,
)
from .charfn import (
    DetSample,
    asymptotic_det,
    char_det,
    char_det_decomposed,
    char_det_full,
)
from .spectrum import (
    IncompleteSpectrumError,
    Spectrum,
    enumerate_eigenvalues,
    verify_spectrum_asymptotics,
)
from .inverse import (
    BasisCoefficients,
    ConditioningError,
    ReconstructionResult,
    ReconstructionTarget,
    basis_decompose,
    borg_reconstruct,
    joint_refine,
    reconstruct_problem,
    recover_a21,
)

__all__ = [
    "DEFAULT_STEPS",
    "BoundaryMatrix",
    "FundamentalAtOne",
    "NumericOverflowError",
    "Potential",
    "ProblemKind",
    "ProblemSpec",
    "asymptotic_fundamental",
    "evaluate_potential",
    "integrate_fundamental",
    "u_accumulated",
    "DetSample",
    "asymptotic_det",
    "char_det",
    "char_det_decomposed",
    "char_det_full",
    "IncompleteSpectrumError",
    "Spectrum",
    "enumerate_eigenvalues",
    "verify_spectrum_asymptotics",
    "BasisCoefficients",
    "ConditioningError",
    "ReconstructionResult",
    "ReconstructionTarget",
    "basis_decompose",
    "borg_reconstruct",
    "joint_refine",
    "reconstruct_problem",
    "recover_a21",
]

__version__ = "0.1.0"
