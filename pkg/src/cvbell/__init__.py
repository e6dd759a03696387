"""Bell nonlocality and entanglement of two-mode Gaussian states.

Closed-form maximum of the Wigner-function Bell-CHSH combination, local
standard-form reduction, Simon/PPT entanglement tests, and randomized checks
that every nonlocal Gaussian state is entangled.
"""
from ._backend import BACKEND
from .bell import (
    TMSV_CEILING,
    BellEvaluationPoint,
    BellReport,
    OptimizerConfig,
    bell_function,
    bell_intermediate,
    bell_max_closed_form,
    bell_max_numeric,
    is_nonlocal,
    ray_profile,
    scaled_point_to_phase,
)
from .covariance import (
    OMEGA,
    CovarianceMatrix,
    PhasePoint,
    blocks,
    local_invariants,
    purity,
    validate_covariance,
    wigner,
)
from .entanglement import (
    EntanglementReport,
    entanglement_report,
    log_negativity,
    mixedness_bounds,
    ppt_symplectic_eigenvalue,
    simon_criterion,
)
from .errors import (
    ChainAssertionError,
    CovarianceError,
    NonConvergence,
    NotSymmetric,
    NumericalDomain,
    SamplerStarvation,
    SingularCovariance,
    Unphysical,
)
from .standard_form import (
    LocalSymplectic,
    StandardForm,
    apply_local_symplectic,
    canonicalize_signs,
    random_local_symplectic,
    reduce,
)
from .states import StateFile, analyze, tmsv_covariance, tmsv_standard_form
from .verification import (
    ChainReport,
    ScanReport,
    chain_inequality_check,
    sample_physical_states,
    scan_nonlocal_implies_entangled,
    taylor_bound_check,
)

__version__ = "0.1.0"
