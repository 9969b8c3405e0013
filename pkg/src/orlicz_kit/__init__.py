"""Numerical toolkit for Orlicz functions and Orlicz sequence/function spaces."""

from .exceptions import DomainError, IndexZeroError, OrliczError, PreconditionError, SearchFailed, SizeError
from .functions import (
    DEFAULT_TOL,
    ExpMinusOne,
    LogPerturbedPower,
    MaxPowers,
    MinPowers,
    OrliczFunction,
    Power,
    PowerComposed,
    Regime,
    SmallExtension,
    Table,
    ToleranceConfig,
    concavity_check,
    convexity_check,
    equivalence_check,
    evaluate,
    function_from_spec,
    halving_constant,
    inverse,
    power_compose,
)
from .growth import (
    delta2_check,
    delta2_equivalence_suite,
    delta_q_best_constant,
    delta_star_p_best_constant,
    estimate_indices,
)
from .regularization import extend_small_to_all, regularize_concave_power, regularize_convex_power
from .conjugation import biconjugate, duality_transfer_check, young_conjugate
from .modular import (
    MeasureSpace,
    StepFunction,
    indicator_norm,
    luxemburg_norm,
    modular,
    norm_identity_check,
    quasi_triangle_constant,
    vector_from_spec,
)
from .geometry import (
    InstanceSpec,
    WitnessFamily,
    build_linfty_witness,
    build_lower_estimate_witness,
    build_type_failure_witness,
    probe_concavity,
    probe_convexity,
    probe_cotype,
    probe_lower_estimate,
    probe_type,
    probe_upper_estimate,
    rademacher_average,
)

__version__ = "0.1.0"
