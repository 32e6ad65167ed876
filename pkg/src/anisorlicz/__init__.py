"""Anisotropic Orlicz-Sobolev toolkit and a discrete mountain-pass solver."""

from .young import (
    GFunction,
    GrowthIndices,
    SamplePlan,
    ScalarFunction,
    Verdict,
    check_delta2_nabla2,
    conjugate_scalar,
    default_plan,
    growth_indices,
    log_slope,
    xi_bounds,
)
from .rearrangement import (
    VolumeModel,
    compute_phi_circ,
    left_cont_inverse,
    level_set_volume,
    phi_circ_power,
)
from .conjugation import (
    check_dominates,
    check_integrability,
    check_phi2,
    compute_H,
    compute_phi_n,
    equivalent,
    power_sum_conjugate_exponent,
)
from .spaces import (
    DomainSpec,
    Field,
    VectorField,
    gradient_field,
    luxemburg_norm,
    modular,
    random_bump_sum,
    sobolev_norm,
    verify_modular_norm_bounds,
    verify_sobolev_inequality,
)

__version__ = "0.1.0"
