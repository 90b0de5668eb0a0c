"""kreinshift: certified numerics for bilateral weighted shifts.

Log-domain weight families evaluated exactly at astronomically large
indices, lazy shift operator powers on finitely supported vectors,
certified operator norms and spectral radius sandwiches, orbit growth
classification against a target rate, the doubled space with its
indefinite inner product and invariant sign-definite subspaces, and a
finite-dimensional brute-force oracle.
"""

from .weights import (
    DEFAULT_PRECISION_BITS,
    ConstantWeights,
    DerivativeTailBound,
    GeometricWeights,
    LogWeight,
    OscillatingWeights,
    RuleWeights,
    WeightSequence,
    WitnessKind,
    WitnessSchedule,
    eval_log_weight,
    log_ratio,
    parse_weight_spec,
    phi,
    psi,
    tail_derivative_bound,
    witness_index,
)
from .shift_ops import (
    CoefficientOverflowError,
    FinSuppVector,
    FlipConjugationReport,
    NormCertificate,
    OperatorKind,
    ShiftOperator,
    SpectralRadiusBounds,
    apply_power,
    flip_conjugate_check,
    norm_power,
    norm_power_sweep,
    orbit_coefficient_log,
    specrad_bounds,
)
from .growth import (
    AllKindsReport,
    GrowthQuery,
    GrowthStatus,
    GrowthVerdict,
    classify_all_kinds,
    classify_growth,
    orbit_log_norm,
    orbit_norm_sweep,
    s_trivial_all_four,
)
from .krein import (
    BatteryReport,
    DensityReport,
    DoubledOperator,
    DoubledVector,
    JUnitarityReport,
    SpanSign,
    density_witness,
    generator,
    generator_identity_battery,
    hat_apply,
    indefinite_inner,
    j_unitarity_check,
    random_unitarity_samples,
    sign_definiteness_check,
    span_membership,
)
from .findim import (
    ThresholdAmbiguityError,
    check_direct_sum_split,
    check_invariant_subspace_bound,
    invariance_residual,
    orbit_scan,
    power_bounded_subspace,
    sample_operator_with_gap,
    spectral_radius_matrix,
)

__version__ = "0.1.0"
