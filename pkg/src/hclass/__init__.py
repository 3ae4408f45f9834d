"""Exact Hurwitz class numbers, congruence scanning, and the splitting dictionary."""

from .arith import (
    DiscriminantFactorization,
    PAdicSplit,
    epsilon4,
    fundamental_factorization,
    is_fundamental_discriminant,
    is_prime,
    is_square_mod,
    kronecker,
    modinv,
    p_split,
)
from .congruence import (
    CongruenceReport,
    CouplingReport,
    Refuted,
    ScanConfig,
    VerifiedUpTo,
    check_atkin,
    check_ramanujan,
    check_sibling_congruences,
    classify_maximal_nonholomorphic,
    ell_div_ab_check,
    equivalence_check,
    in_predicted_family,
    mod2_congruence_predicted,
    mod2_scan,
    predicted_progression,
    scan_progressions,
)
from .fields import (
    FieldWitness,
    SearchExhausted,
    SplittingSpec,
    check_divisibility_family,
    find_indivisible_field,
    progression_from_splitting_spec,
    splitting_spec_from_progression,
    splitting_type,
)
from .hurwitz import (
    CacheFormatError,
    ClassNumberCache,
    HurwitzEvaluator,
    TwelfthInteger,
    build_cache,
    class_number_h,
    ell_divides,
    hurwitz_H,
    reduced_forms_oracle,
    reduced_forms_table,
    units_omega,
)
from .qseries import (
    QSeries,
    apply_U,
    eisenstein_mod3_check,
    eisenstein_series,
    hurwitz_generating_series,
    kloosterman,
    theta_cubed,
)
from .square_classes import (
    Progression,
    SquareClass,
    irregular_expansion,
    is_maximal_regular_shape,
    is_nonholomorphic,
    is_regular,
    square_class_contains,
    square_class_members,
)
from .transform import (
    AccuracyError,
    SlashContext,
    T_factor,
    delta_factor,
    gcd_residue_partition_check,
    sample_points,
    transformed_expansion,
    transformed_value,
    verify_transformation,
)

__version__ = "0.1.0"
