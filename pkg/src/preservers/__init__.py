"""Numerical toolkit for linear maps that preserve unitary multiples or the
multiplicativity of the spectral norm over matrix pairs.

The layers build on each other: field-tagged matrices and tolerances
(matcore), realified operators on matrix space (linop), the canonical map
families (families), norm and subspace checks on pairs (specnorm), canonical
form recovery and witness search (canonize), and the seeded theorem suites
(harness).
"""

from .matcore import (
    DEFAULT_TOL, FIELD_C, FIELD_R, FIELDS, Mat, SchemaError, ToleranceProfile,
    eye, frobenius_inner, haar_unitary, mat, mat_from_json, mat_to_json,
    random_mat, random_unit_vector, tolerance_from_json, tolerance_to_json,
    unit, zeros,
)
from .linop import (
    BijectivityCheck, MatLinOp, compose, conj_op, conj_transpose_op,
    identity_op, inverse, is_bijective, left_mult_op, linearity_class,
    op_from_action, op_from_images, op_from_json, op_to_json, right_mult_op,
    transpose_op,
)
from .families import (
    QUATERNION_BASIS, SIGMA1, SIGMA2, SIGMA3, VARIANT_CONJ,
    VARIANT_CONJ_TRANSPOSE, VARIANT_ID, VARIANT_TRANSPOSE, VARIANTS,
    apply_variant, mu_twist, phi_c, sandwich_op, so3_of_unitary, su2_lift,
    variants_for, zeta_coords,
)
from .specnorm import (
    InconsistencyError, PairVerdict, STAR_LEFT, STAR_RIGHT,
    is_normal_by_norm, is_unitary_multiple, norm_mult_direct,
    norm_mult_structural, rot_refl_decompose, sesqui_mult, spectral_norm,
    svd, v12_membership, v3_decompose,
)
from .canonize import (
    CanonicalForm, RELATIONS, RELATION_PRODUCT, RELATION_STAR_LEFT,
    RELATION_STAR_RIGHT, RELATION_UNITARY, TAG_MU_TWIST, TAG_PHI_C,
    TAG_SANDWICH, TAG_TWO_BY_TWO, TAG_UNCLASSIFIED, analyze_operator,
    classify_norm_mult_preserver, decompose_sandwich, form_to_json,
    maps_unitaries_to_multiples, reduce_2x2_complex, reduce_2x2_real,
    two_by_two_op, witness_nonpreservation,
)
from .harness import (
    SUITE_NAMES, SuiteConfig, SuiteReport, check_pair_preservation,
    config_from_json, config_to_json, gen_norm_mult_pair, gen_sesqui_pair,
    report_to_json, run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "BijectivityCheck", "CanonicalForm", "DEFAULT_TOL", "FIELDS", "FIELD_C",
    "FIELD_R", "InconsistencyError", "Mat", "MatLinOp", "PairVerdict",
    "QUATERNION_BASIS", "RELATIONS", "RELATION_PRODUCT", "RELATION_STAR_LEFT",
    "RELATION_STAR_RIGHT", "RELATION_UNITARY", "SIGMA1", "SIGMA2", "SIGMA3",
    "STAR_LEFT", "STAR_RIGHT", "SUITE_NAMES", "SchemaError", "SuiteConfig",
    "SuiteReport", "TAG_MU_TWIST", "TAG_PHI_C", "TAG_SANDWICH",
    "TAG_TWO_BY_TWO", "TAG_UNCLASSIFIED", "ToleranceProfile", "VARIANTS",
    "VARIANT_CONJ", "VARIANT_CONJ_TRANSPOSE", "VARIANT_ID",
    "VARIANT_TRANSPOSE", "analyze_operator", "apply_variant",
    "check_pair_preservation", "classify_norm_mult_preserver", "compose",
    "config_from_json", "config_to_json", "conj_op", "conj_transpose_op",
    "decompose_sandwich", "eye", "form_to_json", "frobenius_inner",
    "gen_norm_mult_pair", "gen_sesqui_pair", "haar_unitary", "identity_op",
    "inverse", "is_bijective", "is_normal_by_norm", "is_unitary_multiple",
    "left_mult_op", "linearity_class", "maps_unitaries_to_multiples", "mat",
    "mat_from_json", "mat_to_json", "mu_twist", "norm_mult_direct",
    "norm_mult_structural", "op_from_action", "op_from_images",
    "op_from_json", "op_to_json", "phi_c", "random_mat",
    "random_unit_vector", "reduce_2x2_complex", "reduce_2x2_real",
    "report_to_json", "right_mult_op", "rot_refl_decompose", "run_suite",
    "sandwich_op", "sesqui_mult", "so3_of_unitary", "spectral_norm",
    "su2_lift", "svd", "tolerance_from_json", "tolerance_to_json",
    "transpose_op", "two_by_two_op", "unit", "v12_membership",
    "v3_decompose", "variants_for", "witness_nonpreservation", "zeros",
    "zeta_coords",
]
