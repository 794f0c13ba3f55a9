"""Wavelet analysis on totally disconnected locally compact abelian groups
with a compact open subgroup: p-adic fields, Laurent series over finite
fields, and unramified quadratic extensions.

Elements are finite digit strings with exact arithmetic; functions are step
functions on finite windows; transforms, dilations, and coset translations
are exact up to float rounding of unit characters.  Wavelet systems come
from the Haar/Shannon construction or from iteratively built frequency-side
tiling sets.
"""

from .groups import (
    Element,
    GroupDescriptor,
    ZERO,
    add,
    apply_A,
    character,
    character_phase,
    d_prefix,
    depth_of,
    element,
    element_from_json,
    element_of_index,
    element_to_json,
    enumerate_window,
    from_fraction,
    from_fraction_pair,
    group_from_json,
    group_to_json,
    index_of_element,
    mul,
    negate,
    pairing,
    pairing_phase,
    restrict,
    theta_eta,
    to_fraction,
    to_fraction_pair,
    unit_exp,
    val_diff,
    valuation,
)
from .stepfn import (
    Ball,
    BallSet,
    CellGuardError,
    DEFAULT_CELL_GUARD,
    SIDE_FREQ,
    SIDE_TIME,
    StepFunction,
    ball,
    ball_measure,
    ballset,
    ballset_from_json,
    ballset_intersect,
    ballset_measure,
    ballset_member,
    ballset_scale,
    ballset_subtract,
    ballset_symmetric_difference_measure,
    ballset_to_json,
    ballset_translate,
    ballset_union,
    evaluate,
    indicator,
    indicator_of_ballset,
    inner_product,
    linear_combine,
    norm_sq,
    refine,
    stepfn_from_json,
    stepfn_max_diff,
    stepfn_to_csv,
    stepfn_to_json,
    zero_stepfn,
)
from .fourier import (
    indicator_transform,
    inverse_transform,
    transform,
    transform_plan,
)
from .operators import (
    BasisIndex,
    apply_basis_index,
    coset_add,
    coset_index,
    cosets_of_depth,
    dilate,
    multiplier_w,
    translate,
    translate_direct_oracle,
)
from .wavelets import (
    EXAMPLE_IDS,
    TranslatedWaveletEvaluator,
    WaveletSetResult,
    WaveletSetSpec,
    WaveletSystem,
    build_wavelet_set,
    default_partition,
    example_closed_form,
    example_group,
    example_lambda_ball,
    example_partition,
    example_spec,
    fixed_point_map,
    haar_closed_form,
    haar_shannon_system,
    system_to_json,
    truncation_depth,
    validate_partition,
    wavelet_eval,
    wavelet_from_set,
    wavelet_set_system,
)
from .verify import (
    CompareReport,
    GramReport,
    ParsevalReport,
    compare_example,
    fixed_point_residual,
    gram_matrix,
    parseval_capture,
    scaled_generator_system,
)

__version__ = "0.1.0"
