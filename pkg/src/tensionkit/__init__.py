"""Tension-region calculus for pairs of finite correlated random variables.

Computes the region of achievable triples (I(Y;Q|X), I(X;Q|Y), I(X;Y|Q))
over auxiliary channels Q|XY, its exact axis intercepts and common-
information connections (Gacs-Korner and Wyner), Gray-Wyner and assisted
common-information rate points through affine maps, and sound upper bounds
on the rate of secure two-party sampling via region scaling and containment.
"""

from ._kernels import BACKEND
from .catalog import (
    CatalogEntry,
    bit_ot,
    catalog_names,
    catalog_region,
    connected_example,
    from_file,
    get_entry,
    string_ot_pair,
    two_bit_ot,
    uniform_common,
    z_source,
)
from .derived import (
    ACIPoint,
    CornerRates,
    GrayWynerPoint,
    WynerResult,
    aci_point,
    affine_f,
    affine_g,
    corner_quantities,
    gray_wyner_point,
    wyner_common_information,
)
from .errors import (
    AlphabetMismatchError,
    BudgetExceededError,
    DimensionMismatchError,
    RefusalError,
    TensionkitError,
    ValidationError,
)
from .optimize import (
    DirectionWeights,
    OptimizerConfig,
    ScalarizedResult,
    SlicePoint,
    fibonacci_directions,
    scalarized_min,
    slice_min_sum,
    slice_z,
    support_upper,
    trace_region,
)
from .oracle import (
    GridSpec,
    OracleBound,
    OracleSliceBound,
    brute_force_points,
    brute_force_slice_min,
    brute_force_support,
    grid_channel,
)
from .prob import (
    Alphabet,
    AnyChannel,
    Channel,
    DeterministicChannel,
    ExtendedJoint,
    JointPMF,
    TensionPoint,
    binary_entropy,
    channel_from_dict,
    channel_to_dict,
    conditional_mutual_information,
    entropy,
    joint_entropy,
    joint_from_dict,
    joint_from_json,
    joint_to_dict,
    joint_to_json,
    mutual_information,
    product,
    tension_of,
    total_variation,
)
from .ratebound import (
    RateBoundReport,
    containment_check,
    minkowski_sum,
    rate_upper_bound,
    scale_region,
    shifted_region,
    statistical_shift,
)
from .regions import CertifiedFact, InnerPoint, RegionApprox
from .structure import (
    CharacteristicGraph,
    CommonPart,
    DependentPart,
    Direction,
    Intercepts,
    characteristic_graph,
    common_part,
    dependent_part,
    gk_common_information,
    intercept_witnesses,
    intercepts_exact,
    is_perfectly_resolvable,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # prob
    "Alphabet", "JointPMF", "Channel", "DeterministicChannel", "AnyChannel",
    "ExtendedJoint", "TensionPoint", "entropy", "binary_entropy",
    "joint_entropy", "mutual_information", "conditional_mutual_information",
    "tension_of", "total_variation", "product", "joint_to_dict",
    "joint_from_dict", "joint_to_json", "joint_from_json", "channel_to_dict",
    "channel_from_dict",
    # structure
    "CharacteristicGraph", "CommonPart", "DependentPart", "Direction",
    "Intercepts", "characteristic_graph", "common_part", "dependent_part",
    "gk_common_information", "intercepts_exact", "intercept_witnesses",
    "is_perfectly_resolvable",
    # optimize / regions
    "DirectionWeights", "OptimizerConfig", "ScalarizedResult", "SlicePoint",
    "scalarized_min", "trace_region", "slice_z", "slice_min_sum",
    "support_upper", "fibonacci_directions", "RegionApprox", "InnerPoint",
    "CertifiedFact",
    # oracle
    "GridSpec", "OracleBound", "OracleSliceBound", "brute_force_points",
    "brute_force_support", "brute_force_slice_min", "grid_channel",
    # derived
    "GrayWynerPoint", "ACIPoint", "WynerResult", "CornerRates",
    "gray_wyner_point", "aci_point", "affine_f", "affine_g",
    "wyner_common_information", "corner_quantities",
    # ratebound
    "RateBoundReport", "scale_region", "minkowski_sum", "rate_upper_bound",
    "containment_check", "statistical_shift", "shifted_region",
    # catalog
    "CatalogEntry", "bit_ot", "two_bit_ot", "string_ot_pair", "z_source",
    "connected_example", "uniform_common", "from_file", "get_entry",
    "catalog_names", "catalog_region",
    # errors
    "TensionkitError", "ValidationError", "AlphabetMismatchError",
    "DimensionMismatchError", "BudgetExceededError", "RefusalError",
]
