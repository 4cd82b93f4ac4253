"""Submodularity certification toolkit for Jaccard-index set functions.

Evaluate the Jaccard index as a set function of the prediction or of the
misprediction set, certify submodularity / supermodularity of arbitrary
finite set functions by exhaustive enumeration, construct closed-form
counterexamples for the prediction-domain index, and build Lovasz
extension surrogates of submodular losses.
"""

from .core import (
    DEFAULT_FLOAT_TOLERANCE,
    GroundSet,
    MAX_GROUND_SIZE,
    SetFunctionHandle,
    TABULATION_CAP,
    Value,
    coverage_function,
    format_mask,
    marginal_gain,
    mask_from_elements,
    mask_to_elements,
    modular_function,
    negate,
    parse_mask,
    submasks,
    symdiff_transform,
    tabulate,
    tabulated_function,
)
from .certify import (
    DEFINITIONAL_CAP,
    LOCAL_CAP,
    SEARCH_CAP,
    SUBMODULARITY,
    SUPERMODULARITY,
    CertificationReport,
    Counterexample,
    certify_definitional,
    certify_local,
    find_counterexample,
    not_submodular_witness,
    not_supermodular_witness,
)
from .errors import (
    CapacityError,
    InfeasibleConfigurationError,
    PreconditionError,
    SetFunctionError,
)
from .jaccard import (
    JaccardFamily,
    chain_inequality_check,
    direct_handle,
    jaccard_index,
    jaccard_loss,
    loss_handle,
    marginal_difference_direct,
    marginal_difference_misprediction,
    misprediction_handle,
    misprediction_jaccard,
)
from .lovasz import (
    ConvexityProbe,
    LovaszResult,
    RelaxedPoint,
    SubgradientProbe,
    convexity_probe,
    lovasz_extension,
    subgradient_probe,
    subgradient_validity_check,
    vertex_agreement_check,
)

__version__ = "0.1.0"
