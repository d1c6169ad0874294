"""Collectibility-based entanglement detection for pure and mixed multipartite states."""

from .bounds import (
    BoundQuery,
    BoundResult,
    MaximizerMatrix,
    critical_purity,
    maximizer_matrix,
    ppt_bound,
    purity_floors,
    r_bound,
)
from .collect import (
    CollectReport,
    GramMatrix2,
    OptimizerConfig,
    SeparableBasisSet,
    Verdict,
    collectibility_mixed_max,
    collectibility_pure_max,
    collectibility_Ya,
    collectibility_Ya_max,
    gram_from_pure,
    product_functional_mixed,
    product_functional_pure,
)
from .qcore import (
    DensityMatrix,
    PureState,
    SchmidtData,
    TensorShape,
    negativity,
    partial_transpose,
    purity,
    schmidt,
    validate_density,
)
from .werner import (
    WernerSpec,
    WernerThresholds,
    negativity_collectibility,
    renyi_half,
    saturating_basis,
    schur_theta,
    thresholds_two_qubit,
    werner_collectibility,
    werner_state,
)

__version__ = "0.1.0"
