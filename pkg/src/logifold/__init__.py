"""Decision-DAG views of small ReLU classifiers, certainty-threshold
ensemble combination over restricted chart domains, and exact-measure
verification of the bounded-size interval counterexample."""

from .llg_core import (
    AffineMap,
    DiscoveryConfig,
    FuzzyLinearLogicalGraph,
    FuzzyOutput,
    LinearLogicalGraph,
    MlpSpec,
    certainty,
    compile_mlp,
    compile_mlp_fuzzy,
    evaluate_fuzzy,
    evaluate_llg,
)
from .ensemble import (
    Chart,
    Logifold,
    ThresholdLadder,
    embed_to_global,
    evaluate_table,
    fuzzy_domain,
    majority_vote,
    refined_vote,
    sigma_threshold,
    simple_average,
    specialize_routing,
)
from .model_io import (
    GroundTruth,
    PredictionMatrix,
    load_mlp,
    load_predictions,
    union_label_space,
)
from .theory import (
    DyadicRational,
    Family,
    StepFunction,
    agreement_measure,
    check_proof_quantities,
    consistency,
    discontinuity_bound,
    ensemble as family_ensemble,
    search_max_agreement,
    target_value,
    vote_profile,
)

__version__ = "0.1.0"
