from .weighting_rules import (
    AUE2_EPSILON,
    AccuracyUpdated,
    AccuracyWeighted,
    DynamicWeightedMajority,
    GooweSingle,
    GooweWeighting,
    MajorityVote,
    RuleName,
    WeightingRule,
    WeightSource,
    aue2_weights,
    awe_weights,
    dwm_update,
    mse_i,
    mse_r,
    mv_weights,
    parse_rule,
)
from .block_ensemble import BlockEnsemble, base1, base1_run, base2, base2_run

__all__ = [
    "AUE2_EPSILON",
    "AccuracyUpdated",
    "AccuracyWeighted",
    "DynamicWeightedMajority",
    "GooweSingle",
    "GooweWeighting",
    "MajorityVote",
    "RuleName",
    "WeightingRule",
    "WeightSource",
    "aue2_weights",
    "awe_weights",
    "dwm_update",
    "mse_i",
    "mse_r",
    "mv_weights",
    "parse_rule",
    "BlockEnsemble",
    "base1",
    "base1_run",
    "base2",
    "base2_run",
]
