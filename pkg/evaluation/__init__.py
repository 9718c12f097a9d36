from .prequential import (
    ChunkRecord,
    RunTrace,
    SingleLearner,
    memory_sample,
    test_then_train,
    time_sample,
)
from .statistics import (
    FriedmanResult,
    ResultMatrix,
    WilcoxonResult,
    friedman_from_ranks,
    friedman_ranks,
    nemenyi_critical_difference,
    wilcoxon_signed_rank,
)

__all__ = [
    "ChunkRecord",
    "RunTrace",
    "SingleLearner",
    "memory_sample",
    "test_then_train",
    "time_sample",
    "FriedmanResult",
    "ResultMatrix",
    "WilcoxonResult",
    "friedman_from_ranks",
    "friedman_ranks",
    "nemenyi_critical_difference",
    "wilcoxon_signed_rank",
]
