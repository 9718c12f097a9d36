from .weight_system import (
    WeightSolution,
    WeightSystem,
    WindowedWeightSolver,
    accumulate_instance,
    accumulate_system,
    aggregate_votes,
    build_system,
    solve_weights,
)
from .goowe_ensemble import (
    ENSEMBLE_OVERHEAD_BYTES,
    ChunkEnsemble,
    Component,
    GooweConfig,
    GooweEnsemble,
    LearnerFactory,
    chunk_weight_system,
    component_scores,
    least_weighted,
)

__all__ = [
    "WeightSolution",
    "WeightSystem",
    "WindowedWeightSolver",
    "accumulate_instance",
    "accumulate_system",
    "aggregate_votes",
    "build_system",
    "solve_weights",
    "ENSEMBLE_OVERHEAD_BYTES",
    "ChunkEnsemble",
    "Component",
    "GooweConfig",
    "GooweEnsemble",
    "LearnerFactory",
    "chunk_weight_system",
    "component_scores",
    "least_weighted",
]
