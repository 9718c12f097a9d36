from .run_config import (
    OUTPUT_DIR_ENV,
    Algorithm,
    EnsembleSpec,
    EvaluationSpec,
    LearnerKind,
    LearnerSpec,
    RunDescriptor,
    StreamSpec,
    SuiteDescriptor,
    apply_overrides,
    hash_config,
    load_descriptor,
    resolve_output_dir,
)

__all__ = [
    "OUTPUT_DIR_ENV",
    "Algorithm",
    "EnsembleSpec",
    "EvaluationSpec",
    "LearnerKind",
    "LearnerSpec",
    "RunDescriptor",
    "StreamSpec",
    "SuiteDescriptor",
    "apply_overrides",
    "hash_config",
    "load_descriptor",
    "resolve_output_dir",
]
