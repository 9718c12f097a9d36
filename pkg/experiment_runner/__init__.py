from .experiment_runner import CellResult, CompareResult, ExperimentRunner

__all__ = ["CellResult", "CompareResult", "ExperimentRunner"]
