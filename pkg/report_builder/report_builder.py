import json
import logging
from pathlib import Path
from typing import Any

import pandas as pd

from evaluation import FriedmanResult, RunTrace, WilcoxonResult

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6f"


class ReportBuilder:
    """Writes run traces, summaries, result matrices and statistics reports"""

    TRACE_SUFFIX = ".trace.csv"
    TIMING_SUFFIX = ".timing.csv"
    SUMMARY_SUFFIX = ".summary.json"

    def __init__(self, output_dir: str | Path):
        """
        Initialize the ReportBuilder

        Args:
            output_dir (str | Path): Directory receiving every file
        """
        self.output_dir = Path(output_dir)

    def _ensure_dir(self) -> None:
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def path_for(self, run_id: str, suffix: str) -> Path:
        return self.output_dir / f"{run_id}{suffix}"

    @staticmethod
    def write_csv(frame: pd.DataFrame, path: Path, config_hash: str, index: bool = False) -> Path:
        """
        Write a CSV headed by its config hash

        Args:
            frame (DataFrame): The table
            path (Path): Target file
            config_hash (str): Hash of the configuration that produced the table
            index (bool): Whether to write the frame index as the first column

        Returns:
            Path: The written file
        """
        with open(path, "w", newline="") as handle:
            handle.write(f"# config_hash={config_hash}\n")
            frame.to_csv(handle, index=index, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info(f"Wrote {path}")
        return path

    def write_run(
        self,
        run_id: str,
        trace: RunTrace,
        descriptor: dict[str, Any],
        config_hash: str,
        wall_seconds: float,
    ) -> dict[str, Any]:
        """
        Write the trace, timing and summary files of one run

        Args:
            run_id (str): File stem
            trace (RunTrace): The finished run
            descriptor (dict): Canonical descriptor of the run
            config_hash (str): Its hash
            wall_seconds (float): Elapsed wall time, stored as metadata only

        Returns:
            dict: The summary as written
        """
        self._ensure_dir()
        self.write_csv(trace.to_frame(), self.path_for(run_id, self.TRACE_SUFFIX), config_hash)
        self.write_csv(
            trace.timing_frame(), self.path_for(run_id, self.TIMING_SUFFIX), config_hash
        )

        summary = {
            **trace.summary(),
            "run_id": run_id,
            "config_hash": config_hash,
            "cs_per_1000": trace.cs_per_1000,
            "descriptor": descriptor,
            "metadata": {"wall_seconds": wall_seconds},
        }
        path = self.path_for(run_id, self.SUMMARY_SUFFIX)
        path.write_text(json.dumps(summary, indent=2, sort_keys=True))
        logger.info(f"Wrote {path}")
        return summary

    def load_summary(self, run_id: str) -> dict[str, Any] | None:
        """A previously written summary, or None"""
        path = self.path_for(run_id, self.SUMMARY_SUFFIX)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError:
            logger.warning(f"Ignoring unreadable summary {path}")
            return None

    def write_matrix(self, frame: pd.DataFrame, name: str, config_hash: str) -> Path:
        """Datasets × algorithms matrix, dataset names in the first column"""
        self._ensure_dir()
        frame = frame.copy()
        frame.index.name = "dataset"
        return self.write_csv(frame, self.output_dir / f"{name}.csv", config_hash, index=True)

    def write_json(self, data: dict[str, Any], name: str) -> Path:
        self._ensure_dir()
        path = self.output_dir / name
        path.write_text(json.dumps(data, indent=2, sort_keys=True))
        logger.info(f"Wrote {path}")
        return path

    @staticmethod
    def format_friedman(result: FriedmanResult) -> str:
        """Plain-text Friedman report, best average rank first"""
        ranks = result.average_ranks.sort_values(ascending=False)
        width = max(len(str(name)) for name in ranks.index)
        lines = ["Average ranks (higher is better):"]
        lines += [f"  {str(name):<{width}}  {rank:.3f}" for name, rank in ranks.items()]
        lines += [
            f"Friedman chi-square = {result.chi_square:.3f} "
            f"(df {result.df_numerator}, p = {result.chi_square_p:.3g})",
            f"Iman-Davenport F = {result.f_statistic:.3f} "
            f"(df {result.df_numerator}, {result.df_denominator}, p = {result.f_p:.3g})",
            f"Nemenyi critical difference (alpha {result.alpha}) = "
            f"{result.critical_difference:.3f}",
        ]
        return "\n".join(lines)

    @staticmethod
    def format_wilcoxon(first: str, second: str, result: WilcoxonResult) -> str:
        return "\n".join(
            [
                f"{first} vs {second}:",
                f"  positive differences: {result.positive}",
                f"  negative differences: {result.negative}",
                f"  T = {result.statistic:.1f} (n = {result.n}, {result.method})",
                f"  two-tailed p = {result.p_value:.4f}",
            ]
        )
