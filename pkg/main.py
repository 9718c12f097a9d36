import json
import logging
import sys
from pathlib import Path

import click

from data_classes import DescriptorError, GooweError
from evaluation import ResultMatrix, friedman_ranks, wilcoxon_signed_rank
from experiment_runner import ExperimentRunner
from report_builder import ReportBuilder
from run_config import (
    RunDescriptor,
    StreamSpec,
    SuiteDescriptor,
    apply_overrides,
    load_descriptor,
    resolve_output_dir,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log debug output")
def cli(verbose: bool) -> None:
    """Optimal-weight streaming ensembles: generate, run, compare and test"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.option("--stream", "stream_name", required=True, help="Preset or generator name")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--count", type=int, required=True, help="Instances to write")
@click.option("--out", "out_path", type=click.Path(path_type=Path), required=True)
@click.option("--length", type=int, default=None, help="Stream length drifts are placed over")
@click.option("--set", "assignments", multiple=True, help="Generator parameter, key=value")
def generate(
    stream_name: str,
    seed: int,
    count: int,
    out_path: Path,
    length: int | None,
    assignments: tuple[str, ...],
) -> int:
    """Write a seeded stream to a headerless CSV with a schema sidecar"""
    params = apply_overrides({}, assignments)
    spec = StreamSpec(generator=stream_name, length=length or (count or None), params=params)
    ExperimentRunner.generate(spec, seed, count, out_path)
    click.echo(f"Wrote {count} instances to {out_path}")
    return EXIT_OK


@cli.command()
@click.argument("descriptor_path", type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=None)
@click.option("--max-instances", type=int, default=None)
@click.option("--algorithm", default=None, help="goowe, base1, base2 or single")
@click.option("--rule", default=None, help="Weighting rule for base1/base2, e.g. dwm(0.5,0.01)")
@click.option("--output-dir", default=None)
@click.option("--set", "assignments", multiple=True, help="Descriptor override, key.path=value")
def run(
    descriptor_path: Path,
    seed: int | None,
    max_instances: int | None,
    algorithm: str | None,
    rule: str | None,
    output_dir: str | None,
    assignments: tuple[str, ...],
) -> int:
    """Evaluate one ensemble on one stream prequentially"""
    flags = []
    if seed is not None:
        flags.append(f"seed={seed}")
    if max_instances is not None:
        flags.append(f"evaluation.max_instances={max_instances}")
    if algorithm is not None:
        flags.append(f"ensemble.algorithm={json.dumps(algorithm)}")
    if rule is not None:
        flags.append(f"ensemble.rule={json.dumps(rule)}")
    data = apply_overrides(load_descriptor(descriptor_path), [*flags, *assignments])
    descriptor = RunDescriptor.from_dict(data)
    target = resolve_output_dir(output_dir, descriptor.output_dir)

    summary = ExperimentRunner.run_to_disk(descriptor, target)
    click.echo(
        f"{descriptor.run_id}: accuracy {summary['accuracy']:.3f}% over "
        f"{summary['instances']} instances, {summary['mean_memory_mb']:.3f} MB, "
        f"{summary['cs_per_1000']:.3f} CS/1000"
    )
    return EXIT_OK


@cli.command()
@click.argument("suite_path", type=click.Path(path_type=Path))
@click.option("--output-dir", default=None)
@click.option("--resume", is_flag=True, help="Reuse runs whose summary has the same config hash")
@click.option("--workers", type=int, default=None, help="Parallel runs (default: cores - 1)")
@click.option("--set", "assignments", multiple=True, help="Suite override, key.path=value")
def compare(
    suite_path: Path,
    output_dir: str | None,
    resume: bool,
    workers: int | None,
    assignments: tuple[str, ...],
) -> int:
    """Run ensembles × streams × seeds and write the result matrices"""
    suite = SuiteDescriptor.from_dict(apply_overrides(load_descriptor(suite_path), assignments))
    if workers is not None and workers < 1:
        raise click.BadParameter(f"must be positive, got {workers}", param_hint="--workers")
    target = resolve_output_dir(output_dir, suite.output_dir)

    result = ExperimentRunner.compare(suite, target, resume=resume, workers=workers)
    click.echo(result.matrices["accuracy"].to_string(float_format=lambda v: f"{v:.3f}"))
    if result.failures:
        for cell in result.failures:
            click.echo(f"FAILED {cell.run_id}: {cell.error}", err=True)
        return EXIT_PARTIAL
    return EXIT_OK


@cli.command()
@click.argument("matrix_path", type=click.Path(path_type=Path))
@click.argument("test", type=click.Choice(["friedman", "wilcoxon"]))
@click.option("--pair", nargs=2, default=None, help="Two algorithm columns for wilcoxon")
@click.option("--lower-is-better", is_flag=True, help="Rank smaller values first (time, memory)")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Print the result as JSON")
def stats(
    matrix_path: Path,
    test: str,
    pair: tuple[str, str] | None,
    lower_is_better: bool,
    alpha: float,
    as_json: bool,
) -> int:
    """Friedman ranks or a Wilcoxon signed-rank pair test on a result matrix"""
    if not matrix_path.exists():
        raise FileNotFoundError(f"Matrix not found: {matrix_path}")
    matrix = ResultMatrix.from_csv(matrix_path)

    if test == "friedman":
        friedman = friedman_ranks(matrix, higher_is_better=not lower_is_better, alpha=alpha)
        output = (
            json.dumps(friedman.to_dict(), indent=2)
            if as_json
            else ReportBuilder.format_friedman(friedman)
        )
    else:
        if not pair:
            raise click.UsageError("wilcoxon needs --pair FIRST SECOND")
        first, second = pair
        a, b = matrix.column(first), matrix.column(second)
        if lower_is_better:
            a, b = -a, -b
        wilcoxon = wilcoxon_signed_rank(a, b)
        output = (
            json.dumps(wilcoxon.to_dict(), indent=2)
            if as_json
            else ReportBuilder.format_wilcoxon(first, second, wilcoxon)
        )
    click.echo(output)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and map failures to exit codes"""
    try:
        rv = cli.main(args=argv, prog_name="goowe", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except DescriptorError as e:
        logger.error(f"Invalid descriptor: {e}")
        return EXIT_USAGE
    except (GooweError, FileNotFoundError) as e:
        logger.error(f"Data error: {e}")
        return EXIT_DATA
    except ValueError as e:
        logger.error(str(e))
        return EXIT_USAGE
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
