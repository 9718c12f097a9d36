import json

import pandas as pd
import pytest

from main import EXIT_DATA, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, main

FAST_ENSEMBLE = {"chunk_size": 100, "window_size": 100, "learner": {"kind": "naive_bayes"}}


def write_json(path, data):
    path.write_text(json.dumps(data))
    return path


@pytest.fixture
def run_descriptor(tmp_path):
    return write_json(
        tmp_path / "run.json",
        {"stream": {"generator": "sea-f", "length": 2000}, "ensemble": FAST_ENSEMBLE, "seed": 5},
    )


@pytest.fixture
def suite_descriptor(tmp_path):
    return write_json(
        tmp_path / "suite.json",
        {
            "ensembles": [FAST_ENSEMBLE],
            "streams": [
                {"generator": "sea-f", "length": 600},
                {"generator": "hyp-f", "length": 600},
            ],
            "seeds": [1, 2, 3],
            "evaluation": {"report_interval": 200},
        },
    )


def test_generate_is_deterministic(tmp_path):
    paths = [tmp_path / name for name in ("a.csv", "b.csv", "c.csv")]
    for path, seed in zip(paths, (7, 7, 8)):
        assert main(["generate", "--stream", "sea-f", "--seed", str(seed), "--count", "300", "--out", str(path)]) == EXIT_OK

    a, b, c = (p.read_bytes() for p in paths)
    assert a == b != c
    assert len(a.decode().splitlines()) == 300

    sidecar = json.loads((tmp_path / "a.schema.json").read_text())
    assert sidecar["seed"] == 7
    assert sidecar["class_names"] == ["0", "1"]
    assert len(sidecar["config_hash"]) == 64


def test_generate_led_writes_attribute_and_class_names(tmp_path):
    out = tmp_path / "led.csv"
    assert main(["generate", "--stream", "led-nd", "--count", "50", "--out", str(out)]) == EXIT_OK
    rows = [line.split(",") for line in out.read_text().splitlines()]
    assert len(rows) == 50
    assert all(len(row) == 25 for row in rows)
    assert all(set(row[:24]) <= {"0", "1"} for row in rows)


def test_generate_nothing(tmp_path):
    out = tmp_path / "empty.csv"
    assert main(["generate", "--stream", "sea-f", "--count", "0", "--out", str(out)]) == EXIT_OK
    assert out.read_text().strip() == ""


def test_generate_unknown_stream(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["generate", "--stream", "waveform", "--count", "5", "--out", str(out)]) == EXIT_USAGE


def test_run_with_instance_cap(tmp_path, run_descriptor, capsys):
    out = tmp_path / "out"
    code = main(["run", str(run_descriptor), "--max-instances", "600", "--output-dir", str(out)])
    assert code == EXIT_OK
    assert "goowe__sea-f__s5: accuracy" in capsys.readouterr().out

    summary = json.loads((out / "goowe__sea-f__s5.summary.json").read_text())
    assert summary["instances"] == 600
    assert summary["descriptor"]["evaluation"]["max_instances"] == 600

    trace = pd.read_csv(out / "goowe__sea-f__s5.trace.csv", comment="#")
    assert trace["instances"].tolist() == [500, 600]
    first_line = (out / "goowe__sea-f__s5.trace.csv").read_text().splitlines()[0]
    assert first_line == f"# config_hash={summary['config_hash']}"


def test_run_flags_override_the_descriptor(tmp_path, run_descriptor):
    out = tmp_path / "out"
    code = main(
        [
            "run",
            str(run_descriptor),
            "--algorithm",
            "base1",
            "--rule",
            "dwm(0.5,0.01)",
            "--seed",
            "2",
            "--max-instances",
            "300",
            "--output-dir",
            str(out),
        ]
    )
    assert code == EXIT_OK
    summaries = list(out.glob("*.summary.json"))
    assert len(summaries) == 1
    summary = json.loads(summaries[0].read_text())
    assert summary["seed"] == 2
    assert summary["ensemble"] == "base1[dwm]"
    assert summary["descriptor"]["ensemble"]["rule"] == "dwm(0.5,0.01)"


def test_run_on_a_generated_file(tmp_path):
    data = tmp_path / "sea.csv"
    main(["generate", "--stream", "sea-s", "--count", "400", "--out", str(data)])
    descriptor = write_json(
        tmp_path / "file_run.json", {"stream": {"path": str(data)}, "ensemble": FAST_ENSEMBLE}
    )
    out = tmp_path / "out"
    assert main(["run", str(descriptor), "--output-dir", str(out)]) == EXIT_OK
    summary = json.loads((out / "goowe__sea__s1.summary.json").read_text())
    assert summary["instances"] == 400


@pytest.mark.parametrize(
    "flags",
    [
        ["--algorithm", "bagging"],
        ["--algorithm", "base2"],
        ["--rule", "boost", "--algorithm", "base1"],
        ["--set", "ensemble.chunk_size=0"],
    ],
)
def test_run_rejects_bad_configuration(tmp_path, run_descriptor, flags):
    assert main(["run", str(run_descriptor), "--output-dir", str(tmp_path), *flags]) == EXIT_USAGE


def test_run_missing_descriptor(tmp_path):
    assert main(["run", str(tmp_path / "nope.json")]) == EXIT_DATA


def test_run_missing_stream_file(tmp_path):
    descriptor = write_json(tmp_path / "r.json", {"stream": {"path": str(tmp_path / "gone.csv")}})
    assert main(["run", str(descriptor), "--output-dir", str(tmp_path)]) == EXIT_DATA


def test_compare_writes_matrices(tmp_path, suite_descriptor, capsys):
    out = tmp_path / "out"
    assert main(["compare", str(suite_descriptor), "--output-dir", str(out), "--workers", "1"]) == EXIT_OK
    assert "sea-f" in capsys.readouterr().out

    assert len(list(out.glob("*.summary.json"))) == 6
    for name in ("accuracy", "time", "memory"):
        matrix = pd.read_csv(out / f"{name}.csv", comment="#", index_col=0)
        assert matrix.index.tolist() == ["sea-f", "hyp-f"]
        assert matrix.columns.tolist() == ["goowe"]
        assert matrix.notna().all().all()

    report = json.loads((out / "suite.json").read_text())
    assert report["cells"] == 6 and report["failures"] == {}


def test_compare_resume_reuses_matching_runs(tmp_path, suite_descriptor):
    out = tmp_path / "out"
    main(["compare", str(suite_descriptor), "--output-dir", str(out), "--workers", "1"])
    before = (out / "accuracy.csv").read_text()

    assert main(["compare", str(suite_descriptor), "--output-dir", str(out), "--workers", "1", "--resume"]) == EXIT_OK
    assert json.loads((out / "suite.json").read_text())["resumed"] == 6
    assert (out / "accuracy.csv").read_text() == before

    main(
        [
            "compare",
            str(suite_descriptor),
            "--output-dir",
            str(out),
            "--workers",
            "1",
            "--resume",
            "--set",
            "seeds=[1, 2, 4]",
        ]
    )
    assert json.loads((out / "suite.json").read_text())["resumed"] == 4


def test_compare_is_reproducible(tmp_path):
    suite = write_json(
        tmp_path / "suite.json",
        {
            "ensembles": [
                FAST_ENSEMBLE,
                {**FAST_ENSEMBLE, "algorithm": "base1", "rule": "mv"},
                {**FAST_ENSEMBLE, "algorithm": "base2", "rule": "goowe"},
            ],
            "streams": [
                {"generator": "sea-f", "length": 600},
                {"generator": "hyp-f", "length": 600},
            ],
            "seeds": [1, 2],
            "evaluation": {"report_interval": 200},
        },
    )
    first, second = tmp_path / "first", tmp_path / "second"
    main(["compare", str(suite), "--output-dir", str(first), "--workers", "1"])
    main(["compare", str(suite), "--output-dir", str(second), "--workers", "2"])
    assert len(list(first.glob("*.summary.json"))) == 12

    # timings differ between runs; every other output must match byte for byte
    for name in ("accuracy.csv", "memory.csv", "goowe__hyp-f__s2.trace.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_compare_reports_partial_failure(tmp_path, capsys):
    suite = write_json(
        tmp_path / "suite.json",
        {
            "ensembles": [FAST_ENSEMBLE],
            "streams": [{"generator": "sea-f", "length": 300}, {"path": str(tmp_path / "gone.csv")}],
        },
    )
    out = tmp_path / "out"
    assert main(["compare", str(suite), "--output-dir", str(out), "--workers", "1"]) == EXIT_PARTIAL
    assert "FAILED goowe__gone__s1" in capsys.readouterr().err

    matrix = pd.read_csv(out / "accuracy.csv", comment="#", index_col=0)
    assert matrix.loc["sea-f", "goowe"] > 0
    assert pd.isna(matrix.loc["gone", "goowe"])


def test_compare_keeps_one_column_per_ensemble(tmp_path):
    small = {**FAST_ENSEMBLE, "max_components": 2}
    large = {"max_components": 5, "chunk_size": 100, "window_size": 100}
    data = {"ensembles": [small, large], "streams": [{"generator": "sea-f", "length": 400}]}
    out = tmp_path / "out"

    clashing = write_json(tmp_path / "clash.json", data)
    assert main(["compare", str(clashing), "--output-dir", str(out), "--workers", "1"]) == EXIT_USAGE

    named = write_json(
        tmp_path / "named.json",
        {**data, "ensembles": [{**small, "name": "goowe-m2"}, {**large, "name": "goowe-m5"}]},
    )
    assert main(["compare", str(named), "--output-dir", str(out), "--workers", "1"]) == EXIT_OK
    assert sorted(p.name for p in out.glob("*.summary.json")) == [
        "goowe-m2__sea-f__s1.summary.json",
        "goowe-m5__sea-f__s1.summary.json",
    ]
    matrix = pd.read_csv(out / "accuracy.csv", comment="#", index_col=0)
    assert matrix.columns.tolist() == ["goowe-m2", "goowe-m5"]
    assert matrix.notna().all().all()


def test_compare_rejects_zero_workers(tmp_path, suite_descriptor):
    assert main(["compare", str(suite_descriptor), "--workers", "0"]) == EXIT_USAGE


def test_stats_friedman(published_accuracy_path, capsys):
    assert main(["stats", str(published_accuracy_path), "friedman"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].split() == ["GOOWE", "7.650"]
    assert any("critical difference" in line for line in lines)


def test_stats_friedman_json(published_accuracy_path, capsys):
    assert main(["stats", str(published_accuracy_path), "friedman", "--json"]) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["average_ranks"]["NSE"] == pytest.approx(1.65)
    assert (result["df_numerator"], result["df_denominator"]) == (8, 152)


def test_stats_wilcoxon(published_accuracy_path, capsys):
    assert main(["stats", str(published_accuracy_path), "wilcoxon", "--pair", "GOOWE", "OAUE", "--json"]) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert (result["positive"], result["negative"]) == (13, 7)


def test_stats_errors(tmp_path, published_accuracy_path):
    assert main(["stats", str(published_accuracy_path), "wilcoxon"]) == EXIT_USAGE
    assert main(["stats", str(published_accuracy_path), "wilcoxon", "--pair", "GOOWE", "Hedge"]) == EXIT_USAGE
    assert main(["stats", str(published_accuracy_path), "anova"]) == EXIT_USAGE
    assert main(["stats", str(tmp_path / "missing.csv"), "friedman"]) == EXIT_DATA
