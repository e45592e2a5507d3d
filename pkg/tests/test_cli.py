import json

import numpy as np
import pytest
from click.testing import CliRunner

from tsnetclust import generate_cbf, save_ucr
from tsnetclust.cli import main, parse_config


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def small_file(tmp_path):
    ds = generate_cbf(4, seed=2)
    path = tmp_path / "toy.txt"
    save_ucr(ds, path)
    return path


def test_cluster_prints_counts_and_ri(runner, small_file, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(
        main,
        ["cluster", "--data", str(small_file), "--measure", "ed", "--method", "knn",
         "--k", "3", "--algo", "fg", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "communities:" in result.output
    assert "rand_index:" in result.output
    partitions = list(out.glob("*.partition.txt"))
    assert len(partitions) == 1
    lines = partitions[0].read_text().splitlines()
    assert len(lines) == 12
    assert lines[0].startswith("0 ")


def test_cluster_eps_below_min_gives_singletons(runner, small_file):
    result = runner.invoke(
        main,
        ["cluster", "--data", str(small_file), "--measure", "ed", "--method", "epsnn",
         "--eps", "1e-9", "--algo", "ml"],
    )
    assert result.exit_code == 0
    assert "communities: 12" in result.output


def test_exit_code_missing_file(runner):
    result = runner.invoke(
        main,
        ["cluster", "--data", "/nonexistent.txt", "--measure", "ed", "--method", "knn",
         "--k", "1", "--algo", "fg"],
    )
    assert result.exit_code == 3


def test_exit_code_bad_flag_value(runner, small_file):
    result = runner.invoke(
        main,
        ["cluster", "--data", str(small_file), "--measure", "nope", "--method", "knn",
         "--k", "1", "--algo", "fg"],
    )
    assert result.exit_code == 2


def test_exit_code_computation_error(runner, tmp_path):
    f = tmp_path / "const.txt"
    f.write_text("1,5,5,5,5\n2,1,2,3,4\n")
    result = runner.invoke(
        main,
        ["cluster", "--data", str(f), "--measure", "cor", "--method", "knn",
         "--k", "1", "--algo", "fg"],
    )
    assert result.exit_code == 4


def test_exit_code_missing_method_parameter(runner, small_file):
    result = runner.invoke(
        main,
        ["cluster", "--data", str(small_file), "--measure", "ed", "--method", "knn",
         "--algo", "fg"],
    )
    assert result.exit_code == 2


def test_generate_deterministic_bytes(runner, tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for target in (a, b):
        result = runner.invoke(
            main, ["generate", "cbf", "--per-class", "3", "--seed", "9", "--out", str(target)]
        )
        assert result.exit_code == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 9


def test_generate_two_patterns_row_count(runner, tmp_path):
    out = tmp_path / "tp.txt"
    result = runner.invoke(
        main, ["generate", "two_patterns", "--per-class", "2", "--out", str(out)]
    )
    assert result.exit_code == 0
    assert len(out.read_text().splitlines()) == 8


def test_export_graph(runner, small_file, tmp_path):
    out = tmp_path / "edges.txt"
    result = runner.invoke(
        main,
        ["export-graph", "--data", str(small_file), "--measure", "ed", "--method", "knn",
         "--k", "2", "--out", str(out)],
    )
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines
    assert all(len(line.split()) == 2 for line in lines)


def test_sweep_outputs_and_resume(runner, small_file, tmp_path):
    out = tmp_path / "results"
    args = ["sweep", "--data", str(small_file), "--measure", "ed", "--method", "epsnn",
            "--algo", "fg", "--algo", "single", "--seed", "1", "--out", str(out)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output

    records = sorted(p.name for p in out.glob("records__*.csv"))
    assert records == [
        "records__toy__ed__cut-k__single.csv",
        "records__toy__ed__epsnn__fg.csv",
    ]
    fg_rows = (out / "records__toy__ed__epsnn__fg.csv").read_text().splitlines()
    assert len(fg_rows) == 102  # header + 101 sweep points
    assert fg_rows[0] == "dataset,measure,method,algo,param,communities,rand_index"

    best = (out / "best.csv").read_text().splitlines()
    assert len(best) == 3
    summary = (out / "summary.csv").read_text()
    assert "ed,epsnn,fg" in summary
    # JSON mirrors exist and parse
    parsed = json.loads((out / "best.json").read_text())
    assert len(parsed) == 2

    # resumability: a second run reuses outputs and produces identical bytes
    before = {p.name: p.read_bytes() for p in out.iterdir() if p.is_file()}
    result2 = runner.invoke(main, args)
    assert result2.exit_code == 0
    after = {p.name: p.read_bytes() for p in out.iterdir() if p.is_file()}
    assert before == after
    # cache file was created and reused
    assert list((out / "cache").glob("*.dmat"))


def test_sweep_resumes_partial_outputs(runner, small_file, tmp_path):
    out = tmp_path / "partial"
    args = ["sweep", "--data", str(small_file), "--measure", "ed", "--method", "knn",
            "--algo", "fg", "--algo", "ml", "--seed", "1", "--out", str(out)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0
    reference = {p.name: p.read_bytes() for p in out.iterdir() if p.is_file()}
    # simulate an interrupted run: one combination's outputs missing
    (out / "records__toy__ed__knn__ml.csv").unlink()
    (out / "records__toy__ed__knn__ml.json").unlink()
    result2 = runner.invoke(main, args)
    assert result2.exit_code == 0
    resumed = {p.name: p.read_bytes() for p in out.iterdir() if p.is_file()}
    assert resumed == reference


def test_sweep_parallel_jobs_bit_identical(runner, small_file, tmp_path):
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    base = ["sweep", "--data", str(small_file), "--measure", "ed", "--method", "knn",
            "--algo", "fg", "--algo", "lp", "--seed", "3"]
    assert runner.invoke(main, base + ["--out", str(serial), "--jobs", "1"]).exit_code == 0
    assert runner.invoke(main, base + ["--out", str(parallel), "--jobs", "2"]).exit_code == 0
    for p in serial.iterdir():
        if p.is_file():
            assert p.read_bytes() == (parallel / p.name).read_bytes(), p.name


def test_sweep_records_per_combination_failures(runner, small_file, tmp_path):
    # a constant series makes COR degenerate; ED still succeeds
    bad = tmp_path / "bad.txt"
    bad.write_text("1,5,5,5,5\n2,1,2,3,4\n")
    out = tmp_path / "out"
    result = runner.invoke(
        main,
        ["sweep", "--data", str(bad), "--measure", "cor", "--measure", "ed",
         "--method", "knn", "--algo", "fg", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "failed" in result.output
    assert (out / "failures.csv").exists()
    assert (out / "records__bad__ed__knn__fg.csv").exists()
    assert not (out / "records__bad__cor__knn__fg.csv").exists()
    assert "ed,knn,fg" in (out / "summary.csv").read_text()


def test_sweep_exit_code_when_everything_fails(runner, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1,5,5,5,5\n2,1,2,3,4\n")
    out = tmp_path / "out"
    result = runner.invoke(
        main,
        ["sweep", "--data", str(bad), "--measure", "cor", "--method", "knn",
         "--algo", "fg", "--out", str(out)],
    )
    assert result.exit_code == 4


def test_sweep_needs_inputs(runner):
    result = runner.invoke(main, ["sweep", "--out", "/tmp/x"])
    assert result.exit_code == 2


def test_config_file(tmp_path, runner, small_file):
    cfg = tmp_path / "sweep.cfg"
    out = tmp_path / "cfg-out"
    cfg.write_text(
        f"# toy sweep\ndata = {small_file}\nmeasure = ed\nmethod = epsnn\nalgo = fg\n"
        f"seed = 4\nout = {out}\n"
    )
    parsed = parse_config(cfg)
    assert parsed["measure"] == ["ed"]
    assert parsed["seed"] == "4"
    result = runner.invoke(main, ["sweep", "--config", str(cfg)])
    assert result.exit_code == 0, result.output
    assert (out / "summary.csv").exists()


def test_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense = 1\n")
    with pytest.raises(Exception):
        parse_config(cfg)
