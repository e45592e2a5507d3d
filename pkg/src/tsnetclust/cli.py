"""Command-line runner for the clustering pipeline and the sweep harness.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 computation
error.
"""

from __future__ import annotations

import functools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from .cache import cached_distance_matrix
from .communities import Algorithm, detect
from .datasets import GENERATORS, load_ucr, save_ucr
from .distances import DistanceMeasure, MeasureKind
from .errors import DegenerateInputError, FormatError, ParameterError, TsnetclustError
from .evaluation import (
    BASELINE_ALGOS,
    SweepResult,
    baseline_best_ri,
    rand_index,
    summarize,
    sweep_eps,
    sweep_k,
    truth_partition,
)
from .network import GraphMethod, write_edge_list
from .partition import write_partition
from .series import normalize_dataset

EXIT_CONFIG, EXIT_IO, EXIT_COMPUTE = 2, 3, 4

MEASURE_NAMES = [k.value for k in MeasureKind]
COMMUNITY_ALGOS = [a.value for a in Algorithm]
ALL_ALGOS = COMMUNITY_ALGOS + list(BASELINE_ALGOS)


def cli_errors(fn):
    """Map package errors to the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParameterError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except (FormatError, OSError) as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(EXIT_IO)
        except TsnetclustError as exc:
            click.echo(f"computation error: {exc}", err=True)
            sys.exit(EXIT_COMPUTE)

    return wrapper


@click.group()
def main():
    """Cluster sets of time series via similarity networks and communities."""


def _load_normalized(path):
    ds = load_ucr(path, name=Path(path).stem)
    return normalize_dataset(ds)


def _method(method: str, k: int | None, eps: float | None) -> GraphMethod:
    if method == "knn":
        if k is None:
            raise ParameterError("method knn needs --k")
        return GraphMethod.knn(k)
    if method == "epsnn":
        if eps is None:
            raise ParameterError("method epsnn needs --eps")
        return GraphMethod.epsnn(eps)
    raise ParameterError(f"unknown method {method!r}; expected knn or epsnn")


measure_option = click.option(
    "--measure", required=True, type=click.Choice(MEASURE_NAMES), help="Distance function."
)
dwt_level_option = click.option(
    "--dwt-level", type=int, default=None, help="Retained Haar level for --measure dwt."
)
jobs_option = click.option("--jobs", type=int, default=1, show_default=True, help="Worker count.")
cache_option = click.option(
    "--cache-dir", type=click.Path(), default=None, help="Distance-matrix cache directory."
)


@main.command()
@click.option("--data", required=True, type=click.Path(), help="UCR-format input file.")
@measure_option
@dwt_level_option
@click.option("--method", required=True, type=click.Choice(["knn", "epsnn"]))
@click.option("--k", type=int, default=None, help="Neighbor count for knn.")
@click.option("--eps", type=float, default=None, help="Distance threshold for epsnn.")
@click.option("--algo", required=True, type=click.Choice(COMMUNITY_ALGOS))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Output directory for the partition file.")
@jobs_option
@cache_option
@cli_errors
def cluster(data, measure, dwt_level, method, k, eps, algo, seed, out, jobs, cache_dir):
    """Run the four-step pipeline once and report the resulting clusters."""
    gm = _method(method, k, eps)  # validate before heavy work
    ds = _load_normalized(data)
    m = DistanceMeasure.from_name(measure, dwt_level=dwt_level)
    D = cached_distance_matrix(ds, m, cache_dir, jobs=jobs)
    g = gm.build(D)
    p = detect(g, Algorithm.from_name(algo), seed)
    param = f"k{k}" if method == "knn" else f"eps{eps}"
    click.echo(f"communities: {p.n_communities}")
    if ds.labels is not None:
        click.echo(f"rand_index: {rand_index(p, truth_partition(ds)):.4f}")
    if out is not None:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        target = out_dir / f"{ds.name}__{m.tag}__{method}-{param}__{algo}.partition.txt"
        write_partition(p, target)
        click.echo(f"partition: {target}")


@main.command()
@click.argument("family", type=click.Choice(sorted(GENERATORS)))
@click.option("--per-class", required=True, type=int)
@click.option("--length", type=int, default=128, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path())
@cli_errors
def generate(family, per_class, length, seed, out):
    """Write a synthetic dataset in UCR format."""
    ds = GENERATORS[family](per_class, t=length, seed=seed)
    save_ucr(ds, out)
    click.echo(f"wrote {ds.n} series of length {length} to {out}")


@main.command("export-graph")
@click.option("--data", required=True, type=click.Path())
@measure_option
@dwt_level_option
@click.option("--method", required=True, type=click.Choice(["knn", "epsnn"]))
@click.option("--k", type=int, default=None)
@click.option("--eps", type=float, default=None)
@click.option("--out", required=True, type=click.Path())
@jobs_option
@cache_option
@cli_errors
def export_graph(data, measure, dwt_level, method, k, eps, out, jobs, cache_dir):
    """Write the similarity network as an edge list (`u v` per line)."""
    gm = _method(method, k, eps)
    ds = _load_normalized(data)
    m = DistanceMeasure.from_name(measure, dwt_level=dwt_level)
    g = gm.build(cached_distance_matrix(ds, m, cache_dir, jobs=jobs))
    write_edge_list(g, out)
    click.echo(f"wrote {g.edge_count} edges to {out}")


# ---------------------------------------------------------------------------
# sweep harness


def parse_config(path) -> dict:
    """Flat `key = value` config; lists are comma-separated; `#` comments."""
    known_lists = {"data", "measure", "method", "algo"}
    known_scalars = {"seed", "jobs", "out"}
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected `key = value`")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in known_lists:
                out[key] = [v.strip() for v in value.split(",") if v.strip()]
            elif key in known_scalars:
                out[key] = value
            else:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
    return out


def _combo_stem(ds_name: str, measure: str, method: str, algo: str) -> str:
    return f"records__{ds_name}__{measure}__{method}__{algo}"


def _run_combination(data_path: str, measure_name: str, dwt_level, method: str, algo: str,
                     seed: int, cache_dir, jobs: int) -> list[dict]:
    """One (dataset, measure, method, algorithm) cell of the sweep grid."""
    ds = _load_normalized(data_path)
    m = DistanceMeasure.from_name(measure_name, dwt_level=dwt_level)
    D = cached_distance_matrix(ds, m, cache_dir, jobs=jobs)
    truth = truth_partition(ds)
    if algo in BASELINE_ALGOS:
        result: SweepResult = baseline_best_ri(D, algo, truth)
    elif method == "knn":
        result = sweep_k(D, Algorithm.from_name(algo), seed, truth, context=ds.name)
    else:
        result = sweep_eps(D, Algorithm.from_name(algo), seed, truth, context=ds.name)
    rows = []
    for r in result.records:
        rows.append(
            {
                "dataset": ds.name,
                "measure": m.tag,
                "method": result.method,
                "algo": algo,
                "param": repr(r.param),
                "communities": r.n_communities,
                "rand_index": repr(r.rand_index),
            }
        )
    return rows


_CSV_COLUMNS = ("dataset", "measure", "method", "algo", "param", "communities", "rand_index")


def _write_rows(rows: list[dict], stem: Path):
    """CSV plus JSON mirror, written atomically."""
    csv_text = ",".join(_CSV_COLUMNS) + "\n"
    for row in rows:
        csv_text += ",".join(str(row[c]) for c in _CSV_COLUMNS) + "\n"
    tmp = stem.with_suffix(".csv.tmp")
    tmp.write_text(csv_text, encoding="utf-8")
    tmp.replace(stem.with_suffix(".csv"))
    tmp = stem.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(rows, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    tmp.replace(stem.with_suffix(".json"))


def _read_rows(path: Path) -> list[dict]:
    lines = path.read_text(encoding="utf-8").splitlines()
    return [dict(zip(_CSV_COLUMNS, line.split(","))) for line in lines[1:]]


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Flat key=value config file.")
@click.option("--data", multiple=True, type=click.Path(), help="UCR-format file (repeatable).")
@click.option("--measure", "measures", multiple=True, type=click.Choice(MEASURE_NAMES))
@click.option("--dwt-level", type=int, default=None)
@click.option("--method", "methods", multiple=True, type=click.Choice(["knn", "epsnn"]))
@click.option("--algo", "algos", multiple=True, type=click.Choice(ALL_ALGOS))
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--force", is_flag=True, help="Recompute combinations whose outputs already exist.")
@cli_errors
def sweep(config_path, data, measures, dwt_level, methods, algos, seed, out, jobs, force):
    """Run the full sweep grid and emit per-point, best and summary CSVs.

    Existing per-combination outputs are reused unless --force is given, so
    an interrupted run can be resumed.
    """
    cfg = parse_config(config_path) if config_path else {}
    data = list(data) or cfg.get("data", [])
    measures = list(measures) or cfg.get("measure", [])
    methods = list(methods) or cfg.get("method", ["epsnn"])
    algos = list(algos) or cfg.get("algo", [])
    seed = seed if seed is not None else int(cfg.get("seed", 0))
    out = out or cfg.get("out")
    jobs = jobs if jobs is not None else int(cfg.get("jobs", 1))
    if not data or not measures or not algos or not out:
        raise ParameterError("sweep needs data, measure, algo and out (flags or config)")
    for name in algos:
        if name not in ALL_ALGOS:
            raise ParameterError(f"unknown algorithm {name!r}")

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache_dir = out_dir / "cache"

    combos = []
    for path in sorted(data):
        ds_name = Path(path).stem
        for measure_name in sorted(measures):
            for algo in sorted(algos):
                for method in sorted(methods) if algo in COMMUNITY_ALGOS else ["cut-k"]:
                    combos.append((path, ds_name, measure_name, method, algo))

    pending = []
    for path, ds_name, measure_name, method, algo in combos:
        m = DistanceMeasure.from_name(measure_name, dwt_level=dwt_level)
        stem = out_dir / _combo_stem(ds_name, m.tag, method, algo)
        if force or not stem.with_suffix(".csv").exists():
            pending.append((path, ds_name, measure_name, method, algo, stem))

    # warm the matrix cache sequentially so parallel workers only read it;
    # errors surface (and are recorded) when the combination itself runs
    for path, measure_name in sorted({(c[0], c[2]) for c in pending}):
        try:
            ds = _load_normalized(path)
            cached_distance_matrix(ds, DistanceMeasure.from_name(measure_name, dwt_level=dwt_level),
                                   cache_dir, jobs=jobs)
        except TsnetclustError:
            pass

    failures: list[tuple[str, str]] = []

    def finish(stem: Path, rows: list[dict]):
        _write_rows(rows, stem)
        click.echo(f"wrote {stem.with_suffix('.csv').name}")

    def record_failure(stem: Path, exc: Exception):
        failures.append((stem.name, str(exc)))
        click.echo(f"failed {stem.name}: {exc}", err=True)

    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                (stem, pool.submit(_run_combination, path, measure_name, dwt_level, method,
                                   algo, seed, cache_dir, 1))
                for path, ds_name, measure_name, method, algo, stem in pending
            ]
            for stem, fut in futures:
                try:
                    finish(stem, fut.result())
                except (TsnetclustError, OSError) as exc:
                    record_failure(stem, exc)
    else:
        for path, ds_name, measure_name, method, algo, stem in pending:
            try:
                finish(stem, _run_combination(path, measure_name, dwt_level, method, algo,
                                              seed, cache_dir, jobs))
            except (TsnetclustError, OSError) as exc:
                record_failure(stem, exc)

    if failures:
        lines = ["combination,error"] + [f"{name},{msg.replace(',', ';')}" for name, msg in failures]
        (out_dir / "failures.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    # aggregate best rows and the (measure, method, algo) summary; records
    # are sorted by parameter, so the first maximum is the smallest parameter
    best_rows, groups = [], {}
    for path, ds_name, measure_name, method, algo in combos:
        m = DistanceMeasure.from_name(measure_name, dwt_level=dwt_level)
        stem = out_dir / _combo_stem(ds_name, m.tag, method, algo)
        if not stem.with_suffix(".csv").exists():
            continue  # failed combination, recorded above
        rows = _read_rows(stem.with_suffix(".csv"))
        best = max(rows, key=lambda r: float(r["rand_index"]))
        best_rows.append(best)
        groups.setdefault((m.tag, best["method"], algo), []).append(float(best["rand_index"]))
    if not best_rows:
        raise DegenerateInputError("every sweep combination failed")

    csv_text = ",".join(_CSV_COLUMNS) + "\n"
    for row in best_rows:
        csv_text += ",".join(str(row[c]) for c in _CSV_COLUMNS) + "\n"
    (out_dir / "best.csv").write_text(csv_text, encoding="utf-8")
    (out_dir / "best.json").write_text(json.dumps(best_rows, indent=1, sort_keys=True) + "\n",
                                       encoding="utf-8")

    summary_rows = [
        {
            "measure": row.key[0],
            "method": row.key[1],
            "algo": row.key[2],
            "datasets": row.count,
            "median": repr(row.median),
            "mean": repr(row.mean),
            "std": repr(row.std),
        }
        for row in sorted(summarize(groups), key=lambda r: r.key)
    ]
    cols = ("measure", "method", "algo", "datasets", "median", "mean", "std")
    csv_text = ",".join(cols) + "\n"
    for row in summary_rows:
        csv_text += ",".join(str(row[c]) for c in cols) + "\n"
    (out_dir / "summary.csv").write_text(csv_text, encoding="utf-8")
    (out_dir / "summary.json").write_text(json.dumps(summary_rows, indent=1, sort_keys=True) + "\n",
                                          encoding="utf-8")
    click.echo(f"summary over {len(best_rows)} combinations -> {out_dir / 'summary.csv'}")


if __name__ == "__main__":
    main()
