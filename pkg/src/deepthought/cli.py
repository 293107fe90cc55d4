"""Command-line front end: run, compare, sweep, replay, report."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from pathlib import Path

import click

from .errors import MismatchDetected, OracleError
from .harness import (
    ExperimentConfig,
    RunMetrics,
    load_run,
    replay_run,
    run_experiment,
    save_run,
)

TABLE_COLUMNS = [
    "config_id", "protocol", "V", "PR", "A", "ADV",
    "C-SPEC", "C-ANY", "STD", "MIN", "MAX",
]
CSV_COLUMNS = [
    "config_id", "protocol", "V", "PR", "A", "ADV",
    "c_spec", "c_any", "std", "min", "max",
]


def _format_table(rows: list[list]) -> str:
    cells = [TABLE_COLUMNS] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(TABLE_COLUMNS))]
    lines = []
    for i, row in enumerate(cells):
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _csv_text(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(metrics_list: list[RunMetrics], fmt: str) -> None:
    rows = [m.table_row() for m in metrics_list]
    if fmt == "table":
        click.echo(_format_table(rows))
    elif fmt == "csv":
        click.echo(_csv_text(rows), nl=False)
    else:
        click.echo(json.dumps([m.to_dict() for m in metrics_list], indent=2, sort_keys=True))


def _load_config(path: str, seed: int | None, protocol: str | None) -> ExperimentConfig:
    config = ExperimentConfig.from_file(path)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if protocol is not None:
        overrides["protocol"] = protocol
    if overrides:
        config = dataclasses.replace(config, **overrides).validate()
    return config


def _run_one(config: ExperimentConfig):
    return run_experiment(config, collect_settlements=True)


@click.group()
def main():
    """Reputation-weighted voting oracle: experiments and reports."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Experiment config (.toml or .json).")
@click.option("--seed", type=int, default=None, help="Override the configured seed.")
@click.option("--protocol", type=click.Choice(["deepthought", "astraea"]), default=None, help="Override the configured protocol.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Directory for metrics.json and repetitions.jsonl.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "json"]), default="table")
def run(config_path, seed, protocol, out_dir, fmt):
    """Run one experiment and print its metrics row."""
    try:
        config = _load_config(config_path, seed, protocol)
        metrics, records, settlements = run_experiment(config, collect_settlements=True)
    except OracleError as exc:
        raise click.ClickException(str(exc))
    if out_dir:
        save_run(out_dir, metrics, records, config, settlements)
    _emit([metrics], fmt)


@main.command()
@click.option("--config", "config_paths", multiple=True, type=click.Path(), help="Config file; repeatable.")
@click.option("--config-dir", type=click.Path(), default=None, help="Run every .toml/.json config in a directory.")
@click.option("--seed", type=int, default=None, help="Override every config's seed.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Directory for compare.csv and per-run artifacts.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "json"]), default="table")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes for independent experiment runs.")
def compare(config_paths, config_dir, seed, out_dir, fmt, jobs):
    """Run both protocols on each configuration and emit paired rows."""
    paths = [Path(p) for p in config_paths]
    if config_dir:
        paths.extend(sorted(
            p for p in Path(config_dir).iterdir() if p.suffix in (".toml", ".json")
        ))
    if not paths:
        raise click.ClickException("no configuration files given")
    try:
        configs = [
            _load_config(str(path), seed, protocol)
            for path in paths
            for protocol in ("deepthought", "astraea")
        ]
    except OracleError as exc:
        raise click.ClickException(str(exc))
    stems = [
        path.stem for path in paths for _ in ("deepthought", "astraea")
    ]
    all_metrics: list[RunMetrics] = []
    try:
        if jobs > 1:
            # Experiments are independent; results are re-ordered by index so
            # the output does not depend on scheduling.
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_run_one, configs))
        else:
            results = [_run_one(config) for config in configs]
        for config, stem, (metrics, records, settlements) in zip(configs, stems, results):
            all_metrics.append(metrics)
            if out_dir:
                run_dir = Path(out_dir) / f"{config.config_id or stem}_{config.protocol}"
                save_run(run_dir, metrics, records, config, settlements)
    except OracleError as exc:
        raise click.ClickException(str(exc))
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        csv_path = Path(out_dir) / "compare.csv"
        csv_path.write_text(_csv_text([m.table_row() for m in all_metrics]))
        click.echo(f"wrote {csv_path}", err=True)
    _emit(all_metrics, fmt)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Base experiment config.")
@click.option("--alpha", "alphas", default="0.3,0.5,0.7,0.9", show_default=True, help="Comma-separated alpha grid.")
@click.option("--beta", "betas", default="0.1,0.5,0.9", show_default=True, help="Comma-separated beta grid.")
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Directory for sensitivity.csv.")
def sweep(config_path, alphas, betas, out_dir):
    """Sensitivity sweep over the weight/reward mixing parameters."""
    try:
        base = ExperimentConfig.from_file(config_path)
        alpha_grid = [float(a) for a in alphas.split(",") if a.strip()]
        beta_grid = [float(b) for b in betas.split(",") if b.strip()]
    except (ValueError, OracleError) as exc:
        raise click.ClickException(str(exc))
    rows = []
    try:
        for alpha in alpha_grid:
            for beta in beta_grid:
                params = dataclasses.replace(base.params, alpha=alpha, beta=beta)
                config = dataclasses.replace(base, params=params).validate()
                metrics, _ = run_experiment(config)
                rows.append([alpha, beta] + metrics.table_row())
    except OracleError as exc:
        raise click.ClickException(str(exc))
    header = ["alpha", "beta"] + CSV_COLUMNS
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        (Path(out_dir) / "sensitivity.csv").write_text(text)
        click.echo(f"wrote {Path(out_dir) / 'sensitivity.csv'}", err=True)
    click.echo(text, nl=False)


@main.command()
@click.argument("run_dir", type=click.Path(exists=True))
def replay(run_dir):
    """Re-execute a stored run and verify it reproduces the records."""
    try:
        metrics = replay_run(run_dir)
    except MismatchDetected as exc:
        raise click.ClickException(f"MISMATCH: {exc}")
    except OracleError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"match: {run_dir} reproduces C-SPEC={metrics.c_spec:.2f} C-ANY={metrics.c_any:.2f}")


@main.command()
@click.argument("run_dirs", nargs=-1, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["table", "csv", "json"]), default="table")
def report(run_dirs, fmt):
    """Render stored metrics files as one combined table."""
    if not run_dirs:
        raise click.ClickException("no run directories given")
    metrics_list = []
    try:
        for run_dir in run_dirs:
            _, metrics, _ = load_run(run_dir)
            metrics_list.append(RunMetrics(**metrics))
    except (OracleError, OSError, KeyError, TypeError) as exc:
        raise click.ClickException(f"cannot load run: {exc}")
    _emit(metrics_list, fmt)


if __name__ == "__main__":
    main()
