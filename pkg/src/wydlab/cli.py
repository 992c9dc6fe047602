"""Command line harness: instance generation, single checks, p-sweeps, and
full suite reports with delimited output plus rendered figures.

Exit codes: 0 all pass, 1 inequality violation beyond tolerance,
2 input or configuration error, 3 numerical degradation.  The WYDLAB_JOBS
environment variable sets the parallelism degree.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from .entropy import j_p
from .errors import WydlabError
from .instances import KINDS, random_instance
from .linalg import matrix_from_json, matrix_to_json
from .report import RunReport, emit
from .suites import DEFAULT_P_GRID, SUITE_NAMES, SuiteConfig, exit_code, run_suite

EXIT_CONFIG_ERROR = 2
EXIT_DEGRADED = 3


def _parse_floats(text: str):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise click.UsageError(f"could not parse float list {text!r}")


def _parse_ints(text: str):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise click.UsageError(f"could not parse integer list {text!r}")


def _load_matrix(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


@click.group()
def main():
    """Numerical checks for generalized relative entropies J_p and their
    convexity, monotonicity, and equality structure."""


@main.command()
@click.option("--kind", type=click.Choice(KINDS), required=True)
@click.option("--dims", default="3", help="comma-separated dimensions")
@click.option("--seed", default=0, type=int)
@click.option("--index", default=0, type=int, help="draw index")
@click.option("--out", default=".", help="output directory")
def gen(kind, dims, seed, index, out):
    """Generate a seeded random instance and write it as matrix JSON."""
    dims = _parse_ints(dims)
    try:
        inst = random_instance(kind, dims, seed, index)
    except WydlabError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    os.makedirs(out, exist_ok=True)
    base = os.path.join(out, f"{kind}_{'x'.join(map(str, dims))}_{seed}_{index}")
    paths = []
    if kind == "family":
        for j, (a, b) in enumerate(inst):
            for tag, m in (("a", a), ("b", b)):
                path = f"{base}_{tag}{j}.json"
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump(matrix_to_json(m), fh)
                paths.append(path)
    elif kind == "structure_state":
        a12, b12, structure = inst
        for tag, m in (("a12", a12), ("b12", b12)):
            path = f"{base}_{tag}.json"
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(matrix_to_json(m), fh)
            paths.append(path)
        path = f"{base}_blocks.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"blocks": [list(b) for b in structure.blocks]}, fh)
        paths.append(path)
    else:
        path = f"{base}.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(matrix_to_json(inst), fh)
        paths.append(path)
    for path in paths:
        click.echo(path)


@main.command()
@click.option("--a", "a_path", required=True, help="matrix JSON for A")
@click.option("--b", "b_path", required=True, help="matrix JSON for B")
@click.option("--k", "k_path", default=None, help="matrix JSON for K (default I)")
@click.option("--p", default=1.0, type=float)
@click.option("--tol", default=1e-8, type=float, help="route agreement tolerance")
def check(a_path, b_path, k_path, p, tol):
    """Evaluate J_p(K, A, B) by the direct and modular routes and compare."""
    try:
        a = _load_matrix(a_path)
        b = _load_matrix(b_path)
        k = _load_matrix(k_path) if k_path else np.eye(a.shape[0])
        direct = j_p(k, a, b, p, route="direct")
        modular = j_p(k, a, b, p, route="modular")
    except (WydlabError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    dev = abs(direct.value - modular.value)
    click.echo(f"J_p direct  = {direct.value:.12e}")
    click.echo(f"J_p modular = {modular.value:.12e}")
    click.echo(f"route deviation = {dev:.3e}")
    sys.exit(0 if dev <= tol * (1.0 + abs(direct.value)) else 1)


def _run_and_emit(config: SuiteConfig, out: str, csv_name: str) -> int:
    from .plotting import render_gap_figure

    os.makedirs(out, exist_ok=True)
    try:
        report = run_suite(config)
    except WydlabError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_CONFIG_ERROR
    emit(report, "json", os.path.join(out, "report.json"))
    emit(report, "csv", os.path.join(out, csv_name))
    render_gap_figure(report.rows, os.path.join(out, "gap_vs_p.png"))
    for suite, counts in sorted(report.summary.items()):
        click.echo(
            f"{suite}: {counts['pass']} pass, {counts['fail']} fail, "
            f"{counts['near_zero']} near-zero, {counts['degraded']} degraded"
        )
    return exit_code(report)


def _config_from_flags(seed, tol, p_grid, dims, trials, suite, out) -> SuiteConfig:
    suites = tuple(s.strip() for s in suite.split(",") if s.strip()) if suite else SUITE_NAMES
    try:
        return SuiteConfig(
            seed=seed,
            dims=_parse_ints(dims),
            p_grid=_parse_floats(p_grid),
            trials=trials,
            atol=tol,
            rtol=tol,
            suites=suites,
            out=out,
        )
    except WydlabError as exc:
        raise click.UsageError(str(exc))


_COMMON = [
    click.option("--seed", default=0, type=int),
    click.option("--tol", default=1e-9, type=float),
    click.option("--p-grid", default=",".join(str(p) for p in DEFAULT_P_GRID)),
    click.option("--dims", default="2,3"),
    click.option("--trials", default=3, type=int),
    click.option("--suite", default="", help="comma-separated suite names"),
    click.option("--out", default="wydlab-out"),
]


def _with_common(fn):
    for opt in reversed(_COMMON):
        fn = opt(fn)
    return fn


@main.command()
@_with_common
def sweep(seed, tol, p_grid, dims, trials, suite, out):
    """Run the selected suites across the p grid; write sweep.csv and the
    gap-vs-p figure."""
    config = _config_from_flags(seed, tol, p_grid, dims, trials, suite, out)
    sys.exit(_run_and_emit(config, out, "sweep.csv"))


@main.command()
@_with_common
def report(seed, tol, p_grid, dims, trials, suite, out):
    """Run the full (or selected) suites and write report.json, report.csv,
    and the rendered figure."""
    config = _config_from_flags(seed, tol, p_grid, dims, trials, suite, out)
    sys.exit(_run_and_emit(config, out, "report.csv"))


if __name__ == "__main__":
    main()
