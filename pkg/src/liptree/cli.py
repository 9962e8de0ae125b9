"""Command-line front end.

Exit codes: 0 all good / all checks pass, 1 a verification check failed,
2 invalid parameters or resource refusal.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import cache as cache_mod
from .model import (
    Backend,
    BignumBudgetError,
    ModelParams,
    build_tables,
    root_distribution,
)
from .oracle import continuous_root_density
from .sampling import (
    DEFAULT_SWEEPS,
    derive_seed,
    sample_continuous_gibbs,
    sample_exact,
    tree_function_to_json_dict,
)
from .verify import check_continuous_tail, scan_depth_limit, verify_grid, verify_instance


def _params(d: int, m: int, k: int) -> ModelParams:
    try:
        return ModelParams(d=d, M=m, k=k)
    except ValueError as exc:
        raise click.exceptions.Exit(2) from _fail(str(exc))


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    return None


def _open_out(output: "str | None"):
    if output is None or output == "-":
        return sys.stdout
    return open(output, "w", newline="")


@click.group()
def main():
    """Exact counting, sampling, and inequality checks for grounded
    Lipschitz functions on d-ary trees."""


backend_opt = click.option(
    "--backend",
    type=click.Choice([b.value for b in Backend]),
    default=Backend.EXACT.value,
    show_default=True,
)


@main.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--M", "m", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@backend_opt
@click.option("--cache-dir", type=click.Path(path_type=Path), default=None)
def table(d, m, k, backend, cache_dir):
    """Build (or reuse) the cached level tables for one model."""
    params = _params(d, m, k)
    backend = Backend(backend)
    cache_dir = cache_dir or cache_mod.default_cache_dir()
    path = cache_mod.cache_path(cache_dir, params, backend)
    if path.exists():
        try:
            cache_mod.load_tables(path)
            click.echo(str(path))
            return
        except (ValueError, KeyError, json.JSONDecodeError):
            pass  # stale or unreadable: rebuild
    try:
        tables = build_tables(params, backend)
    except BignumBudgetError as exc:
        _fail(str(exc))
        raise click.exceptions.Exit(2)
    cache_mod.save_tables(tables, path)
    click.echo(str(path))


@main.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--M", "m", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@backend_opt
@click.option("--output", default=None)
def dist(d, m, k, backend, output):
    """Root distribution as CSV rows (t, log_weight, probability)."""
    params = _params(d, m, k)
    try:
        tables = build_tables(params, Backend(backend))
    except BignumBudgetError as exc:
        _fail(str(exc))
        raise click.exceptions.Exit(2)
    rd = root_distribution(tables)
    top = tables[-1]
    out = _open_out(output)
    try:
        out.write("t,log_weight,probability\n")
        for t in range(-rd.radius, rd.radius + 1):
            out.write(f"{t},{top.log_weight(t):.17g},{rd.prob(t):.17g}\n")
    finally:
        if out is not sys.stdout:
            out.close()


@main.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--M", "m", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--n", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@backend_opt
@click.option("--output", default=None)
def sample(d, m, k, n, seed, backend, output):
    """Uniform samples from the discrete model, one JSON object per line."""
    if n < 0:
        _fail("n must be >= 0")
        raise click.exceptions.Exit(2)
    params = _params(d, m, k)
    try:
        tables = build_tables(params, Backend(backend))
    except BignumBudgetError as exc:
        _fail(str(exc))
        raise click.exceptions.Exit(2)
    out = _open_out(output)
    try:
        for i in range(n):
            sub = derive_seed(seed, i)
            fn = sample_exact(tables, sub)
            out.write(json.dumps(tree_function_to_json_dict(fn, sub)) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


@main.command("sample-cont")
@click.option("--d", "d", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--sweeps", type=int, default=DEFAULT_SWEEPS, show_default=True)
@click.option("--n", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", default=None)
def sample_cont(d, k, sweeps, n, seed, output):
    """Approximate uniform samples from the continuous polytope (Gibbs)."""
    if d < 2 or k < 1 or sweeps < 1 or n < 0:
        _fail("need d >= 2, k >= 1, sweeps >= 1, n >= 0")
        raise click.exceptions.Exit(2)
    out = _open_out(output)
    try:
        for i in range(n):
            sub = derive_seed(seed, i)
            fn = sample_continuous_gibbs(d, k, sweeps, sub)
            out.write(json.dumps(tree_function_to_json_dict(fn, sub)) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


@main.command()
@click.option("--d", "d", type=int, default=None)
@click.option("--M", "m", type=int, default=None)
@click.option("--k", "k", type=int, default=None)
@backend_opt
@click.option("--continuous", is_flag=True, default=False)
@click.option("--grid-M", "grid_m", type=int, default=64, show_default=True)
@click.option("--table-file", type=click.Path(path_type=Path), default=None,
              help="Check a cached table file instead of rebuilding.")
@click.option("--all-claims", is_flag=True, default=False,
              help="Run the full verification grid d in 2..5, M in 1..20, k in 1..30.")
@click.option("--output", default=None)
def verify(d, m, k, backend, continuous, grid_m, table_file, all_claims, output):
    """Check the proved inequalities; exit 0 iff every check passes."""
    if all_claims:
        reports = verify_grid()
    elif continuous:
        if m is not None:
            _fail("--M conflicts with --continuous (the continuous model fixes M)")
            raise click.exceptions.Exit(2)
        if d is None or k is None or d < 2 or k < 1 or grid_m < 8:
            _fail("need d >= 2, k >= 1, grid-M >= 8")
            raise click.exceptions.Exit(2)
        reports = [check_continuous_tail(d, k, grid_m)]
    else:
        if d is None or m is None or k is None:
            _fail("--d, --M, --k are required unless --continuous or --all-claims is given")
            raise click.exceptions.Exit(2)
        params = _params(d, m, k)
        tables = None
        if table_file is not None:
            try:
                tables = cache_mod.load_tables(table_file)
            except (ValueError, KeyError, json.JSONDecodeError) as exc:
                _fail(f"unreadable table file: {exc}")
                raise click.exceptions.Exit(2)
            if tables[-1].params != params:
                _fail("table file parameters do not match the flags")
                raise click.exceptions.Exit(2)
        try:
            reports = verify_instance(params, Backend(backend), tables=tables)
        except BignumBudgetError as exc:
            _fail(str(exc))
            raise click.exceptions.Exit(2)

    payload = json.dumps([r.to_dict() for r in reports], indent=2)
    out = _open_out(output)
    try:
        out.write(payload + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    failures = [r for r in reports if not r.ok]
    for r in failures:
        click.echo(f"FAIL {r.claim} at witness {r.witness}", err=True)
    if failures:
        raise click.exceptions.Exit(1)


@main.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--M", "m", type=int, required=True)
@click.option("--kmax", type=int, required=True)
@click.option("--output", default=None)
def scan(d, m, kmax, output):
    """Total-variation distances between root laws at nearby depths (CSV)."""
    try:
        ModelParams(d=d, M=m, k=max(kmax, 1))
        if kmax < 3:
            raise ValueError(f"kmax must be >= 3, got {kmax}")
    except ValueError as exc:
        _fail(str(exc))
        raise click.exceptions.Exit(2)
    rows = scan_depth_limit(d, m, kmax)
    out = _open_out(output)
    try:
        out.write("k,tv_next,tv_next2\n")
        for k, tv1, tv2 in rows:
            out.write(f"{k},{tv1:.17g},{tv2:.17g}\n")
    finally:
        if out is not sys.stdout:
            out.close()


@main.command()
@click.option("--d", "d", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--grid-M", "grid_m", type=int, default=64, show_default=True)
@click.option("--output", default=None)
def density(d, k, grid_m, output):
    """Continuous root density on the grid x = t/grid_M (CSV rows x,density)."""
    if d < 2 or k < 1 or grid_m < 8:
        _fail("need d >= 2, k >= 1, grid-M >= 8")
        raise click.exceptions.Exit(2)
    xs, dens = continuous_root_density(d, k, grid_m)
    out = _open_out(output)
    try:
        out.write("x,density\n")
        for x, f in zip(xs, dens):
            out.write(f"{x:.17g},{f:.17g}\n")
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    main()
