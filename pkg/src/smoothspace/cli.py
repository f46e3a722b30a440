from __future__ import annotations

import logging
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterator, Sequence

import click
import numpy as np
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from smoothspace.classifier import ClassifyOptions, Outcome, classify, verdict_to_json
from smoothspace.config import ToleranceConfig, load_env, parse_tolerances
from smoothspace.counterexample import CounterexampleConfig, counterexample_run
from smoothspace.embedding import (
    annihilation_residual,
    embedding_ratio,
    l1_derivative_ratio,
    solve_system,
)
from smoothspace.errors import SmoothspaceError
from smoothspace.gn import gn_check, random_bump
from smoothspace.harness import SelftestConfig, embedding_envelope, run_selftest
from smoothspace.models import load_counterexample_config, load_embedding_problem
from smoothspace.multipliers import dominance_constant, multiplier_tails
from smoothspace.newton import build_diagram
from smoothspace.operators import DiffOperator, MultiIndex
from smoothspace.oscillatory import oscillatory_sweep
from smoothspace.parser import parse_operator, read_operator_file
from smoothspace.trig import write_trigpoly
from smoothspace.utils import ensure_dir, to_json

app = typer.Typer(help="Decide complementation of smooth spaces on the torus and probe estimates")
verify_app = typer.Typer(help="Numerical checks of embedding, multiplier and divergence estimates")
app.add_typer(verify_app, name="verify")
console = Console(stderr=True)

VERBOSE = typer.Option(False, "--verbose", "-v", help="Log rule decisions and sweep progress")
TOL = typer.Option(None, "--tol", help="Tolerances, e.g. 'residual=1e-8,rank=1e-12'")


def _setup(verbose: bool, tol: str | None) -> ToleranceConfig:
    env = load_env()
    level = logging.DEBUG if verbose else getattr(logging, env.log_level, logging.WARNING)
    root = logging.getLogger()
    if not any(isinstance(h, RichHandler) for h in root.handlers):
        logging.basicConfig(format="%(message)s", handlers=[RichHandler(console=console)])
    logging.getLogger("smoothspace").setLevel(level)
    return parse_tolerances(tol, env.tolerances)


@contextmanager
def _input_errors() -> Iterator[None]:
    try:
        yield
    except (SmoothspaceError, ValueError) as exc:
        console.print(f"[bold red]Error:[/bold red] {exc}")
        raise typer.Exit(2) from exc


def _emit(data: Any) -> None:
    typer.echo(to_json(data))


def _read_operators(exprs: list[str] | None, file: Path | None) -> list[DiffOperator]:
    ops = [parse_operator(text) for text in exprs or []]
    if file is not None:
        ops.extend(read_operator_file(file))
    if not ops:
        raise ValueError("No operators given; pass expressions or --file")
    return ops


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise typer.BadParameter(f"not a complex number: {text!r}") from exc


@app.command("classify")
def classify_cmd(
    exprs: list[str] = typer.Argument(None, help="Operator expressions, e.g. 'd1^2 + d2'"),
    file: Path | None = typer.Option(None, "--file", help="File with one expression per line"),
    strict: bool = typer.Option(False, "--strict", help="Exit 1 when the verdict is Undecided"),
    pretty: bool = typer.Option(False, "--pretty", help="Print a summary instead of JSON"),
    box: int = typer.Option(128, "--box", min=16, help="Lattice box for the zero-set rule"),
    bound: int = typer.Option(12, "--bound", min=1, help="Height bound for rational substitutions"),
    tol: str | None = TOL,
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        tolerances = _setup(verbose, tol)
        ops = _read_operators(exprs, file)
        options = ClassifyOptions(substitution_bound=bound, zero_set_box=box, tolerances=tolerances)
        verdict = classify(ops, options)
    if pretty:
        table = Table(title="Verdict")
        table.add_column("Field")
        table.add_column("Value")
        table.add_row("outcome", str(verdict.outcome))
        table.add_row("rule", verdict.rule or "-")
        table.add_row("inexact", str(verdict.inexact))
        for key in sorted(verdict.witnesses):
            table.add_row(key, to_json(verdict.witnesses[key]))
        Console().print(table)
    else:
        _emit(verdict_to_json(verdict))
    if strict and verdict.outcome is Outcome.UNDECIDED:
        raise typer.Exit(1)


@app.command("diagram")
def diagram_cmd(
    exprs: list[str] = typer.Argument(None, help="Operator expressions"),
    file: Path | None = typer.Option(None, "--file", help="File with one expression per line"),
    pretty: bool = typer.Option(False, "--pretty", help="Print a summary instead of JSON"),
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        _setup(verbose, None)
        diagram = build_diagram(_read_operators(exprs, file))
    if not pretty:
        _emit(diagram.as_dict())
        return
    out = Console()
    out.print(f"[bold]Core nodes:[/bold] {[n.as_tuple() for n in diagram.core_nodes]}")
    for line, kappa in zip(diagram.lines, diagram.kappas):
        nodes = [n.as_tuple() for n in line.nodes]
        out.print(f"  x/{line.a} + y/{line.b} = 1  nodes={nodes}  kappa={kappa}")


@app.command("solve")
def solve_cmd(
    problem: Path = typer.Argument(..., help="EmbeddingProblem JSON file"),
    output_dir: Path | None = typer.Option(None, help="Also write phi_j as JSON lines here"),
    tol: str | None = TOL,
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        tolerances = _setup(verbose, tol)
        p = load_embedding_problem(problem)
        residual = annihilation_residual(p)
        phis = solve_system(p, tolerances.residual)
    if output_dir is not None:
        ensure_dir(output_dir)
        for j, phi in enumerate(phis, start=1):
            write_trigpoly(output_dir / f"phi_{j}.jsonl", phi)
        console.print(f"[bold green]Wrote[/bold green] {len(phis)} files to {output_dir}")
    _emit(
        {
            "phis": [phi.as_rows() for phi in phis],
            "residual": residual,
            "exact": p.exact,
            "parityVerified": p.parity_verified,
        }
    )


@verify_app.command("embedding")
def verify_embedding(
    problem: Path | None = typer.Option(None, "--problem", help="Check one EmbeddingProblem JSON"),
    k: int = typer.Option(1, "--k", min=1),
    l: int = typer.Option(1, "--l", min=1),
    n_chain: int = typer.Option(1, "--N", min=1, help="Chain length for random inputs"),
    radius: list[int] = typer.Option(None, "--radius", help="Support radii (repeatable)"),
    samples: int = typer.Option(8, min=1, help="Random inputs per radius"),
    seed: int = typer.Option(0),
    oversample: int = typer.Option(8, min=4),
    tol: str | None = TOL,
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        tolerances = _setup(verbose, tol)
        if problem is not None:
            p = load_embedding_problem(problem)
            first, second = l1_derivative_ratio(p, oversample, tolerances.residual)
            _emit(
                {
                    "ratio": embedding_ratio(p, oversample, tolerances.residual),
                    "l1Ratios": [first, second],
                    "parityVerified": p.parity_verified,
                }
            )
            return
        report = embedding_envelope(
            k, l, radius or [4, 8, 16, 32], samples, n_chain, seed, oversample
        )
    _emit(report.as_dict())


@verify_app.command("dominance")
def verify_dominance(
    expr: str = typer.Argument(..., help="Operator R"),
    node: str = typer.Option(..., "--node", help="Core node as 'x,y'"),
    scales: list[int] = typer.Option(None, "--M", help="Annulus scales (repeatable)"),
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        _setup(verbose, None)
        x, _, y = node.partition(",")
        mi = MultiIndex(int(x), int(y))
        ms = scales or [16, 64, 256, 1024]
        values = dominance_constant(parse_operator(expr), mi, ms)
    _emit({"node": [mi.x, mi.y], "M": ms, "constants": values})


@verify_app.command("multiplier")
def verify_multiplier(
    alpha: float = typer.Option(0.0, "--alpha"),
    beta: float = typer.Option(0.0, "--beta"),
    a: int = typer.Option(1, "--a", min=1),
    b: int = typer.Option(1, "--b", min=1),
    sign: int = typer.Option(1, "--sign", help="+1 or -1 in (im)^2a +- (in)^2b"),
    scales: list[int] = typer.Option(None, "--M", help="Tail start points (repeatable)"),
    m_max: int = typer.Option(1024, "--Mmax", min=2),
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        _setup(verbose, None)
        ms = scales or [8, 16, 32, 64]
        tails = multiplier_tails((alpha, beta), (a, b), sign, ms, m_max)
    _emit({"M": ms, "Mmax": m_max, "tails": tails})


@verify_app.command("counterexample")
def verify_counterexample(
    config: Path | None = typer.Option(None, "--config", help="CounterexampleConfig JSON file"),
    k: int = typer.Option(1, "--k", min=1),
    l: int = typer.Option(1, "--l", min=1),
    n_chain: int = typer.Option(1, "--N", min=1),
    j0: int = typer.Option(0, "--j0", min=0),
    j1: int | None = typer.Option(None, "--j1"),
    a1n: str = typer.Option("1", "--a1N", help="Coefficient a_{1N} (rational)"),
    delta: str = typer.Option("1/4", "--delta", help="Window width in (0, 1]"),
    cmin: int = typer.Option(1, "--Cmin", min=1),
    pmax: int = typer.Option(4096, "--Pmax", min=1),
    window: str = typer.Option("auto", "--window", help="auto | small_t | literal"),
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        _setup(verbose, None)
        if config is not None:
            cfg = load_counterexample_config(config)
        else:
            if window not in ("auto", "small_t", "literal"):
                raise ValueError(f"Unknown window: {window!r}")
            a1 = [Fraction(0)] * n_chain + [Fraction(a1n)]
            cfg = CounterexampleConfig(
                k=k,
                l=l,
                N=n_chain,
                j0=j0,
                j1=j1,
                a1=a1,
                delta=Fraction(delta),
                cmin=cmin,
                pmax=pmax,
                window=window,  # type: ignore[arg-type]
            )
        report = counterexample_run(cfg)
    _emit(report.as_dict())


@verify_app.command("oscillatory")
def verify_oscillatory(
    u: str = typer.Option("i", "--u", help="Point in the upper half plane, e.g. '1+2i'"),
    v: str = typer.Option("2i", "--v"),
    k: int = typer.Option(1, "--k", min=1),
    l: int = typer.Option(3, "--l", min=1),
    bs: list[float] = typer.Option(None, "--b", help="Frequencies b (repeatable)"),
    epss: list[float] = typer.Option(None, "--eps", help="Lower limits (repeatable)"),
    rs: list[float] = typer.Option(None, "--R", help="Upper limits (repeatable)"),
    tol: str | None = TOL,
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        tolerances = _setup(verbose, tol)
        result = oscillatory_sweep(
            _complex(u),
            _complex(v),
            k,
            l,
            bs or [0.0, 1.0, -1.0, 10.0, -10.0, 100.0, -100.0],
            epss or [1e-4, 1e-2, 1.0],
            rs or [1.0, 10.0, 1e3],
            tolerances.quadrature,
        )
    _emit(result.as_dict())


@verify_app.command("gn")
def verify_gn(
    grid: int = typer.Option(128, "--grid", min=3),
    samples: int = typer.Option(100, "--samples", min=1),
    seed: int = typer.Option(0),
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        _setup(verbose, None)
        rng = np.random.default_rng(seed)
        slack = 1 + 2 / grid
        results = [gn_check(random_bump(rng, grid)) for _ in range(samples)]
    violations = sum(1 for r in results if r.lhs > r.rhs * slack)
    worst = max((r.lhs / r.rhs for r in results if r.rhs > 0), default=0.0)
    _emit({"grid": grid, "samples": samples, "violations": violations, "worstRatio": worst})


@app.command("selftest")
def selftest_cmd(
    invariance: bool = typer.Option(False, help="Also re-classify under random transformations"),
    seed: int = typer.Option(0),
    recombinations: int = typer.Option(20, min=0),
    substitutions: int = typer.Option(20, min=0),
    pretty: bool = typer.Option(False, "--pretty", help="Print a table instead of JSON"),
    verbose: bool = VERBOSE,
) -> None:
    with _input_errors():
        _setup(verbose, None)
        report = run_selftest(
            SelftestConfig(
                seed=seed,
                invariance=invariance,
                recombinations=recombinations,
                substitutions=substitutions,
            )
        )
    if pretty:
        table = Table(title=f"Selftest ({report.elapsed:.2f}s)")
        for column in ("case", "expected", "outcome", "rule", "ok"):
            table.add_column(column)
        for case in report.cases:
            mark = "[green]yes[/green]" if case.ok else "[red]no[/red]"
            table.add_row(case.name, case.expected, case.outcome, case.rule or "-", mark)
        Console().print(table)
        for failure in report.invariance_failures:
            console.print(f"[yellow]invariance failure:[/yellow] {failure}")
    else:
        _emit(report.as_dict())
    if not report.ok:
        raise typer.Exit(1)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        result = app(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    raise SystemExit(main())
