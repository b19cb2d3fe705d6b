"""
Command-line entry point: run, check, conjugate and refine subcommands.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from cli.loader import build_config, conjugate_params, load_document
from cli.manifest import RunManifest
from cli.schema import RunDocument
from core.config import Config
from core.constitutive import AdmissibilitySpec, check_admissibility
from core.errors import InvalidInputError, LabError
from core.nfunction import SampleSpec, check_axioms, conjugate_table, random_symmetric_directions
from core.schema import TableType
from diagnostics import bounds_report, energy_report, nikolskii_seminorm, records_rows, summary_lines, thermal_report
from spectral.grid import snapshot_rows
from utils.audit_logger import RunAuditLogger
from utils.csv_export import write_table
from workflow import refine_study, run
from workflow.refinement import parse_ladder
from workflow.simulation import Trajectory

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ABORTED = 2
EXIT_CHECK_FAILED = 3

SUMMARY_FILE = "summary.txt"


class UsageError(Exception):
    """Bad command line."""


class LabArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports errors to the caller instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> LabArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="Path to the JSON run config")
    common.add_argument("--output", help="Output directory (overrides output.directory)")
    common.add_argument("--seed", type=int, help="Sampling seed (overrides seed)")
    common.add_argument("--cadence", type=int, help="Steps between records (overrides time.cadence)")
    common.add_argument("--quiet", action="store_true", help="Only warnings and errors")
    common.add_argument("--settings", help="Tool settings YAML (default ./muslab.yaml)")

    parser = LabArgumentParser(prog="muslab", description="Musielak-Orlicz fluid laboratory")
    sub = parser.add_subparsers(dest="command", metavar="{run,check,conjugate,refine}", parser_class=LabArgumentParser)
    sub.required = True
    sub.add_parser("run", parents=[common], help="Simulate and write diagnostics")
    sub.add_parser("check", parents=[common], help="Admissibility and hypothesis report only")
    sub.add_parser("conjugate", parents=[common], help="Export a numerical conjugate table")
    refine = sub.add_parser("refine", parents=[common], help="Refinement study along a parameter ladder")
    refine.add_argument("--ladder", required=True, help="param=v1,v2,... with param in dt, eps, N, n, k")
    return parser


def setup_logging(settings: Config, quiet: bool) -> None:
    cfg = settings.get_logging_config()
    level = logging.WARNING if quiet else getattr(logging, str(cfg["level"]).upper(), logging.INFO)
    logging.basicConfig(level=level, format=cfg["format"], force=True)


def _overrides(args) -> Dict[str, Any]:
    return {"seed": args.seed, "time.cadence": args.cadence, "output.directory": args.output}


def _write_summary(output_dir: Path, lines: List[str]) -> Path:
    path = output_dir / SUMMARY_FILE
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
    return path


def _prepare(args, command: str, with_config: bool = True):
    document = load_document(args.config, _overrides(args))
    config = build_config(document) if with_config else None
    output_dir = Path(document.output.directory)
    RunManifest(
        config_path=str(args.config),
        document=document,
        config=config,
        output_dir=output_dir,
        command=command,
        seed=document.seed,
    ).write()
    return document, config, output_dir


def _nikolskii_deltas(document: RunDocument) -> Optional[List[float]]:
    multiples = document.diagnostics.nikolskii_multiples
    if not multiples:
        return None
    h = document.time.cadence * document.time.dt
    return [m * h for m in multiples]


def _write_snapshots(trajectory: Trajectory, output_dir: Path) -> None:
    ctx = trajectory.context
    for label, state in (("initial", trajectory.snapshots[0]), ("final", trajectory.final_state)):
        fields = {
            "rho": state.rho,
            "u": ctx.basis.synthesize_velocity(state.alpha),
            "theta": ctx.basis.synthesize_temperature(state.nu),
        }
        columns = snapshot_rows(ctx.grid, fields)
        write_table(output_dir / f"snapshot_{label}.csv", columns, TableType.SNAPSHOT, list(columns))


def _verdict_panel(console: Console, title: str, passed: bool, body: str) -> None:
    style = "green" if passed else "red"
    console.print(Panel(body, title=f"[bold {style}]{title}[/bold {style}]", border_style=style))


def cmd_run(args, settings: Config, console: Console) -> int:
    document, config, output_dir = _prepare(args, "run")
    audit = RunAuditLogger(output_dir, settings)
    try:
        for check in config.verdict.checks:
            audit.log_check(f"hypotheses.{check.name}", check.passed, check.detail)
        trajectory = run(config, audit_logger=audit)
        energy = energy_report(trajectory)
        thermal = thermal_report(trajectory)
        bounds = bounds_report(trajectory)
        for name, ok in bounds.checks.items():
            audit.log_check(f"bounds.{name}", bool(ok), "")
    finally:
        audit.close()

    nikolskii = None
    try:
        nikolskii = nikolskii_seminorm(trajectory, _nikolskii_deltas(document))
    except InvalidInputError as e:
        logger.warning(f"[CLI] Nikolskii seminorm skipped: {e}")

    write_table(output_dir / "diagnostics.csv", records_rows(trajectory), TableType.DIAGNOSTICS)
    write_table(output_dir / "energy_report.csv", energy.to_rows(), TableType.ENERGY)
    write_table(output_dir / "thermal_report.csv", thermal.to_rows(), TableType.THERMAL)
    write_table(output_dir / "bounds_report.csv", bounds.rows + [bounds.summary], TableType.BOUNDS)
    if document.output.snapshots:
        _write_snapshots(trajectory, output_dir)
    _write_summary(output_dir, summary_lines(trajectory, energy, thermal, bounds, nikolskii))

    last = trajectory.records[-1]
    table = Table(title=f"{config.name}: {len(trajectory.records)} records", box=box.SIMPLE)
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right")
    for label, value in (
        ("t", last.t),
        ("kinetic energy", last.kinetic_energy),
        ("mass", last.mass),
        ("rho range", f"[{last.rho_min:.6g}, {last.rho_max:.6g}]"),
        ("min theta", last.theta_min),
        ("energy residual", last.energy_residual),
        ("thermal residual", last.thermal_residual),
        ("dashboard", energy.dashboard),
        ("nikolskii", float("nan") if nikolskii is None else nikolskii),
    ):
        table.add_row(label, value if isinstance(value, str) else f"{value:.6g}")
    console.print(table)
    body = "bounds: " + ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in bounds.checks.items())
    if trajectory.flagged:
        body += "\nexistence hypotheses fail: " + config.verdict.summary()
    _verdict_panel(console, "Run complete", bounds.passed and not trajectory.flagged, body)
    return EXIT_OK


def cmd_check(args, settings: Config, console: Console) -> int:
    document, config, output_dir = _prepare(args, "check")
    diag = document.diagnostics
    params = conjugate_params(document)
    spec = AdmissibilitySpec(
        sample_count=diag.admissibility_samples,
        pair_count=diag.admissibility_pairs,
        seed=document.seed,
        conjugate_params=params,
    )
    admissibility = check_admissibility(config.stress, config.heat, spec)
    nf = config.stress.nfunction
    x_points = np.repeat(np.linspace(0.0, 2.0 * np.pi, 9)[:-1, None], nf.dim, axis=1)
    axioms = check_axioms(nf, SampleSpec(x_points=x_points, seed=document.seed))
    verdict = config.verdict

    write_table(output_dir / "admissibility_report.csv", admissibility.to_rows(), TableType.ADMISSIBILITY)
    write_table(output_dir / "axiom_report.csv", axioms.to_rows(), TableType.AXIOMS)
    write_table(
        output_dir / "hypothesis_report.csv",
        [{"check": c.name, "passed": c.passed, "informational": c.informational, "detail": c.detail} for c in verdict.checks],
        TableType.HYPOTHESES,
    )
    passed = admissibility.passed and axioms.passed and verdict.passed
    lines = [f"check.passed={'true' if passed else 'false'}", f"check.coercivity_const={config.stress.coercivity_const:.17g}"]
    for c in admissibility.checks.values():
        lines.append(f"admissibility.{c.name}={'true' if c.passed else 'false'}")
        lines.append(f"admissibility.{c.name}.worst={c.worst:.17g}")
    for c in axioms.checks.values():
        lines.append(f"axioms.{c.name}={'true' if c.passed else 'false'}")
    lines.append(f"axioms.delta2={axioms.delta2_verdict.value}")
    for c in verdict.checks:
        lines.append(f"hypotheses.{c.name}={'true' if c.passed else 'false'}")
    _write_summary(output_dir, lines)

    table = Table(title=f"Admissibility of {config.stress.name}", box=box.SIMPLE)
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Worst", justify="right")
    for c in admissibility.checks.values():
        table.add_row(c.name, "pass" if c.passed else "[red]FAIL[/red]", f"{c.worst:.3e}")
    for c in axioms.checks.values():
        table.add_row(f"axiom {c.name}", "pass" if c.passed else "[red]FAIL[/red]", f"{c.worst:.3e}")
    table.add_row("delta2", axioms.delta2_verdict.value, f"{max(axioms.delta2_ratios):.3e}")
    for c in verdict.checks:
        table.add_row(f"hypothesis {c.name}", "pass" if c.passed else "[red]FAIL[/red]", c.detail)
    console.print(table)
    _verdict_panel(console, "Check", passed, f"c_c = {config.stress.coercivity_const:.12g}")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_conjugate(args, settings: Config, console: Console) -> int:
    document, config, output_dir = _prepare(args, "conjugate")
    section = document.conjugate
    rng = np.random.default_rng(document.seed)
    nf = config.stress.nfunction
    points = config.grid.point_list
    xs = points[rng.integers(0, points.shape[0], section.sample_count)]
    radii = rng.uniform(0.0, section.radius_max, section.sample_count)
    Ls = random_symmetric_directions(rng, section.sample_count, nf.dim) * radii[:, None, None]
    rows = conjugate_table(nf, xs, Ls, conjugate_params(document))
    path = write_table(output_dir / "conjugate_table.csv", rows, TableType.CONJUGATE, list(rows[0]))
    console.print(f"[green]✓[/green] {len(rows)} conjugate values of {nf.name} written to {path}")
    return EXIT_OK


def cmd_refine(args, settings: Config, console: Console) -> int:
    parameter, values = parse_ladder(args.ladder)
    document, config, output_dir = _prepare(args, "refine")
    report = refine_study(config, parameter, values)
    write_table(output_dir / "refine_report.csv", report.to_rows(), TableType.REFINEMENT)

    table = Table(title=f"Refinement in {parameter}", box=box.SIMPLE)
    for column in ("value", "status", "diff_u", "order_u", "diff_theta", "order_theta", "dashboard"):
        table.add_column(column, justify="right")
    for level in report.levels:
        table.add_row(
            f"{level.value:g}",
            level.status.value,
            f"{level.diff_u:.3e}",
            f"{level.order_u:.3f}",
            f"{level.diff_theta:.3e}",
            f"{level.order_theta:.3f}",
            f"{level.dashboard:.6g}",
        )
    console.print(table)
    failed = [level for level in report.levels if level.trajectory is None]
    return EXIT_ABORTED if failed else EXIT_OK


COMMANDS = {"run": cmd_run, "check": cmd_check, "conjugate": cmd_conjugate, "refine": cmd_refine}


def execute(argv: Optional[Sequence[str]] = None) -> int:
    """Parse `argv`, dispatch the subcommand and return the exit code.

    0 success, 1 invalid input or bad usage, 2 rejected or aborted run,
    3 failed acceptance check in `check`.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        Console(stderr=True).print(f"{parser.format_usage()}muslab: error: {e}", markup=False, highlight=False)
        return EXIT_INVALID
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    settings = Config(args.settings)
    setup_logging(settings, args.quiet)
    console = Console(quiet=args.quiet)
    try:
        return COMMANDS[args.command](args, settings, console)
    except InvalidInputError as e:
        console.print(f"[red]Invalid input:[/red] {e}")
        logger.error(f"[CLI] {args.command}: {e}")
        return EXIT_INVALID
    except LabError as e:
        console.print(f"[red]Run stopped:[/red] {e}")
        logger.error(f"[CLI] {args.command}: {type(e).__name__}: {e}")
        return EXIT_ABORTED
