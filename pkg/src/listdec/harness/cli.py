"""Command handlers: single-shot calculations and experiment runs."""

from __future__ import annotations

import csv
import json
import logging
import math
import platform
import time
from collections import defaultdict
from fractions import Fraction
from pathlib import Path
from typing import Dict, List

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, TextColumn
from rich.table import Table

from .. import bounds, chaining, codes, oracle, rip
from .._helpers import duration_fmt, fraction_fmt, sci_fmt, sparkline, worker_count
from ..errors import InputError
from ..gf import field_for_order
from .core import (
    PARAM_COLUMNS,
    VERDICTS,
    ExperimentConfig,
    ExperimentRecord,
    ExperimentRunner,
    violations,
)

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)


def csv_columns(experiment: str, include_timing: bool = False) -> List[str]:
    """Fixed column set of an experiment's CSV."""
    columns = ["experiment", "trial", "derived_seed", *PARAM_COLUMNS[experiment]]
    columns += ["quantity", "value", "method"]
    if include_timing:
        columns.append("wall_ms")
    return columns


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


def export_records_csv(
    records: List[ExperimentRecord],
    experiment: str,
    output_path: str,
    include_timing: bool = False,
):
    """Write records in trial order, one row per measured quantity."""
    columns = csv_columns(experiment, include_timing)
    params = PARAM_COLUMNS[experiment]
    with open(output_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for r in records:
            row = [r.experiment, r.trial, r.derived_seed]
            row += [_cell(r.params.get(name, "")) for name in params]
            row += [r.quantity, sci_fmt(r.value), r.method]
            if include_timing:
                row.append(f"{r.wall_ms:.3f}")
            writer.writerow(row)


def machine_info() -> Dict:
    """CPU, OS and worker description attached to timed JSON exports."""
    import cpuinfo
    import psutil

    system = platform.system()
    if system == "Linux":
        try:
            import distro

            system = f"Linux ({distro.name()} {distro.version()})"
        except ImportError:
            system = f"Linux {platform.release()}"
    return {
        "cpu": cpuinfo.get_cpu_info().get("brand_raw", platform.processor()),
        "physical_cores": psutil.cpu_count(logical=False),
        "logical_cores": psutil.cpu_count(),
        "system": system,
        "python": platform.python_version(),
        "workers": worker_count(),
    }


def export_records_json(
    records: List[ExperimentRecord], config: ExperimentConfig, output_path: str
):
    """Write the config and every record to a JSON file.

    The machine block is only included together with wall times, so untimed
    exports stay identical across hosts.
    """
    data: dict = {
        "experiment": config.experiment,
        "seed": config.seed,
        "params": config.params,
        "records": [],
    }
    if config.include_timing:
        data["machine"] = machine_info()

    for r in records:
        entry = {
            "trial": r.trial,
            "derived_seed": r.derived_seed,
            "params": r.params,
            "quantity": r.quantity,
            "value": r.value if math.isfinite(r.value) else None,
            "method": r.method,
        }
        if config.include_timing:
            entry["wall_ms"] = r.wall_ms
        data["records"].append(entry)

    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def display_records(records: List[ExperimentRecord], config: ExperimentConfig):
    """Per-quantity summary table followed by the one-line verdict."""
    grouped: Dict[str, List[float]] = defaultdict(list)
    for r in records:
        if not r.is_error():
            grouped[r.quantity].append(r.value)

    table = Table(
        title=f"{config.experiment} (seed {config.seed})",
        show_header=True,
        header_style="bold",
    )
    table.add_column("Quantity", style="cyan")
    table.add_column("Count", style="yellow", justify="right")
    table.add_column("Min", style="magenta")
    table.add_column("Mean", style="magenta")
    table.add_column("Max", style="magenta")

    for quantity, values in grouped.items():
        arr = np.array(values, dtype=float)
        finite = arr[np.isfinite(arr)]
        if finite.size == 0:
            table.add_row(quantity, str(arr.size), "-", "-", "-")
            continue
        style = "green" if quantity not in VERDICTS or finite.min() == 1 else "red"
        table.add_row(
            f"[{style}]{quantity}[/{style}]",
            str(arr.size),
            f"{finite.min():.6g}",
            f"{finite.mean():.6g}",
            f"{finite.max():.6g}",
        )
    console.print(table)

    curve = grouped.get("mean_xprime_error")
    if curve:
        console.print(
            f"error by m: {sparkline(curve, 0.0, max(curve))}  "
            f"[dim](m = {', '.join(str(m) for m in config.params['m_values'])})[/]"
        )

    console.print(summary_line(records, config))


def summary_line(records: List[ExperimentRecord], config: ExperimentConfig) -> str:
    errors = sum(1 for r in records if r.is_error())
    bad = violations(records)
    trials = len({r.trial for r in records})
    style = "green" if errors == 0 and bad == 0 else ("yellow" if bad == 0 else "red")
    marker = "✓" if style == "green" else ("⚠" if bad == 0 else "✗")
    line = (
        f"{config.experiment}: {len(records)} records, {trials} trials, "
        f"{bad} violations, {errors} errors"
    )
    if config.include_timing and records:
        total = sum({r.trial: r.wall_ms for r in records}.values())
        line += f", {duration_fmt(total)}"
    return f"[{style}]{marker} {line}[/]"


def run_experiment(config: ExperimentConfig, show_progress: bool = True):
    """Run an experiment behind a progress bar on stderr."""
    if not show_progress:
        return ExperimentRunner(config).run()

    start = time.time()

    class ElapsedTimeColumn(TextColumn):
        """Elapsed time in HH:MM:SS.CS."""

        def __init__(self, start_time):
            self.start_time = start_time
            super().__init__("")

        def render(self, task):
            elapsed = time.time() - self.start_time
            hours = int(elapsed // 3600)
            minutes = int(elapsed % 3600 // 60)
            seconds = elapsed % 60
            centiseconds = int((seconds % 1) * 100)
            return f"{hours:02d}:{minutes:02d}:{int(seconds):02d}.{centiseconds:02d}"

    with Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(complete_style="green", finished_style="green"),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        ElapsedTimeColumn(start),
        console=err_console,
        transient=True,
    ) as progress:
        runner = ExperimentRunner(config)
        task = progress.add_task(
            f"[cyan]{config.experiment}...[/]", total=runner.total_steps()
        )
        runner.progress = lambda: progress.advance(task)
        return runner.run()


def experiment_command(config: ExperimentConfig, show_progress: bool = True) -> int:
    """Run, summarize and export one experiment."""
    records = run_experiment(config, show_progress)
    display_records(records, config)

    if config.output:
        if config.json_output:
            export_records_json(records, config, config.output)
        else:
            export_records_csv(
                records, config.experiment, config.output, config.include_timing
            )
        console.print(f"[green]✓ Records exported to {config.output}[/]")
    return 0


def bounds_command(args) -> int:
    """Evaluate the closed-form radii requested on the command line."""
    q = args.q
    printed = False

    if args.johnson is not None:
        console.print(f"{bounds.johnson_radius(q, args.johnson):.12g}")
        printed = True

    needs_L = [args.avg_johnson, args.simplified, args.deletion]
    if (any(v is not None for v in needs_L) or args.rip_to_ld) and args.L is None:
        raise InputError("--L is required for list-size bounds")

    results = []
    if args.avg_johnson is not None:
        results.append(bounds.avg_johnson_bound(q, args.avg_johnson, args.L))
    if args.simplified is not None:
        results.append(bounds.simplified_johnson(q, args.simplified, args.L))
    if args.deletion is not None:
        results.append(bounds.deletion_bound(q, args.deletion, args.A, args.L))
    if args.rip_to_ld:
        results.append(bounds.rip_to_ld_radius(q, args.L))
        console.print(
            f"rip_distance_threshold: {bounds.rip_distance_threshold(q, args.L):.12g}"
        )
    for bound in results:
        console.print(
            f"{bound.provenance}: radius {bound.radius:.12g}, list size {bound.list_size}"
        )
        printed = True

    if args.rate is not None:
        console.print(f"rate: {bounds.main_rate_bound(q, args.rate, args.gamma):.12g}")
        printed = True

    if not printed:
        raise InputError("nothing to compute; pass --johnson, --avg-johnson, ...")
    return 0


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e


def oracle_command(args) -> int:
    """Largest list at a radius for a generator read from a file."""
    gen = codes.parse_generator(_read_text(args.generator))
    code = codes.enumerate_codewords(gen)
    rho = Fraction(args.radius).limit_denominator(oracle.RADIUS_GRANULARITY)
    result = oracle.list_size_at_radius(
        code, rho, mode=args.mode, budget=args.budget, seed=args.seed
    )

    table = Table(show_header=False, box=None, padding=(0, 1))
    table.add_column("Label", style="dim")
    table.add_column("Value", style="bold")
    table.add_row("Code:", f"q={code.q}, ktilde={gen.ktilde}, n={code.n}")
    table.add_row("Radius:", fraction_fmt(rho))
    table.add_row("Max list:", str(result.max_count))
    table.add_row("Center:", " ".join(str(v) for v in result.witness_center))
    table.add_row("Centers:", f"{result.centers_examined} ({result.mode})")
    console.print(Panel(table, title="[bold]List oracle[/]", border_style="cyan"))

    if args.ell is not None:
        ok = result.max_count <= args.ell
        verdict = "[green]✓ list decodable[/]" if ok else "[red]✗ not list decodable[/]"
        console.print(f"{verdict} at radius {rho} with list size {args.ell}")
    return 0


def _rip_matrix(args):
    if args.matrix:
        M = rip.load_matrix(_read_text(args.matrix))
        return M, args.normalizer or 1.0
    spec = field_for_order(args.q)
    if args.rows:
        T = rip.sample_T(spec, args.ktilde, args.rows, args.seed)
        rows = len(T)
    else:
        T = np.arange(spec.q**args.ktilde)
        rows = T.size
    M = rip.phi_lin_sub(spec, args.ktilde, T)
    return M, math.sqrt((spec.q - 1) * rows)


def rip_command(args) -> int:
    """Single RIP constant of a Lin submatrix or a matrix read from a file."""
    M, normalizer = _rip_matrix(args)
    if args.rip_command == "exact":
        report = rip.rip_constant_exact(M, args.k, normalizer)
    else:
        report = rip.rip_constant_sampled(M, args.k, normalizer, args.trials, args.seed)

    console.print(f"{report.delta:.12g}")
    console.print(
        f"[dim]order {report.k}, {report.method}, "
        f"support {list(report.witness_support)}, "
        f"{report.supports_examined} supports examined[/]"
    )
    return 0


def moment_command(args) -> int:
    """Exact chaos moment of one coefficient grid against (4Kms)^s."""
    if args.all_ones:
        grid = np.ones((args.m, args.m))
    elif args.grid:
        try:
            grid = np.loadtxt(args.grid, ndmin=2)
        except (OSError, ValueError) as e:
            raise InputError(f"cannot read grid {args.grid}: {e}") from e
    else:
        raise InputError("pass --all-ones or --grid FILE")
    if grid.shape != (args.m, args.m):
        raise InputError(f"grid shape {grid.shape} does not match m={args.m}")

    K = args.K if args.K is not None else Fraction(float(np.abs(grid).max()))
    moment = chaining.chaos_moment_exact(grid, args.s)
    bound = chaining.chaos_moment_bound(K, args.m, args.s)
    console.print(fraction_fmt(moment))
    console.print(f"bound {fraction_fmt(bound)}")
    if abs(moment) > bound:
        console.print("[red]✗ moment exceeds (4Kms)^s[/]")
    return 0
