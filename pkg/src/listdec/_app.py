from __future__ import annotations

import argparse
import json
import logging
import platform
import sys
from sys import version_info

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from .__about__ import __current_year__, __version__
from .errors import BudgetError, InputError, ListDecError

logger = logging.getLogger(__name__)

err_console = Console(stderr=True)

EXIT_INPUT = 1
EXIT_BUDGET = 2


class CustomHelpFormatter(argparse.RawTextHelpFormatter):
    """Custom formatter to display subcommands."""

    def _format_action(self, action):
        result = super()._format_action(action)

        if isinstance(action, argparse._SubParsersAction):
            # e.g. "{bounds,oracle,...}"
            metavar = self._metavar_formatter(action, action.dest)(1)[0]

            new_lines = []
            for line in result.split("\n"):
                # the standalone metavar line is folded into the heading
                if (
                    line.strip()
                    and line.strip().startswith("{")
                    and line.strip().endswith("}")
                ):
                    continue
                if not line.strip() and not new_lines:
                    continue
                new_lines.append(line)

            result = "\n".join([f"commands: {metavar}", *new_lines])

        return result

    def start_section(self, heading):
        if heading == "positional arguments":
            super().start_section(None)
        else:
            super().start_section(heading)


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1 instead of argparse's 2 (reserved for budgets)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _columns_epilog() -> str:
    from .harness.cli import csv_columns

    lines = ["CSV columns (add --timing for wall_ms):"]
    for experiment in ("rip_scan", "reduction_chain", "johnson_audit",
                       "covering_curve", "moment_audit"):
        lines.append(f"  {experiment}: {','.join(csv_columns(experiment))}")
    return "\n".join(lines)


def _add_experiment_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--config",
        "-c",
        type=str,
        default=None,
        help="JSON config {experiment, params, seed, output}; flags override it",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Master seed (mandatory here or in the config)",
    )
    parser.add_argument(
        "--param",
        "-p",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Set an experiment parameter (VALUE parsed as JSON when possible)",
    )
    parser.add_argument(
        "--output",
        "-o",
        type=str,
        default=None,
        help="Write records to this file (CSV unless --json)",
    )
    parser.add_argument(
        "--json",
        action="store_true",
        help="Write records as JSON instead of CSV",
    )
    parser.add_argument(
        "--timing",
        action="store_true",
        help="Include per-trial wall time (output is then not reproducible)",
    )
    parser.add_argument(
        "--no-progress",
        action="store_true",
        help="Do not show the progress bar",
    )


def build_parser() -> argparse.ArgumentParser:  # noqa: C901
    parser = ArgumentParser(
        prog="listdec",
        description="List decoding verification laboratory",
        formatter_class=CustomHelpFormatter,
        add_help=False,
    )

    parser.add_argument(
        "--help",
        "-H",
        action="help",
        default=argparse.SUPPRESS,
        help="Show this help message and exit.",
    )
    parser.add_argument(
        "--version",
        "-V",
        action="store_true",
        help="Display version information with styling",
    )
    parser.add_argument(
        "--log",
        "-L",
        type=str,
        default=None,
        help="Debug log file path (enables debug logging)",
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="count",
        default=0,
        help="Log to stderr (-v info, -vv debug)",
    )

    subparsers = parser.add_subparsers(
        dest="command",
        metavar="{bounds,oracle,rip,chain,scan,moment,covering}",
    )

    # bounds
    bounds_parser = subparsers.add_parser(
        "bounds",
        help="Closed-form list-decoding radii",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    bounds_parser.add_argument("--q", type=int, required=True, help="Alphabet size")
    bounds_parser.add_argument(
        "--johnson", type=float, default=None, metavar="X", help="Print J_q(X)"
    )
    bounds_parser.add_argument(
        "--avg-johnson",
        type=float,
        default=None,
        metavar="DELTA",
        help="Radius from minimum L-subset average distance DELTA",
    )
    bounds_parser.add_argument(
        "--simplified", type=float, default=None, metavar="EPS",
        help="Simplified radius for average distance (1-1/q)(1-EPS)",
    )
    bounds_parser.add_argument(
        "--deletion", type=float, default=None, metavar="ETA",
        help="Locally sparse radius J_q(ETA - ETA/L), list size A*L-1",
    )
    bounds_parser.add_argument("--A", type=int, default=1, help="Neighbor count for --deletion")
    bounds_parser.add_argument("--L", type=int, default=None, help="List parameter")
    bounds_parser.add_argument(
        "--rip-to-ld", action="store_true", help="Radius implied by RIP of order L"
    )
    bounds_parser.add_argument(
        "--rate", type=float, default=None, metavar="EPS", help="Rate expression at EPS"
    )
    bounds_parser.add_argument(
        "--gamma", type=float, default=0.5, help="Failure probability for --rate"
    )

    # oracle
    oracle_parser = subparsers.add_parser(
        "oracle",
        help="Brute-force list size of a code at a radius",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    oracle_parser.add_argument(
        "--generator", "-g", type=str, required=True,
        help="Generator file: `q ktilde n`, then ktilde rows of n labels",
    )
    oracle_parser.add_argument(
        "--radius", "-r", type=str, required=True, help="Relative radius (e.g. 3/8)"
    )
    oracle_parser.add_argument(
        "--ell", type=int, default=None, help="Also decide list decodability with list size ELL"
    )
    oracle_parser.add_argument(
        "--mode", choices=["exhaustive", "sampled"], default="exhaustive"
    )
    oracle_parser.add_argument("--budget", type=int, default=None, help="Sampled centers")
    oracle_parser.add_argument("--seed", type=int, default=0)

    # rip
    rip_parser = subparsers.add_parser(
        "rip",
        help="RIP constants and the row-count search",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    rip_sub = rip_parser.add_subparsers(dest="rip_command", metavar="{exact,sampled,scan}")
    for name, help_text in (
        ("exact", "Exact RIP constant over every k-support"),
        ("sampled", "Lower bound from greedy random supports"),
    ):
        p = rip_sub.add_parser(name, help=help_text, formatter_class=argparse.RawTextHelpFormatter)
        p.add_argument("--k", type=int, required=True, help="Sparsity order")
        p.add_argument(
            "--matrix", "-m", type=str, default=None,
            help="Matrix file (`rows cols`, then `re im` pairs); default phi(Lin_T)",
        )
        p.add_argument(
            "--normalizer", type=float, default=None,
            help="Column normalizer for --matrix (default 1)",
        )
        p.add_argument("--q", type=int, default=2)
        p.add_argument("--ktilde", type=int, default=3)
        p.add_argument(
            "--rows", type=int, default=None,
            help="Sample this many Lin rows (default: the full matrix)",
        )
        p.add_argument("--seed", type=int, default=0)
        if name == "sampled":
            p.add_argument("--trials", type=int, default=8, help="Random starts")
    scan_rip = rip_sub.add_parser(
        "scan",
        help="Least |T| for RIP over a (ktilde, k) grid",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    scan_rip.add_argument("--q", dest="param_q", type=int, default=None)
    scan_rip.add_argument("--ktilde-values", dest="param_ktilde_values", type=int, nargs="+")
    scan_rip.add_argument("--k-values", dest="param_k_values", type=int, nargs="+")
    scan_rip.add_argument("--delta", dest="param_delta_target", type=float, default=None)
    scan_rip.add_argument(
        "--confidence-trials", dest="param_confidence_trials", type=int, default=None
    )
    scan_rip.add_argument(
        "--rip-mode", dest="param_rip_mode", choices=["exact", "sampled"], default=None
    )
    scan_rip.add_argument("--rip-trials", dest="param_rip_trials", type=int, default=None)
    scan_rip.add_argument("--threshold", dest="param_threshold", type=float, default=None)
    _add_experiment_args(scan_rip)

    # chain
    chain_parser = subparsers.add_parser(
        "chain",
        help="Reduction chain: RIP, distance, Johnson radius and oracle",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    chain_parser.add_argument("--q", dest="param_q", type=int, default=None)
    chain_parser.add_argument("--ktilde", dest="param_ktilde", type=int, default=None)
    chain_parser.add_argument("--n", dest="param_n", type=int, default=None)
    chain_parser.add_argument("--L", dest="param_L", type=int, default=None)
    chain_parser.add_argument("--trials", dest="param_trials", type=int, default=None)
    _add_experiment_args(chain_parser)

    # scan
    scan_parser = subparsers.add_parser(
        "scan",
        help="Run any experiment from a config or flags",
        formatter_class=argparse.RawTextHelpFormatter,
        epilog=_columns_epilog(),
    )
    scan_parser.add_argument(
        "experiment",
        nargs="?",
        default=None,
        help="rip_scan, reduction_chain, johnson_audit, covering_curve or moment_audit",
    )
    _add_experiment_args(scan_parser)

    # moment
    moment_parser = subparsers.add_parser(
        "moment",
        help="Exact Rademacher chaos moments",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    moment_parser.add_argument("--m", type=int, default=None, help="Number of signs")
    moment_parser.add_argument("--s", type=int, default=None, help="Moment order")
    moment_parser.add_argument("--all-ones", action="store_true", help="a_ij = 1")
    moment_parser.add_argument("--grid", type=str, default=None, help="Whitespace grid file")
    moment_parser.add_argument(
        "--K", type=float, default=None, help="Entry bound (default: max |a_ij|)"
    )
    moment_parser.add_argument(
        "--audit", action="store_true", help="Run the randomized moment audit instead"
    )
    moment_parser.add_argument("--trials", dest="param_trials", type=int, default=None)
    _add_experiment_args(moment_parser)

    # covering
    covering_parser = subparsers.add_parser(
        "covering",
        help="Maurey approximation error curve",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    covering_parser.add_argument("--q", dest="param_q", type=int, default=None)
    covering_parser.add_argument("--ktilde", dest="param_ktilde", type=int, default=None)
    covering_parser.add_argument("--rows", dest="param_rows", type=int, default=None)
    covering_parser.add_argument("--k", dest="param_k", type=int, default=None)
    covering_parser.add_argument("--s", dest="param_s", type=int, default=None)
    covering_parser.add_argument("--m-values", dest="param_m_values", type=int, nargs="+")
    covering_parser.add_argument("--trials", dest="param_trials", type=int, default=None)
    _add_experiment_args(covering_parser)

    return parser


def _parse_param(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise InputError(f"--param expects KEY=VALUE, got {text!r}")
    try:
        return key, json.loads(raw)
    except json.JSONDecodeError:
        return key, raw


def experiment_config(args, experiment: str | None):
    """Merge defaults, the JSON config and command-line flags, in that order."""
    from .harness.core import ExperimentConfig, load_config

    params: dict = {}
    seed, output = None, None
    if args.config:
        loaded = load_config(args.config)
        if experiment is not None and loaded.experiment != experiment:
            raise InputError(
                f"config describes {loaded.experiment}, not {experiment}"
            )
        experiment = loaded.experiment
        params.update(loaded.params)
        seed, output = loaded.seed, loaded.output
    if experiment is None:
        raise InputError("name an experiment or pass --config")

    params.update(_parse_param(text) for text in args.param)
    params.update(
        (name[len("param_"):], value)
        for name, value in vars(args).items()
        if name.startswith("param_") and value is not None
    )
    if args.seed is not None:
        seed = args.seed
    if seed is None:
        raise InputError("a seed is mandatory (--seed or `seed` in the config)")

    return ExperimentConfig(
        experiment=experiment,
        seed=seed,
        params=params,
        output=args.output or output,
        json_output=args.json,
        include_timing=args.timing,
    )


def _configure_logging(log_file: str | None, verbose: int):
    package_logger = logging.getLogger("listdec")
    for handler in list(package_logger.handlers):
        if getattr(handler, "_listdec_cli", False):
            package_logger.removeHandler(handler)
            handler.close()

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
        file_handler._listdec_cli = True  # type: ignore[attr-defined]
        package_logger.addHandler(file_handler)

    if verbose:
        from rich.logging import RichHandler

        rich_handler = RichHandler(console=err_console, show_path=False)
        rich_handler.setLevel(logging.DEBUG if verbose > 1 else logging.INFO)
        rich_handler._listdec_cli = True  # type: ignore[attr-defined]
        package_logger.addHandler(rich_handler)

    if log_file or verbose > 1:
        package_logger.setLevel(logging.DEBUG)
    elif verbose:
        package_logger.setLevel(logging.INFO)


def _dispatch(args) -> int:
    from .harness import cli

    show_progress = not getattr(args, "no_progress", True)

    if args.command == "bounds":
        return cli.bounds_command(args)
    if args.command == "oracle":
        return cli.oracle_command(args)
    if args.command == "rip":
        if args.rip_command is None:
            raise InputError("choose one of: rip exact, rip sampled, rip scan")
        if args.rip_command == "scan":
            return cli.experiment_command(experiment_config(args, "rip_scan"), show_progress)
        return cli.rip_command(args)
    if args.command == "chain":
        return cli.experiment_command(experiment_config(args, "reduction_chain"), show_progress)
    if args.command == "scan":
        return cli.experiment_command(experiment_config(args, args.experiment), show_progress)
    if args.command == "moment":
        if args.audit:
            return cli.experiment_command(experiment_config(args, "moment_audit"), show_progress)
        if args.m is None or args.s is None:
            raise InputError("--m and --s are required (or pass --audit)")
        return cli.moment_command(args)
    if args.command == "covering":
        return cli.experiment_command(experiment_config(args, "covering_curve"), show_progress)
    raise InputError(f"unknown command {args.command!r}")


def run(argv=None):
    parser = build_parser()

    if argv is None:
        argv = sys.argv[1:]
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT

    if args.version:
        _show_styled_version()
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT

    _configure_logging(args.log, args.verbose)
    if args.log:
        err_console.print(f"🐛 Debug logging enabled: {args.log}")

    try:
        return _dispatch(args)
    except BudgetError as e:
        logger.debug("budget exceeded", exc_info=True)
        err_console.print(f"[red]✗ Budget exceeded: {e}[/]")
        return EXIT_BUDGET
    except ListDecError as e:
        logger.debug("command failed", exc_info=True)
        err_console.print(f"[red]✗ {e}[/]")
        return EXIT_INPUT
    except KeyboardInterrupt:
        err_console.print("\n👋 listdec terminated by user")
        return EXIT_INPUT


def _show_styled_version():
    """Display a clean and focused version information."""
    console = Console()

    title_text = Text()
    title_text.append("listdec", style="bold bright_yellow")
    title_text.append("\n")
    title_text.append("List decoding verification laboratory", style="bold bright_cyan")

    version_table = Table(show_header=False, box=None, padding=(0, 1))
    version_table.add_column("Label", style="dim", width=12)
    version_table.add_column("Value", style="bold")

    python_version = f"{version_info.major}.{version_info.minor}.{version_info.micro}"
    system_info = platform.system()
    if system_info == "Darwin":
        system_info = f"macOS {platform.mac_ver()[0]}"
    elif system_info == "Linux":
        try:
            import distro

            system_info = f"Linux ({distro.name()} {distro.version()})"
        except ImportError:
            system_info = f"Linux {platform.release()}"

    from ._helpers import worker_count

    version_table.add_row("Version:", f"[bright_green]{__version__}[/]")
    version_table.add_row("Python:", f"[bright_blue]{python_version}[/]")
    version_table.add_row("Platform:", f"[bright_magenta]{system_info}[/]")
    version_table.add_row("Architecture:", f"[bright_yellow]{platform.machine()}[/]")
    version_table.add_row("Workers:", f"[bright_cyan]{worker_count()}[/]")

    console.print(
        Panel(
            title_text,
            title="[bold bright_white]listdec[/]",
            title_align="center",
            border_style="bright_cyan",
            padding=(1, 2),
        )
    )
    console.print()
    console.print(
        Panel(
            version_table,
            title="[bold]📋 Version Information[/]",
            border_style="bright_green",
            padding=(1, 2),
        )
    )
    console.print()

    footer_text = Text()
    footer_text.append("MIT License © 2024-", style="dim")
    footer_text.append(f"{__current_year__}", style="dim")
    footer_text.append(" Kumar Anirudha\n", style="dim")
    footer_text.append("📖 ", style="bright_green")
    footer_text.append("listdec --help", style="bold bright_white")
    console.print(Panel(footer_text, border_style="dim", padding=(0, 2)))
