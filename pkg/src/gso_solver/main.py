"""Main command-line entry point."""

import argparse
import os
import sys
from typing import Optional

from dotenv import load_dotenv
from loguru import logger

from . import __version__
from .cli import EXIT_ERROR
from .cli.bench_cli import handle_bench, handle_sweep
from .cli.settings import PRESETS, build_config, parse_values
from .cli.solve_cli import handle_oracle, handle_solve
from .exceptions import GsoError
from .models.config import SweepSpec


def _cycle(text: str) -> int | str:
    # kept as a word; settings maps it to None
    return "none" if text.lower() in ("none", "off", "inf") else int(text)


def parse_values_single(text: str) -> float:
    values = parse_values(text)
    if len(values) != 1 or isinstance(values[0], str):
        raise argparse.ArgumentTypeError(f"expected one number, got '{text}'")
    return float(values[0])


def _add_experiment_options(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every subcommand; all default to None so precedence can be resolved later."""
    source = parser.add_argument_group("problem")
    source.add_argument("--graph", help="Edge-list file")
    source.add_argument("--builtin", help="Bundled graph name (karate)")
    source.add_argument("--sk", type=int, help="SK model with this many spins")
    source.add_argument("--function", choices=["griewank", "rastrigin", "sphere"], help="Continuous test function")
    source.add_argument("--dim", type=int, help="Test function dimension")
    source.add_argument("--allow-large-sk", action="store_true", default=None, help="Permit SK sizes above 4096")

    objective = parser.add_argument_group("objective")
    objective.add_argument("--objective", choices=["modularity", "sk", "mis", "mvc"])
    objective.add_argument("--ncoms", type=int, help="Number of communities K (modularity)")
    objective.add_argument("--alpha", type=float, help="Penalty weight (mis/mvc)")

    gso = parser.add_argument_group("gso")
    gso.add_argument("--solver", choices=["gso", "evogso", "sa", "ga", "greedy", "md-greedy"])
    gso.add_argument("--batch", type=int, help="Replicas N_bs")
    gso.add_argument("--lr", type=float, help="Learning rate")
    gso.add_argument("--tau-init", type=float)
    gso.add_argument("--tau-final", type=float)
    gso.add_argument("--schedule", choices=["exponential", "linear", "constant"])
    gso.add_argument("--steps", type=int)
    gso.add_argument("--optimizer", choices=["sgd", "adam"])
    gso.add_argument("--early-stop", type=_cycle, help="Stop after this many steps without improvement")

    evo = parser.add_argument_group("evolution")
    evo.add_argument("--t1", type=_cycle, help="Substitution cycle ('none' disables)")
    evo.add_argument("--t2", type=_cycle, help="GA cycle after convergence ('none' disables)")
    evo.add_argument("--u-inverse", type=parse_values_single, help="Substitution ratio, e.g. 0.125 or 1/8")
    evo.add_argument("--mutation", type=float)
    evo.add_argument("--elite", type=float)
    evo.add_argument("--crossover", type=float)
    evo.add_argument("--substitution", choices=["best_copy", "best_noise", "reinit"])
    evo.add_argument("--variance-threshold", type=float)
    evo.add_argument("--convergence-window", type=int)

    baseline = parser.add_argument_group("baselines")
    baseline.add_argument("--sa-t-init", type=float)
    baseline.add_argument("--sa-t-final", type=float)
    baseline.add_argument("--sweeps", type=int, help="SA sweeps")
    baseline.add_argument("--population", type=int, help="GA population")
    baseline.add_argument("--generations", type=int)
    baseline.add_argument("--ga-mutation", type=float)
    baseline.add_argument("--ga-crossover", type=float)
    baseline.add_argument("--ga-elite", type=float)
    baseline.add_argument("--greedy-order", choices=["by_id", "random"])

    run = parser.add_argument_group("run")
    run.add_argument("--instances", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--out", help="Output directory")
    run.add_argument("--preset", choices=sorted(PRESETS), help="Named parameter set")
    run.add_argument("--config", help="key=value config file")


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser with its subcommands."""
    parser = argparse.ArgumentParser(
        prog="gso-solver",
        description="Gumbel-softmax optimization for combinatorial problems on graphs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("solve", "Solve one instance"),
        ("bench", "Run all instances and aggregate"),
        ("oracle", "Brute-force a small instance and compare"),
    ]:
        _add_experiment_options(commands.add_parser(name, help=help_text))

    sweep = commands.add_parser("sweep", help="Vary one parameter over a list of values")
    _add_experiment_options(sweep)
    sweep.add_argument("--param", required=True, help="Parameter name, e.g. ncoms or evo.u_inverse")
    sweep.add_argument("--values", required=True, help="Comma list or integer range a..b")
    return parser


def configure_logging(level: Optional[str]) -> None:
    logger.remove()
    logger.add(sys.stderr, level=(level or os.getenv("GSO_LOG_LEVEL", "INFO")).upper(),
               format="{time:HH:mm:ss} | {level: <7} | {name}:{function} - {message}")


HANDLERS = {
    "solve": handle_solve,
    "bench": handle_bench,
    "oracle": handle_oracle,
    "sweep": handle_sweep,
}


def main(argv: Optional[list[str]] = None) -> int:
    """Parse arguments, build the experiment config and dispatch to the command handler."""
    load_dotenv()
    args = create_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        sweep = None
        if args.command == "sweep":
            sweep = SweepSpec(parameter=args.param, values=parse_values(args.values))
        cfg = build_config(args, sweep)
        return HANDLERS[args.command](cfg)
    except (GsoError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
