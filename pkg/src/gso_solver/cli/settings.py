"""Turn CLI flags, a key=value config file and the environment into an ExperimentConfig.

Precedence: explicit flag > config file > preset > environment > built-in default.
"""

import argparse
import os
from fractions import Fraction
from typing import Any, Optional

from dotenv import dotenv_values, load_dotenv
from pydantic import ValidationError

from ..exceptions import ConfigError
from ..models.config import DEFAULT_STEPS, ExperimentConfig, ObjectiveKind, SweepSpec

# flat option name -> dotted ExperimentConfig path
OPTION_PATHS = {
    "graph": "graph_path",
    "builtin": "builtin_graph",
    "sk": "sk_n",
    "function": "function",
    "dim": "function_dim",
    "objective": "objective.kind",
    "ncoms": "objective.n_states",
    "alpha": "objective.alpha",
    "solver": "solver",
    "batch": "gso.n_replicas",
    "lr": "gso.learning_rate",
    "steps": "gso.max_steps",
    "tau_init": "gso.tau_init",
    "tau_final": "gso.tau_final",
    "schedule": "gso.schedule_mode",
    "optimizer": "gso.optimizer",
    "early_stop": "gso.early_stop_window",
    "t1": "evo.t1",
    "t2": "evo.t2",
    "u_inverse": "evo.u_inverse",
    "mutation": "evo.mutation_rate",
    "elite": "evo.elite_ratio",
    "crossover": "evo.crossover_rate",
    "substitution": "evo.substitution_mode",
    "variance_threshold": "evo.variance_threshold",
    "convergence_window": "evo.convergence_window",
    "sa_t_init": "sa.t_init",
    "sa_t_final": "sa.t_final",
    "sweeps": "sa.sweeps",
    "population": "ga.population",
    "generations": "ga.generations",
    "ga_mutation": "ga.mutation_rate",
    "ga_crossover": "ga.crossover_rate",
    "ga_elite": "ga.elite_ratio",
    "greedy_order": "greedy_order",
    "instances": "instances",
    "seed": "seed",
    "workers": "workers",
    "out": "out_dir",
    "allow_large_sk": "allow_large_sk",
}

OPTIONAL_CYCLES = {"t1", "t2", "early_stop"}
DISABLED_WORDS = {"none", "off", "inf", "infinity", ""}

_EVO_DEFAULTS = {"t1": 100, "u_inverse": 0.125, "mutation": 0.001, "elite": 0.0625}

PRESETS: dict[str, dict[str, Any]] = {
    "modularity-gso": {"solver": "gso", "batch": 256, "tau_init": 0.5, "tau_final": 0.1, "lr": 0.01, "instances": 10},
    "modularity-evogso": {"solver": "evogso", "batch": 256, "tau_init": 0.5, "tau_final": 0.1, "lr": 0.01,
                      "instances": 10, "t2": 5000, **_EVO_DEFAULTS},
    "sk-single": {"solver": "gso", "batch": 1, "tau_init": 20.0, "tau_final": 1.0, "lr": 1.0},
    "sk-ga": {"solver": "ga", "population": 64, "ga_crossover": 0.8, "ga_mutation": 0.001, "ga_elite": 0.125},
    "sk-gso": {"solver": "gso", "batch": 128, "tau_init": 20.0, "tau_final": 1.0, "lr": 1.0},
    "sk-evogso": {"solver": "evogso", "batch": 128, "tau_init": 20.0, "tau_final": 1.0, "lr": 1.0,
                      "t1": 100, "u_inverse": 0.125, "t2": None},
    "cover-gso": {"solver": "gso", "batch": 128, "tau_init": 1.0, "tau_final": 1.0, "schedule": "constant",
                   "lr": 0.01, "alpha": 3.0, "instances": 20},
    "cover-evogso": {"solver": "evogso", "batch": 512, "tau_init": 1.0, "tau_final": 1.0, "schedule": "constant",
                      "lr": 0.01, "alpha": 3.0, "instances": 20, "t2": 10000, **_EVO_DEFAULTS},
    "functions": {"lr": 0.01, "t1": 1000, "batch": 64, "u_inverse": 0.25, "steps": 20000, "instances": 100},
    "sk-sweep": {"solver": "evogso", "batch": 128, "tau_init": 20.0, "tau_final": 1.0, "lr": 1.0,
             "t1": 100, "u_inverse": 0.125, "t2": None},
}


def parse_value(text: str) -> int | float | str:
    """int, float, fraction ('1/8') or plain string."""
    text = text.strip()
    for convert in (int, float):
        try:
            return convert(text)
        except ValueError:
            pass
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        return text


def parse_values(text: str) -> list[int | float | str]:
    """Comma-separated values, or an inclusive integer range 'a..b'."""
    if ".." in text and "," not in text:
        low, high = text.split("..", 1)
        return list(range(int(low), int(high) + 1))
    return [parse_value(part) for part in text.split(",") if part.strip()]


def _normalize(key: str, value: Any) -> Any:
    if key in OPTIONAL_CYCLES and isinstance(value, str) and value.strip().lower() in DISABLED_WORDS:
        return None
    if key == "u_inverse" and isinstance(value, str):
        return parse_value(value)
    return value


def read_config_file(path: str) -> dict[str, Any]:
    """key=value pairs from a dotenv-style file, keyed by option name."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for key, value in dotenv_values(path).items():
        name = key.strip().lower().replace("-", "_")
        if name not in OPTION_PATHS:
            raise ConfigError(f"unknown key '{key}' in {path}")
        values[name] = value
    return values


def environment_defaults() -> dict[str, Any]:
    load_dotenv()
    values: dict[str, Any] = {}
    if os.getenv("GSO_WORKERS"):
        values["workers"] = os.getenv("GSO_WORKERS")
    if os.getenv("GSO_OUT_DIR"):
        values["out"] = os.getenv("GSO_OUT_DIR")
    return values


def _set(data: dict, path: str, value: Any) -> None:
    *parents, leaf = path.split(".")
    for part in parents:
        data = data.setdefault(part, {})
    data[leaf] = value


def merge_options(args: argparse.Namespace) -> dict[str, Any]:
    """Flat option values with precedence applied."""
    options: dict[str, Any] = {}
    options.update(environment_defaults())
    if getattr(args, "function", None):
        options.update(PRESETS["functions"])
    preset = getattr(args, "preset", None)
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}', choose from {sorted(PRESETS)}")
        options.update(PRESETS[preset])
    if getattr(args, "config", None):
        options.update(read_config_file(args.config))
    for name in OPTION_PATHS:
        value = getattr(args, name, None)
        if value is not None:
            options[name] = value
    return {key: _normalize(key, value) for key, value in options.items()}


def build_config(args: argparse.Namespace, sweep: Optional[SweepSpec] = None) -> ExperimentConfig:
    """Validated ExperimentConfig for a parsed command line."""
    options = merge_options(args)
    data: dict[str, Any] = {}
    if options.get("graph") is not None or options.get("builtin") is not None:
        data["problem"] = "graph"
    elif options.get("sk") is not None:
        data["problem"] = "sk"
        options.setdefault("objective", ObjectiveKind.SK.value)
    elif options.get("function") is not None:
        data["problem"] = "testfunction"
    else:
        raise ConfigError("no problem source: give --graph, --builtin, --sk or --function")

    if "steps" not in options and options.get("objective") is not None:
        try:
            options["steps"] = DEFAULT_STEPS[ObjectiveKind(options["objective"])]
        except ValueError:
            raise ConfigError(f"unknown objective '{options['objective']}'")
    for name, value in options.items():
        _set(data, OPTION_PATHS[name], value)
    if sweep is not None:
        data["sweep"] = sweep
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(str(e))
