"""Flat key-value experiment configs (YAML mappings of scalars).

A config file carries the physical scenario plus privacy budget, method
defaults, and sweep defaults in one flat mapping; the CLI can override
the run-level fields.  Unknown keys are rejected so typos fail loudly.
"""

from dataclasses import dataclass, field, fields

import yaml

from .channel import Scenario
from .errors import ConfigError

SCENARIO_KEYS = {f.name for f in fields(Scenario)}


@dataclass
class RunConfig:
    """Method, budget, and sweep defaults for one experiment."""

    eps: float = 1.0
    delta: float = 0.1
    fw_iters: int = 20  # private FW rounds
    np_fw_iters: int = 200  # non-private FW rounds
    nuc_bound: float = 0.0  # 0 = derive from the large-scale gains
    clip_bound: float = 0.0  # 0 = derive from the large-scale gains
    units: str = "normalized"  # normalized | physical
    method: str = "fw"
    sweep: str = "epsilon"  # epsilon | tau_d
    values: tuple = ()
    trials: int = 50
    fixed_beta: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.fw_iters < 1 or self.np_fw_iters < 1:
            raise ConfigError("iteration counts must be >= 1")
        if self.nuc_bound < 0 or self.clip_bound < 0:
            raise ConfigError("bound overrides must be non-negative (0 = derived)")
        if self.units not in ("normalized", "physical"):
            raise ConfigError(f"unknown units {self.units!r}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}, pick from {sorted(METHODS)}")
        if self.sweep not in ("epsilon", "tau_d"):
            raise ConfigError(f"unknown sweep axis {self.sweep!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


METHODS = ("fw", "svd", "npfw", "npsvd", "po")

RUN_KEYS = {f.name for f in fields(RunConfig)}


@dataclass
class ExperimentConfig:
    scenario: Scenario
    run: RunConfig


def _coerce(raw):
    if isinstance(raw, list):
        return tuple(raw)
    return raw


def experiment_from_mapping(mapping):
    """Build an ExperimentConfig from one flat mapping."""
    if not isinstance(mapping, dict):
        raise ConfigError(f"config root must be a mapping, got {type(mapping).__name__}")
    unknown = set(mapping) - SCENARIO_KEYS - RUN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = {"M", "K", "N_a", "N_r", "tau_p", "tau_d"} - set(mapping)
    if missing:
        raise ConfigError(f"missing required scenario keys: {sorted(missing)}")
    scen_kwargs = {k: mapping[k] for k in mapping if k in SCENARIO_KEYS}
    run_kwargs = {k: _coerce(mapping[k]) for k in mapping if k in RUN_KEYS}
    return ExperimentConfig(scenario=Scenario(**scen_kwargs), run=RunConfig(**run_kwargs))


def load_experiment(path):
    """Load and validate a flat YAML config file."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config {path} is not valid YAML: {e}") from e
    if raw is None:
        raise ConfigError(f"config {path} is empty")
    return experiment_from_mapping(raw)
