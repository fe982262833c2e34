"""Builds and validates the RunConfig of one CLI invocation."""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Tuple

from . import sampler_service, settings, variation_service
from .sampler_service import SamplePath
from utils.dyadic import DyadicTime
from utils.errors import DomainException

COMMANDS = ("sample", "variation", "tail", "area-surface", "diagonal", "constants")

FORMATS: Dict[str, Tuple[str, ...]] = {
    "sample": ("csv", "json"),
    "variation": ("json",),
    "tail": ("json", "csv"),
    "area-surface": ("csv", "json"),
    "diagonal": ("json",),
    "constants": ("json",),
}

# Per-command values used when a flag is not given
COMMAND_DEFAULTS: Dict[str, Dict[str, object]] = {
    "sample": {"level": 10},
    "variation": {"level": 12, "p": 4.0, "alpha": 0.8, "h1": DyadicTime(1, 2), "h2": DyadicTime(1, 1)},
    "tail": {"level": 12, "p": 4.0, "alpha": 0.8, "h1": DyadicTime(1, 2), "h2": DyadicTime(1, 1), "trials": 2000},
    "area-surface": {"m": 5, "n": 12},
    "diagonal": {"s": DyadicTime(3, 2), "offsets": tuple(range(4, 11)), "n": 14, "trials": 200},
    "constants": {"p": 4.0, "alpha": 0.8},
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int = 0
    level: Optional[int] = None
    trials: Optional[int] = None
    p: Optional[float] = None
    pprime: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    h1: Optional[DyadicTime] = None
    h2: Optional[DyadicTime] = None
    s: Optional[DyadicTime] = None
    t: Optional[DyadicTime] = None
    n: Optional[int] = None
    m: Optional[int] = None
    r_grid: Optional[Tuple[float, ...]] = None
    offsets: Optional[Tuple[int, ...]] = None
    frame_h: Optional[DyadicTime] = None
    tol: Optional[float] = None
    out: Optional[str] = None
    fmt: Optional[str] = None
    threads: int = 1
    deterministic: Optional[str] = None

    @property
    def ramp(self) -> bool:
        return self.deterministic == "ramp"


def build_config(command: str, options: Dict[str, object]) -> RunConfig:
    """Merges flags, per-command defaults and environment overrides, then validates."""
    if command not in COMMANDS:
        raise DomainException("command", command, f"one of {COMMANDS}")

    values = {key: value for key, value in options.items() if value is not None}
    for key, default in COMMAND_DEFAULTS[command].items():
        values.setdefault(key, default)
    values.setdefault("threads", settings.default_threads())
    values.setdefault("fmt", FORMATS[command][0])

    override = settings.seed_override()
    if override is not None:
        logging.info(f"FRAMEPATH_SEED overrides --seed with {override}")
        values["seed"] = override

    config = RunConfig(command=command, **values)
    if command in ("area-surface", "diagonal") and config.level is None:
        config = replace(config, level=config.n)
    if command == "constants":
        config = replace(
            config,
            pprime=config.p if config.pprime is None else config.pprime,
            beta=config.alpha if config.beta is None else config.beta,
        )
    validate_config(config)
    return config


def validate_config(config: RunConfig) -> None:
    """Raises a PreconditionException naming the first violated constraint."""
    if config.fmt not in FORMATS[config.command]:
        raise DomainException("format", config.fmt, f"one of {FORMATS[config.command]}")
    if config.threads < 1:
        raise DomainException("threads", config.threads, "threads >= 1")
    if not 0 <= config.seed <= settings.MAX_SEED:
        raise DomainException("seed", config.seed, "0 <= seed < 2^64")
    if config.level is not None and config.level < 0:
        raise DomainException("level", config.level, "level >= 0")

    if config.command in ("variation", "tail"):
        beta = config.alpha if config.beta is None else config.beta
        pprime = config.p if config.pprime is None else config.pprime
        variation_service.check_admissible(config.alpha, beta, config.p, pprime)
        config.h1.index_at(config.level)
        config.h2.index_at(config.level)
        if config.h2 < config.h1:
            raise DomainException("(h1, h2)", (str(config.h1), str(config.h2)), "h1 <= h2")

    if config.command == "constants":
        variation_service.check_admissible(config.alpha, config.beta, config.p, config.pprime)

    if config.command == "area-surface":
        if not 0 <= config.m <= config.n <= config.level:
            raise DomainException("(m, n, level)", (config.m, config.n, config.level), "0 <= m <= n <= level")

    if config.command == "diagonal":
        if config.n > config.level:
            raise DomainException("n", config.n, f"n <= level {config.level}")
        if config.trials < 2:
            raise DomainException("trials", config.trials, "trials >= 2")


def path_factory(config: RunConfig) -> Callable[[int, int], SamplePath]:
    """sampler_service.sample, or the ramp control under `--deterministic ramp`."""
    if config.ramp:
        return lambda level, seed: sampler_service.ramp_path(level)
    return sampler_service.sample
