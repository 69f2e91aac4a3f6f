"""
Experiment configuration.

An ``ExperimentConfig`` starts from one of the presets and records every field
that was changed afterwards, so the metadata of a run always says which
values deviate from the preset.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Final

from .._common import AMDR_EPSILON, AMDR_GAMMA, AMDR_R, ConfigError, validate_geometry
from ..schedules import GammaSchedule

logger = logging.getLogger(__name__)

ALGORITHM_ORDER: Final[tuple[str, ...]] = ("mirror_descent", "amd", "amdr")
ALGORITHM_ALIASES: Final[dict[str, str]] = {
    "md": "mirror_descent",
    "mirror_descent": "mirror_descent",
    "amd": "amd",
    "amdr": "amdr",
}
OBJECTIVES: Final[tuple[str, ...]] = ("power", "quadratic")

FULL_SCALE_D: Final[int] = 1000
FULL_SCALE_STEPS: Final[int] = 50_000


def parse_algorithms(text: str | tuple[str, ...] | list[str]) -> tuple[str, ...]:
    """
    Parse ``md,amd,amdr`` (any subset, any order) into the fixed algorithm order.

    Raises:
        ConfigError: For an unknown name or an empty list.
    """
    names = text.split(",") if isinstance(text, str) else list(text)
    chosen = set()
    for raw in names:
        name = raw.strip().lower()
        if not name:
            continue
        try:
            chosen.add(ALGORITHM_ALIASES[name])
        except KeyError:
            raise ConfigError(
                f"Unknown algorithm {raw!r}; expected a subset of md, amd, amdr"
            ) from None
    if not chosen:
        raise ConfigError("at least one algorithm must be selected")
    return tuple(a for a in ALGORITHM_ORDER if a in chosen)


def parse_step_policy(text: str) -> tuple[str, float | None]:
    """
    Split ``absolute``, ``relative`` or ``explicit:H`` into ``(kind, H)``.

    Raises:
        ConfigError: On any other spelling or a nonpositive ``H``.
    """
    kind, _, arg = text.strip().partition(":")
    kind = kind.lower()
    if kind in ("absolute", "relative") and not arg:
        return kind, None
    if kind == "explicit" and arg:
        try:
            h = float(arg)
        except ValueError:
            h = math.nan
        if math.isfinite(h) and h > 0.0:
            return kind, h
    raise ConfigError(
        f"Invalid step policy {text!r}; expected absolute, relative or explicit:H with H > 0"
    )


def parse_relative_point(text: str) -> tuple[str, int | None]:
    """
    Split ``optimum`` or ``iterate:K`` into ``(kind, K)``.

    ``iterate:K`` measures ``L_r`` at the ``K``-th iterate of an AMD run with
    the absolute step size instead of at the minimizer.

    Raises:
        ConfigError: On any other spelling or a negative ``K``.
    """
    kind, _, arg = text.strip().partition(":")
    kind = kind.lower()
    if kind == "optimum" and not arg:
        return kind, None
    if kind == "iterate" and arg.strip().isdigit():
        return kind, int(arg)
    raise ConfigError(
        f"Invalid relative point {text!r}; expected optimum or iterate:K with K >= 0"
    )


@dataclass
class ExperimentConfig:
    """Configuration for one preset run."""

    preset: str = "custom"
    geometry: str = "simplex"
    objective: str = "quadratic"
    d: int = 50
    p: int = 10  # power objective exponent
    seed: int = 0
    steps: int = 5000
    algorithms: tuple[str, ...] = ALGORITHM_ORDER
    step_policy: str = "absolute"
    relative_point: str = "optimum"  # where L_r is measured
    gamma_schedule: str = "recurrence"  # AMD only
    r: float = AMDR_R
    amdr_gamma: float = AMDR_GAMMA
    eps: float = AMDR_EPSILON
    x0: tuple[float, ...] | None = None
    workers: int = 1
    overrides: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.preset not in PRESETS:
            raise ConfigError(
                f"Unknown preset {self.preset!r}; expected one of {', '.join(PRESETS)}"
            )
        validate_geometry(self.geometry)
        if self.objective not in OBJECTIVES:
            raise ConfigError(
                f"Unknown objective {self.objective!r}; expected one of {', '.join(OBJECTIVES)}"
            )
        for name in ("d", "seed", "steps", "workers", "p"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
        if self.d < 1:
            raise ConfigError(f"d must be positive, got {self.d}")
        if self.steps < 0:
            raise ConfigError(f"steps must be nonnegative, got {self.steps}")
        if self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.objective == "power" and (self.p < 2 or self.p % 2):
            raise ConfigError(f"p must be an even integer >= 2, got {self.p}")
        self.algorithms = parse_algorithms(self.algorithms)
        parse_step_policy(self.step_policy)
        parse_relative_point(self.relative_point)
        GammaSchedule.parse(self.gamma_schedule)
        for name in ("r", "amdr_gamma", "eps"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise ConfigError(f"{name} must be positive, got {value!r}")
            setattr(self, name, value)
        if self.x0 is not None:
            self.x0 = tuple(float(v) for v in self.x0)
            if len(self.x0) != self.d:
                raise ConfigError(f"x0 has length {len(self.x0)} but d={self.d}")

    @property
    def step_policy_kind(self) -> str:
        return parse_step_policy(self.step_policy)[0]

    @property
    def explicit_h(self) -> float | None:
        return parse_step_policy(self.step_policy)[1]

    @property
    def relative_iterate(self) -> int | None:
        """``K`` of ``iterate:K``, or None when ``L_r`` is measured at the minimizer."""
        return parse_relative_point(self.relative_point)[1]

    @property
    def schedule(self) -> GammaSchedule:
        return GammaSchedule.parse(self.gamma_schedule)

    def as_dict(self) -> dict[str, Any]:
        """Plain dict of every field except ``overrides`` (JSON-ready)."""
        data = asdict(self)
        data.pop("overrides")
        data["algorithms"] = list(self.algorithms)
        data["x0"] = None if self.x0 is None else list(self.x0)
        return data


# ---------------------------
# Presets
# ---------------------------


def _toy_power(full_scale: bool = False) -> ExperimentConfig:
    return ExperimentConfig(
        preset="toy_power",
        objective="power",
        d=2,
        p=10,
        steps=10_000,
        step_policy="explicit:1",
        x0=(0.999, 0.001),
    )


def _quadratic(full_scale: bool = False) -> ExperimentConfig:
    return ExperimentConfig(
        preset="quadratic",
        objective="quadratic",
        d=FULL_SCALE_D if full_scale else 50,
        steps=FULL_SCALE_STEPS if full_scale else 5000,
        step_policy="absolute",
    )


def _quadratic_relative(full_scale: bool = False) -> ExperimentConfig:
    cfg = _quadratic(full_scale)
    cfg.preset = "quadratic_relative"
    cfg.step_policy = "relative"
    return cfg


def _custom(full_scale: bool = False) -> ExperimentConfig:
    return ExperimentConfig(preset="custom")


PRESETS: Final[dict[str, Callable[[bool], ExperimentConfig]]] = {
    "toy_power": _toy_power,
    "quadratic": _quadratic,
    "quadratic_relative": _quadratic_relative,
    "custom": _custom,
}

_FIELD_NAMES: Final[frozenset[str]] = frozenset(
    f.name for f in fields(ExperimentConfig) if f.name not in ("preset", "overrides")
)


def _normalize_key(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_").lower()


def _coerce(name: str, value: Any) -> Any:
    """Turn a string from a config file or CLI flag into the field's type."""
    if not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if name in ("d", "p", "seed", "steps", "workers"):
            return int(text)
        if name in ("r", "amdr_gamma", "eps"):
            return float(text)
        if name == "algorithms":
            return parse_algorithms(text)
        if name == "x0":
            return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"Invalid value {value!r} for {name}") from None
    return text


def make_config(
    preset: str = "custom",
    overrides: Mapping[str, Any] | None = None,
    *,
    full_scale: bool = False,
) -> ExperimentConfig:
    """
    Build a config from a preset plus overrides.

    Keys may use dashes or underscores. Every override whose value differs
    from the preset default is recorded in ``config.overrides``; ``full_scale``
    itself is recorded too when it changes anything.

    Raises:
        ConfigError: For an unknown preset or key, or an invalid value.
    """
    try:
        factory = PRESETS[preset]
    except KeyError:
        raise ConfigError(
            f"Unknown preset {preset!r}; expected one of {', '.join(PRESETS)}"
        ) from None
    base = factory(False)
    cfg = factory(full_scale)
    changes: dict[str, Any] = {}
    for raw_key, raw_value in (overrides or {}).items():
        if raw_value is None:
            continue
        key = _normalize_key(raw_key)
        if key not in _FIELD_NAMES:
            raise ConfigError(f"Unknown configuration key {raw_key!r}")
        changes[key] = _coerce(key, raw_value)
    if "d" in changes and "x0" not in changes and changes["d"] != cfg.d:
        # A preset starting point only fits the preset dimension.
        changes["x0"] = None
    cfg = replace(cfg, **changes)

    recorded: dict[str, Any] = {}
    for name in sorted(_FIELD_NAMES):
        now, default = getattr(cfg, name), getattr(base, name)
        if now != default:
            recorded[name] = {"preset": _jsonable(default), "value": _jsonable(now)}
    cfg.overrides = recorded
    if recorded:
        logger.debug("preset %s overrides: %s", preset, sorted(recorded))
    return cfg


def _jsonable(value: Any) -> Any:
    return list(value) if isinstance(value, tuple) else value


def load_config_file(path: str | Path) -> dict[str, str]:
    """
    Read a flat ``key = value`` file.

    Blank lines and ``#`` comments are skipped; keys are the long CLI flag
    names with dashes or underscores. ``preset`` and ``full_scale`` are
    returned like any other key.

    Raises:
        ConfigError: If the file cannot be read or a line has no ``=``.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        values[_normalize_key(key)] = value.strip()
    return values
