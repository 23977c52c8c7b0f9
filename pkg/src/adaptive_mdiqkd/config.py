"""Run configuration: JSON ingestion with hardware defaults.

Every field is optional; anything absent falls back to the reference device
set baked into :class:`~adaptive_mdiqkd.devices.DeviceParams` and
:class:`~adaptive_mdiqkd.devices.ChannelParams`. Unknown keys are rejected
with the offending path so typos never silently revert to defaults.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .devices import ChannelParams, DeviceParams
from .errors import ConfigError, ParameterError

__all__ = ["MonteCarloSettings", "OutputSettings", "RunConfig", "SweepRange", "load_config"]


@dataclass(frozen=True)
class SweepRange:
    L_min: float = 0.0
    L_max: float = 800.0
    step: float = 10.0

    def __post_init__(self) -> None:
        if self.L_min > self.L_max:
            raise ParameterError("sweep L_min must not exceed L_max")
        if not self.step > 0.0:
            raise ParameterError("sweep step must be > 0")

    def distances(self) -> list[float]:
        out = []
        i = 0
        while True:
            L = self.L_min + i * self.step
            if L > self.L_max + 1e-9 * self.step:
                return out
            out.append(L)
            i += 1


@dataclass(frozen=True)
class MonteCarloSettings:
    trials: int = 100_000
    seed: int = 42
    m_override: int | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ParameterError("mc trials must be >= 1")
        if self.seed < 0:
            raise ParameterError("mc seed must be >= 0")
        if self.m_override is not None and self.m_override < 1:
            raise ParameterError("mc m_override must be >= 1")
        if self.workers < 1:
            raise ParameterError("mc workers must be >= 1")


@dataclass(frozen=True)
class OutputSettings:
    path: str | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.format != "csv":
            raise ParameterError(f"unsupported output format {self.format!r}")


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams = DeviceParams()
    channel: ChannelParams = ChannelParams()
    sweep: SweepRange = SweepRange()
    mc: MonteCarloSettings = MonteCarloSettings()
    output: OutputSettings = OutputSettings()

    def resolved_parameters(self) -> dict[str, Any]:
        """Full parameter set (defaults merged with overrides) for provenance."""
        return {
            "device": dataclasses.asdict(self.device),
            "channel": dataclasses.asdict(self.channel),
            "sweep": dataclasses.asdict(self.sweep),
            "mc": dataclasses.asdict(self.mc),
        }


_INT_FIELDS = {"n_ff_qnd", "n_ff_pair", "trials", "seed", "m_override", "workers"}


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object, got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown field(s) {', '.join(unknown)}")
    kwargs = {}
    for name, raw in data.items():
        field_path = f"{path}.{name}"
        if raw is None and name == "m_override":
            kwargs[name] = None
        elif name in _INT_FIELDS:
            if not isinstance(raw, int) or isinstance(raw, bool):
                raise ConfigError(f"{field_path}: expected an integer, got {raw!r}")
            kwargs[name] = raw
        elif name == "path":
            if not isinstance(raw, str):
                raise ConfigError(f"{field_path}: expected a string, got {raw!r}")
            kwargs[name] = raw
        elif name == "format":
            if not isinstance(raw, str):
                raise ConfigError(f"{field_path}: expected a string, got {raw!r}")
            kwargs[name] = raw
        else:
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise ConfigError(f"{field_path}: expected a number, got {raw!r}")
            kwargs[name] = float(raw)
    try:
        return cls(**kwargs)
    except ParameterError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


_SECTIONS = {
    "device": DeviceParams,
    "channel": ChannelParams,
    "sweep": SweepRange,
    "mc": MonteCarloSettings,
    "output": OutputSettings,
}


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"config root: expected an object, got {type(data).__name__}")
    unknown = sorted(set(data) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"config root: unknown section(s) {', '.join(unknown)}")
    kwargs = {name: _build(cls, data[name], name) for name, cls in _SECTIONS.items() if name in data}
    return RunConfig(**kwargs)


def load_config(path: str | Path | None) -> RunConfig:
    """Load a JSON run configuration, or the all-defaults configuration for None."""
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return config_from_dict(data)
