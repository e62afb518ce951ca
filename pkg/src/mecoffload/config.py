"""Experiment configuration files.

A config is a TOML document with up to four tables, every key optional::

    [system]        W, N0, gamma_BS, gamma_user, epsilon, g0, tau, cpu_cap
    [distribution]  K, mean_L, mean_B, mean_C, g_max, c0, c1
    [sweep]         param, values, trials, seed, format
    [analyze]       Ks, received_power

Dotted keys (``system.tau = 20``) are equivalent.  Unknown tables or keys are
rejected.  Bundled configs can be referenced by name (``fig_bbar``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .analysis import MeanTimeParams
from .channel import FadingParams, RadioParams
from .simharness import SWEEPABLE, SweepSpec
from .taskmodel import OutputSizeMap, ScenarioDistribution, SystemConfig

DEFAULTS = {
    "system": {
        "W": 1.0,
        "N0": 1.0,
        "gamma_BS": 3.0,
        "gamma_user": 6.0,
        "epsilon": 0.05,
        "g0": 1.0,
        "tau": 35.63,
        "cpu_cap": None,
    },
    "distribution": {
        "K": 10,
        "mean_L": 2.0,
        "mean_B": 4.0,
        "mean_C": 1.0,
        "g_max": 10.0,
        "c0": 0.0,
        "c1": 0.1,
    },
    "sweep": {
        "param": "mean_B",
        "values": [1.0, 2.0, 4.0, 8.0],
        "trials": 2000,
        "seed": 0,
        "format": "csv",
    },
    "analyze": {
        "Ks": [1, 2, 5, 10, 20, 50, 100],
        "received_power": None,
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class CliConfig:
    values: dict = field(default_factory=lambda: {s: dict(v) for s, v in DEFAULTS.items()})
    source: str = "<defaults>"

    def __getitem__(self, dotted: str):
        section, key = dotted.split(".")
        return self.values[section][key]

    def system(self) -> SystemConfig:
        s = self.values["system"]
        radio = RadioParams.from_snr(s["gamma_BS"], s["gamma_user"], W=s["W"], N0=s["N0"])
        return SystemConfig(radio=radio, fading=FadingParams(s["epsilon"]), g0=s["g0"], tau=s["tau"],
                            cpu_cap=s["cpu_cap"])

    def distribution(self) -> ScenarioDistribution:
        d = self.values["distribution"]
        return ScenarioDistribution(
            K=int(d["K"]), mean_L=d["mean_L"], mean_B=d["mean_B"], mean_C=d["mean_C"], g_max=d["g_max"],
            output_map=OutputSizeMap(d["c0"], d["c1"]), fading=FadingParams(self.values["system"]["epsilon"]),
        )

    def sweep(self, seed: int | None = None) -> SweepSpec:
        w = self.values["sweep"]
        return SweepSpec(
            param=w["param"], values=tuple(w["values"]), trials=int(w["trials"]),
            seed=int(w["seed"] if seed is None else seed),
            distribution=self.distribution(), config=self.system(),
        )

    def mean_time_params(self) -> MeanTimeParams:
        dist = self.distribution()
        return MeanTimeParams(K=dist.K, mean_L=dist.mean_L, mean_B=dist.mean_B, output_map=dist.output_map,
                              radio=self.system().radio)


def bundled_configs() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("mecoffload.configs").iterdir() if p.name.endswith(".toml"))


def _resolve(name_or_path) -> tuple[str, str]:
    path = Path(name_or_path)
    if path.exists():
        return path.read_text(encoding="utf-8"), str(path)
    if str(name_or_path) in bundled_configs():
        res = resources.files("mecoffload.configs") / f"{name_or_path}.toml"
        return res.read_text(encoding="utf-8"), f"<bundled {name_or_path}>"
    raise ConfigError(f"config {name_or_path!r} is neither a file nor a bundled config ({', '.join(bundled_configs())})")


def _check_type(where: str, default, value):
    if isinstance(default, list):
        if not isinstance(value, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
            raise ConfigError(f"{where}: expected a list of numbers, got {value!r}")
    elif isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
    elif isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    elif not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite")


def parse_config(text: str, source: str = "<string>") -> CliConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    cfg = CliConfig(source=source)
    for section, table in doc.items():
        if section not in DEFAULTS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        if not isinstance(table, dict):
            raise ConfigError(f"{source}: '{section}' must be a table")
        for key, value in table.items():
            where = f"{source}: {section}.{key}"
            if key not in DEFAULTS[section]:
                raise ConfigError(f"{where}: unknown key")
            default = DEFAULTS[section][key]
            if default is not None:
                _check_type(where, default, value)
            else:
                _check_type(where, 0.0, value)
            cfg.values[section][key] = value
    if cfg["sweep.param"] not in SWEEPABLE:
        raise ConfigError(f"{source}: sweep.param must be one of {', '.join(SWEEPABLE)}")
    try:
        cfg.system()
        cfg.distribution()
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return cfg


def load_config(name_or_path) -> CliConfig:
    text, source = _resolve(name_or_path)
    return parse_config(text, source)
