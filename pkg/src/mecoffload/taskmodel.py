"""Per-user task data, system configuration and scenario sampling."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import FadingParams, RadioParams, sample_fading


@dataclass(frozen=True)
class UserTask:
    """One user's task: local data ``L``, server data ``B``, cycles ``C``, output ``Y``."""

    L: float
    B: float
    C: float
    Y: float
    g: float
    beta: float

    @property
    def I(self) -> float:
        return self.L + self.B

    def check(self, epsilon: float) -> None:
        for name in ("L", "B", "C", "Y", "g"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(f"user field {name} must be finite and >= 0, got {value!r}")
        if not self.beta >= epsilon:
            raise ValueError(f"user beta={self.beta!r} below epsilon={epsilon!r} (deep-fading users are excluded)")


@dataclass(frozen=True)
class OutputSizeMap:
    """Linear output-size model ``Y = c0 + c1 * (L + B)``."""

    c0: float = 0.0
    c1: float = 0.1

    def __post_init__(self):
        if self.c0 < 0 or self.c1 < 0:
            raise ValueError("output map coefficients must be nonnegative")


def output_size(input_size: float, output_map: OutputSizeMap):
    return output_map.c0 + output_map.c1 * input_size


@dataclass(frozen=True)
class SystemConfig:
    radio: RadioParams = field(default_factory=RadioParams)
    fading: FadingParams = field(default_factory=FadingParams)
    g0: float = 1.0
    tau: float = 35.63
    cpu_cap: float | None = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        if not self.g0 >= 0:
            raise ValueError(f"g0 must be nonnegative, got {self.g0!r}")
        if self.cpu_cap is not None and not self.cpu_cap > 0:
            raise ValueError(f"cpu_cap must be positive when given, got {self.cpu_cap!r}")

    def with_tau(self, tau: float) -> SystemConfig:
        return replace(self, tau=tau)


@dataclass(frozen=True)
class Scenario:
    config: SystemConfig
    users: tuple[UserTask, ...]

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        if len(self.users) < 1:
            raise ValueError("a scenario needs at least one user")
        for user in self.users:
            user.check(self.config.fading.epsilon)

    @property
    def K(self) -> int:
        return len(self.users)

    def column(self, name: str) -> np.ndarray:
        """Per-user attribute as a float array, e.g. ``scenario.column("L")``."""
        return np.array([getattr(u, name) for u in self.users], dtype=float)

    def with_tau(self, tau: float) -> Scenario:
        return Scenario(self.config.with_tau(tau), self.users)

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": {
                "W": cfg.radio.W,
                "N0": cfg.radio.N0,
                "P_BS": cfg.radio.P_BS,
                "P_user": cfg.radio.P_user,
                "epsilon": cfg.fading.epsilon,
                "g0": cfg.g0,
                "tau": cfg.tau,
                "cpu_cap": cfg.cpu_cap,
            },
            "users": [
                {"L": u.L, "B": u.B, "C": u.C, "Y": u.Y, "g": u.g, "beta": u.beta}
                for u in self.users
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Scenario:
        cfg_keys = {"W", "N0", "P_BS", "P_user", "epsilon", "g0", "tau", "cpu_cap"}
        user_keys = {"L", "B", "C", "Y", "g", "beta"}
        if set(data) != {"config", "users"}:
            raise ValueError(f"scenario must have exactly the keys 'config' and 'users', got {sorted(data)}")
        cfg = data["config"]
        missing = cfg_keys - set(cfg) - {"cpu_cap"}
        if missing or set(cfg) - cfg_keys:
            raise ValueError(f"bad config keys: missing {sorted(missing)}, unknown {sorted(set(cfg) - cfg_keys)}")
        radio = RadioParams(W=cfg["W"], N0=cfg["N0"], P_BS=cfg["P_BS"], P_user=cfg["P_user"])
        config = SystemConfig(
            radio=radio,
            fading=FadingParams(cfg["epsilon"]),
            g0=cfg["g0"],
            tau=cfg["tau"],
            cpu_cap=cfg.get("cpu_cap"),
        )
        users = []
        for i, u in enumerate(data["users"]):
            if set(u) != user_keys:
                raise ValueError(f"users[{i}]: expected keys {sorted(user_keys)}, got {sorted(u)}")
            users.append(UserTask(**{k: float(v) for k, v in u.items()}))
        return cls(config, tuple(users))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def loads(cls, text: str) -> Scenario:
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> Scenario:
        return cls.loads(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ScenarioDistribution:
    """Sampling law for the users of a scenario.

    ``L``, ``B`` and ``C`` are exponential with the given means, ``g`` is uniform
    on ``[0, g_max]`` and ``beta`` is shifted exponential.
    """

    K: int = 10
    mean_L: float = 2.0
    mean_B: float = 4.0
    mean_C: float = 1.0
    g_max: float = 10.0
    output_map: OutputSizeMap = field(default_factory=OutputSizeMap)
    fading: FadingParams = field(default_factory=FadingParams)

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K!r}")
        for name in ("mean_L", "mean_B", "mean_C", "g_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _exponential(rng: np.random.Generator, mean: float, size: int) -> np.ndarray:
    return -mean * np.log1p(-rng.random(size))


def sample_scenario(dist: ScenarioDistribution, config: SystemConfig, rng: np.random.Generator) -> Scenario:
    """Draw ``dist.K`` independent users.

    Draw order is fixed (all L, then B, C, g, beta) so a seed pins the scenario.
    """
    K = int(dist.K)
    L = _exponential(rng, dist.mean_L, K)
    B = _exponential(rng, dist.mean_B, K)
    C = _exponential(rng, dist.mean_C, K)
    g = dist.g_max * rng.random(K)
    beta = sample_fading(dist.fading, rng, K)
    Y = output_size(L + B, dist.output_map)
    users = tuple(
        UserTask(L=float(L[k]), B=float(B[k]), C=float(C[k]), Y=float(Y[k]), g=float(g[k]), beta=float(beta[k]))
        for k in range(K)
    )
    if config.fading != dist.fading:
        config = replace(config, fading=dist.fading)
    return Scenario(config, users)
