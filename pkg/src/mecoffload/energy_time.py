"""Total transmission time and total consumed energy of an offloading decision.

``total_time``/``total_energy`` evaluate the literal model, where the uplink
phase lasts ``max_{k in A} L_k / u(n)``.  ``linearize`` produces the per-``n``
linear coefficients used by the integer program; its time offset uses the
largest ``L`` over *all* users, so for a fixed ``n`` it over-estimates the time
of any offloading set that leaves out the user with the largest local data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import downlink_rate, uplink_rate_inversion
from .taskmodel import Scenario


@dataclass(frozen=True)
class DecisionVector:
    a: tuple[int, ...]

    def __post_init__(self):
        if any(x not in (0, 1) for x in self.a):
            raise ValueError(f"decision entries must be 0 or 1, got {self.a!r}")
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))

    @property
    def n(self) -> int:
        return sum(self.a)

    @property
    def offloading_set(self) -> tuple[int, ...]:
        return tuple(k for k, x in enumerate(self.a) if x)

    def __len__(self):
        return len(self.a)

    def as_array(self) -> np.ndarray:
        return np.array(self.a, dtype=int)

    @classmethod
    def zeros(cls, K: int) -> DecisionVector:
        return cls((0,) * K)

    @classmethod
    def ones(cls, K: int) -> DecisionVector:
        return cls((1,) * K)


@dataclass(frozen=True)
class CostBreakdown:
    total_energy: float
    total_time: float
    uplink_time: float
    per_user_energy: tuple[float, ...]
    per_user_downlink_time: tuple[float, ...]


@dataclass(frozen=True)
class LinearCoefficients:
    n: int
    E0: float
    e: np.ndarray
    T0_n: float
    d: np.ndarray


def _as_decision(a, K: int) -> DecisionVector:
    dv = a if isinstance(a, DecisionVector) else DecisionVector(tuple(a))
    if len(dv) != K:
        raise ValueError(f"decision has length {len(dv)}, scenario has {K} users")
    return dv


def evaluate(scenario: Scenario, a) -> CostBreakdown:
    """Energy and time of decision ``a`` under the literal model."""
    dv = _as_decision(a, scenario.K)
    cfg = scenario.config
    radio = cfg.radio
    v = downlink_rate(radio)
    n = dv.n
    u = uplink_rate_inversion(n, radio) if n else math.inf
    energies = []
    downlink = []
    uplink_time = 0.0
    for user, ak in zip(scenario.users, dv.a):
        P_up = radio.P_BS / user.beta
        P_down = radio.P_user / user.beta
        if ak:
            t_up = user.L / u
            uplink_time = max(uplink_time, t_up)
            downlink.append(user.Y / v)
            energies.append(cfg.g0 * user.C + P_up * t_up + P_down * (user.Y / v))
        else:
            downlink.append(user.B / v)
            energies.append(user.g * user.C + P_down * (user.B / v))
    return CostBreakdown(
        total_energy=math.fsum(energies),
        total_time=uplink_time + math.fsum(downlink),
        uplink_time=uplink_time,
        per_user_energy=tuple(energies),
        per_user_downlink_time=tuple(downlink),
    )


def total_time(scenario: Scenario, a) -> float:
    return evaluate(scenario, a).total_time


def total_energy(scenario: Scenario, a) -> float:
    return evaluate(scenario, a).total_energy


def linearize(scenario: Scenario, n: int) -> LinearCoefficients:
    """Coefficients with ``E = E0 + e(n)^T a`` and ``T <= T0(n) + d^T a`` for ``|a| = n``."""
    K = scenario.K
    if not 1 <= n <= K:
        raise ValueError(f"n must lie in 1..{K}, got {n}")
    cfg = scenario.config
    radio = cfg.radio
    v = downlink_rate(radio)
    u = uplink_rate_inversion(n, radio)
    L, B, C, Y, g, beta = (scenario.column(c) for c in ("L", "B", "C", "Y", "g", "beta"))
    E0 = math.fsum(g * C + radio.P_user * B / (beta * v))
    e = (cfg.g0 - g) * C + radio.P_BS * L / (beta * u) + radio.P_user * (Y - B) / (beta * v)
    d = (Y - B) / v
    T0_n = float(L.max()) / u + math.fsum(B) / v
    return LinearCoefficients(n=n, E0=E0, e=e, T0_n=T0_n, d=d)


def linearization_gap(scenario: Scenario, a) -> float:
    """Conservative-model time minus literal time for ``a`` (0 when nobody or everybody offloads)."""
    dv = _as_decision(a, scenario.K)
    n = dv.n
    if n == 0:
        return 0.0
    L = scenario.column("L")
    u = uplink_rate_inversion(n, scenario.config.radio)
    return (float(L.max()) - float(L[list(dv.offloading_set)].max())) / u
