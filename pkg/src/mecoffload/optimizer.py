"""Energy-optimal offloading set under a total transmission-time budget.

For every candidate number of offloaders ``n`` the problem is linear in the
decision vector, so the search runs one cardinality-constrained 0/1 program per
``n`` and keeps the cheapest feasible answer.  ``n = 0`` and ``n = K`` have a
single candidate each and are evaluated directly with the literal time model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bilp
from .channel import downlink_rate, uplink_rate_inversion
from .energy_time import (
    CostBreakdown,
    DecisionVector,
    evaluate,
    linearization_gap,
    linearize,
)
from .taskmodel import Scenario

OPTIMAL = bilp.OPTIMAL
INFEASIBLE = bilp.INFEASIBLE


@dataclass(frozen=True)
class PerN:
    n: int
    energy: float
    feasible: bool


@dataclass(frozen=True)
class SolveOutcome:
    decision: DecisionVector
    n_star: int
    energy: float
    time: float
    breakdown: CostBreakdown
    per_n: tuple[PerN, ...]
    status: str
    linearization_gap: float
    tau: float
    min_feasible_tau: float | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "decision": list(self.decision.a),
            "offloading_set": list(self.decision.offloading_set),
            "n_star": self.n_star,
            "energy": _json_float(self.energy),
            "time": self.time,
            "tau": self.tau,
            "uplink_time": self.breakdown.uplink_time,
            "linearization_gap": self.linearization_gap,
            "min_feasible_tau": self.min_feasible_tau,
            "per_n": [{"n": p.n, "energy": _json_float(p.energy), "feasible": p.feasible} for p in self.per_n],
            "per_user_energy": list(self.breakdown.per_user_energy),
            "per_user_downlink_time": list(self.breakdown.per_user_downlink_time),
        }


def _json_float(x: float):
    return x if math.isfinite(x) else None


def _cpu_row(scenario: Scenario):
    cap = scenario.config.cpu_cap
    return None if cap is None else (scenario.column("C"), cap)


def _within_cap(scenario: Scenario, a) -> bool:
    cap = scenario.config.cpu_cap
    if cap is None:
        return True
    return math.fsum(u.C for u, x in zip(scenario.users, a) if x) <= cap + bilp.FEAS_TOL


def _candidate(scenario: Scenario, n: int, objective: str = "energy"):
    """Best decision with exactly ``n`` offloaders, or ``None``.

    ``objective="time"`` minimizes the (conservative) time instead and ignores tau.
    """
    K = scenario.K
    tau = scenario.config.tau
    if n in (0, K):
        a = (1 if n else 0,) * K
        if not _within_cap(scenario, a):
            return None
        cost = evaluate(scenario, a)
        if objective == "energy" and cost.total_time > tau + bilp.FEAS_TOL:
            return None
        return a, (cost.total_energy if objective == "energy" else cost.total_time)
    coef = linearize(scenario, n)
    if objective == "energy":
        inst = bilp.BilpInstance(coef.e, coef.d, tau - coef.T0_n, n, _cpu_row(scenario))
        offset = coef.E0
    else:
        inst = bilp.BilpInstance(coef.d, coef.d, math.inf, n, _cpu_row(scenario))
        offset = coef.T0_n
    sol = bilp.solve(inst)
    if not sol.optimal:
        return None
    return sol.a, offset + sol.objective


def optimize(scenario: Scenario, n_max: int | None = None, force_n: int | None = None) -> SolveOutcome:
    """Minimize total energy subject to the time budget ``scenario.config.tau``.

    ``n_max`` optionally stops the search over the offloader count early (see
    :func:`mecoffload.analysis.max_offloading_users`); it may exclude the true
    optimum on a particular realization.  ``force_n`` restricts the search to
    exactly that many offloaders.
    """
    K = scenario.K
    if force_n is not None:
        if not 0 <= force_n <= K:
            raise ValueError(f"force_n must lie in 0..{K}, got {force_n}")
        counts = [int(force_n)]
    else:
        counts = range((K if n_max is None else max(0, min(K, int(n_max)))) + 1)
    per_n = []
    best = None
    for n in counts:
        cand = _candidate(scenario, n)
        if cand is None:
            per_n.append(PerN(n, math.inf, False))
            continue
        per_n.append(PerN(n, cand[1], True))
        # strict '<' keeps the smaller n on ties
        if best is None or cand[1] < best[1]:
            best = cand
    if best is None:
        floor = min_feasible_tau(scenario)
        a = _min_time_decision(scenario)
        cost = evaluate(scenario, a)
        return SolveOutcome(
            decision=DecisionVector(a),
            n_star=sum(a),
            energy=math.inf,
            time=cost.total_time,
            breakdown=cost,
            per_n=tuple(per_n),
            status=INFEASIBLE,
            linearization_gap=linearization_gap(scenario, a),
            tau=scenario.config.tau,
            min_feasible_tau=floor,
        )
    a = best[0]
    cost = evaluate(scenario, a)
    # the linear time model never under-estimates, so this holds by construction
    assert cost.total_time <= scenario.config.tau + 1e-9 * max(1.0, scenario.config.tau)
    return SolveOutcome(
        decision=DecisionVector(a),
        n_star=sum(a),
        energy=cost.total_energy,
        time=cost.total_time,
        breakdown=cost,
        per_n=tuple(per_n),
        status=OPTIMAL,
        linearization_gap=linearization_gap(scenario, a),
        tau=scenario.config.tau,
    )


def _min_time_candidates(scenario: Scenario):
    for n in range(scenario.K + 1):
        cand = _candidate(scenario, n, objective="time")
        if cand is not None:
            yield cand


def _min_time_decision(scenario: Scenario):
    best = None
    for cand in _min_time_candidates(scenario):
        if best is None or cand[1] < best[1]:
            best = cand
    if best is None:
        return (0,) * scenario.K
    return best[0]


def min_feasible_tau(scenario: Scenario) -> float:
    """Smallest budget for which :func:`optimize` reports an optimal decision.

    Intermediate offloader counts are judged with the same conservative time
    model the optimizer uses (uplink time set by the largest ``L`` over all
    users).  Returns ``inf`` if the CPU cap rules out every decision.
    """
    return min((cand[1] for cand in _min_time_candidates(scenario)), default=math.inf)


# --- brute-force oracle ------------------------------------------------------

BRUTE_FORCE_MAX_K = 20


def brute_force(scenario: Scenario):
    """Enumerate all ``2^K`` decisions under the literal model.

    Returns ``(a, energy, time)`` of the cheapest decision meeting the time
    budget (and CPU cap), or ``None`` when no decision is feasible.  Ties go to
    the decision with fewer offloaders, then the lexicographically smallest.
    """
    K = scenario.K
    if K > BRUTE_FORCE_MAX_K:
        raise ValueError(f"brute force is limited to K <= {BRUTE_FORCE_MAX_K}, got K={K}")
    cfg = scenario.config
    radio = cfg.radio
    v = downlink_rate(radio)
    L, B, C, Y, g, beta = (scenario.column(c) for c in ("L", "B", "C", "Y", "g", "beta"))
    masks = ((np.arange(2**K)[:, None] >> np.arange(K)[::-1]) & 1).astype(bool)
    n = masks.sum(axis=1)
    u = np.array([math.inf] + [uplink_rate_inversion(m, radio) for m in range(1, K + 1)])[n]
    t_up = np.where(masks, L[None, :] / u[:, None], 0.0).max(axis=1)
    down = np.where(masks, Y / v, B / v)
    time = t_up + down.sum(axis=1)
    e_off = cfg.g0 * C + radio.P_BS / beta * (L[None, :] / u[:, None]) + radio.P_user / beta * (Y / v)
    e_loc = g * C + radio.P_user / beta * (B / v)
    energy = np.where(masks, e_off, e_loc[None, :]).sum(axis=1)
    ok = time <= cfg.tau + bilp.FEAS_TOL
    if cfg.cpu_cap is not None:
        ok &= (masks * C).sum(axis=1) <= cfg.cpu_cap + bilp.FEAS_TOL
    if not ok.any():
        return None
    idx = np.flatnonzero(ok)
    # masks are enumerated in lexicographic order, so lexsort keeps that order on ties
    best = idx[np.lexsort((idx, n[idx], energy[idx]))[0]]
    a = tuple(int(x) for x in masks[best])
    return a, float(energy[best]), float(time[best])
