"""Closed-form estimates of the mean transmission time and uplink rates.

These are approximations for iid exponential data sizes and are kept apart
from the exact optimizer; the only coupling is the optional ``n_max`` cap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .channel import RadioParams, downlink_rate
from .taskmodel import OutputSizeMap


@dataclass(frozen=True)
class MeanTimeParams:
    K: int = 10
    mean_L: float = 2.0
    mean_B: float = 4.0
    output_map: OutputSizeMap = field(default_factory=OutputSizeMap)
    radio: RadioParams = field(default_factory=RadioParams)


def expected_L_max(K: int, mean_L: float) -> float:
    """Mean of the largest of ``K`` iid exponentials: ``mean_L * H_K``."""
    if K < 1 or not mean_L > 0:
        raise ValueError("need K >= 1 and mean_L > 0")
    return mean_L * math.fsum(1.0 / k for k in range(1, K + 1))


def theta(params: MeanTimeParams) -> float:
    """Per-offloader slope of the approximate mean total transmission time."""
    v = downlink_rate(params.radio)
    c0, c1 = params.output_map.c0, params.output_map.c1
    uplink = expected_L_max(params.K, params.mean_L) * math.log(2) / params.radio.W
    return uplink + (c0 + c1 * params.mean_L - (1.0 - c1) * params.mean_B) / v


def mean_total_time(n: int, params: MeanTimeParams) -> float:
    """``K * mean_B / v + n * theta``."""
    if not 0 <= n <= params.K:
        raise ValueError(f"n must lie in 0..{params.K}, got {n}")
    v = downlink_rate(params.radio)
    return params.K * params.mean_B / v + n * theta(params)


def max_offloading_users(tau: float, params: MeanTimeParams, slope: float | None = None) -> int:
    """Largest ``n`` whose approximate mean time fits in ``tau``.

    A nonpositive slope means the budget does not bind on average, and ``K`` is
    returned.  ``slope`` overrides the computed ``theta``.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    th = theta(params) if slope is None else slope
    if th <= 0:
        return params.K
    floor = params.K * params.mean_B / downlink_rate(params.radio)
    if floor > tau:
        return 0
    return min(params.K, int(math.floor((tau - floor) / th)))


def rate_comparison(K: int, received_power: float, radio: RadioParams) -> tuple[float, float]:
    """Per-user uplink rate with all ``K`` users transmitting at once vs. TDMA."""
    if K < 1:
        raise ValueError("K must be >= 1")
    P, N0, W = received_power, radio.N0, radio.W
    u_sim = W * math.log2(1.0 + P / ((K - 1) * P + N0))
    u_tdma = W / K * math.log2(1.0 + P / N0)
    return u_sim, u_tdma
