"""Radio-layer closed forms for the uplink/downlink model.

Data sizes are normalized by the bandwidth (bits/Hz), so ``W`` defaults to 1.
Under channel-inversion power control every offloading user is received with
the same power, which collapses the SINR rate into a function of the number of
simultaneous uploaders only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RadioParams:
    W: float = 1.0
    N0: float = 1.0
    P_BS: float = 3.0
    P_user: float = 6.0
    gamma_BS: float = field(init=False)
    gamma_user: float = field(init=False)

    def __post_init__(self):
        for name in ("W", "N0", "P_BS", "P_user"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        object.__setattr__(self, "gamma_BS", self.P_BS / self.N0)
        object.__setattr__(self, "gamma_user", self.P_user / self.N0)

    @classmethod
    def from_snr(cls, gamma_BS: float, gamma_user: float, W: float = 1.0, N0: float = 1.0) -> RadioParams:
        return cls(W=W, N0=N0, P_BS=gamma_BS * N0, P_user=gamma_user * N0)


@dataclass(frozen=True)
class FadingParams:
    epsilon: float = 0.05
    zeta: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        object.__setattr__(self, "zeta", 1.0 / (1.0 - self.epsilon))


class ExcludedUserError(ValueError):
    """Raised for a channel gain below the deep-fading threshold."""


def uplink_rate_general(a, transmit_powers, betas, radio: RadioParams) -> np.ndarray:
    """SINR uplink rate of every offloading user under simultaneous transmission.

    Returns an array of length K with ``nan`` in the slots of non-offloading users.
    """
    a = np.asarray(a)
    P = np.asarray(transmit_powers, dtype=float)
    beta = np.asarray(betas, dtype=float)
    if not (a.shape == P.shape == beta.shape) or a.ndim != 1:
        raise ValueError(f"dimension mismatch: a{a.shape}, powers{P.shape}, betas{beta.shape}")
    if np.any(P <= 0) or np.any(beta <= 0):
        raise ValueError("transmit powers and channel gains must be positive")
    if not np.all((a == 0) | (a == 1)):
        raise ValueError("decision vector must be binary")
    sel = a == 1
    received = P * beta
    total = math.fsum(received[sel])
    rates = np.full(a.shape, np.nan)
    interference = total - received[sel]
    rates[sel] = radio.W * np.log2(1.0 + received[sel] / (interference + radio.N0))
    return rates


def uplink_rate_inversion(n: int, radio: RadioParams) -> float:
    """Common uplink rate u(n) of ``n`` simultaneous uploaders under channel inversion."""
    if n < 1:
        raise ValueError(f"uplink rate is undefined for n={n}; the empty offloading set has no uplink")
    g = radio.gamma_BS
    return radio.W * math.log2(1.0 + g / ((n - 1) * g + 1.0))


def downlink_rate(radio: RadioParams) -> float:
    """TDMA downlink rate, identical for every user under channel inversion."""
    return radio.W * math.log2(1.0 + radio.gamma_user)


def inversion_powers(beta: float, radio: RadioParams, fading: FadingParams | None = None) -> tuple[float, float]:
    """Uplink and downlink transmit powers ``(P_k, Pbar_k)`` that invert the channel."""
    eps = (fading or FadingParams()).epsilon
    if beta < eps:
        raise ExcludedUserError(f"beta={beta!r} is below the deep-fading threshold epsilon={eps!r}")
    return radio.P_BS / beta, radio.P_user / beta


def sample_fading(fading: FadingParams, rng: np.random.Generator, size=None):
    """Shifted-exponential channel gain: ``epsilon + Exp(rate=zeta)``, mean 1.

    Uses the inverse-CDF transform of a uniform draw.
    """
    u = rng.random(size)
    beta = fading.epsilon - np.log1p(-u) / fading.zeta
    return float(beta) if size is None else beta
