"""Path-gain laws and power units for the direct, relay and backhaul links.

All internal powers are linear milliwatts; distances are km.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np


class LinkType(str, Enum):
    DIRECT = "direct"      # eNB -> UE
    RELAY = "relay"        # RN -> UE
    BACKHAUL = "backhaul"  # eNB -> RN


def dbm_to_linear(x_dbm):
    return np.power(10.0, np.asarray(x_dbm, dtype=float) / 10.0)


def linear_to_dbm(x_mw):
    return 10.0 * np.log10(x_mw)


def to_db(x):
    return 10.0 * np.log10(x)


def from_db(x_db):
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)


def path_gain(d, K: float, eta: float):
    """K * d^-eta. Callers clamp ``d`` at the minimum distance beforehand."""
    return K * np.power(d, -eta)


@dataclass(frozen=True)
class PropagationParams:
    """Powers, noise and the (K, eta) pairs of the three link types.

    Defaults are the urban parameter set used throughout the package
    (eta=4.28, eta_R=3.75, K=1.86, K_R=1.9e3, Nth=-104 dBm, W=10 MHz,
    P=43 dBm). Backhaul constants default to the direct-link ones.
    """

    P_dbm: float = 43.0
    PR_dbm: float = 31.0
    K: float = 1.86
    eta: float = 4.28
    K_R: float = 1.9e3
    eta_R: float = 3.75
    K_B: float | None = None
    eta_B: float | None = None
    Nth_dbm: float = -104.0
    W: float = 10e6

    def __post_init__(self):
        if self.K_B is None:
            object.__setattr__(self, "K_B", self.K)
        if self.eta_B is None:
            object.__setattr__(self, "eta_B", self.eta)
        for name in ("eta", "eta_R", "eta_B"):
            if not getattr(self, name) > 2:
                raise ValueError(f"{name} must be > 2 (got {getattr(self, name)})")
        for name in ("K", "K_R", "K_B"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("P_dbm", "PR_dbm", "Nth_dbm"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.W > 0:
            raise ValueError("W must be > 0")

    @property
    def P(self) -> float:
        return float(dbm_to_linear(self.P_dbm))

    @property
    def PR(self) -> float:
        return float(dbm_to_linear(self.PR_dbm))

    @property
    def Nth(self) -> float:
        return float(dbm_to_linear(self.Nth_dbm))

    @property
    def omega_R(self) -> float:
        return self.K_R / self.K

    def constants(self, link: LinkType) -> tuple[float, float]:
        link = LinkType(link)
        if link is LinkType.DIRECT:
            return self.K, self.eta
        if link is LinkType.RELAY:
            return self.K_R, self.eta_R
        return self.K_B, self.eta_B

    def tx_power(self, link: LinkType) -> float:
        return self.PR if LinkType(link) is LinkType.RELAY else self.P

    def with_relay_power(self, PR_dbm: float) -> "PropagationParams":
        return replace(self, PR_dbm=float(PR_dbm))

    def scaled(self, factor_db: float) -> "PropagationParams":
        """All powers and the noise shifted by the same number of dB."""
        return replace(
            self,
            P_dbm=self.P_dbm + factor_db,
            PR_dbm=self.PR_dbm + factor_db,
            Nth_dbm=self.Nth_dbm + factor_db,
        )


def received_power(link: LinkType, tx_pos, u, params: PropagationParams, d_min: float = 0.0, tx_power: float | None = None):
    """Linear received power at ``u`` from a transmitter at ``tx_pos``.

    ``tx_power`` (linear mW) overrides the power implied by the link type.
    """
    K, eta = params.constants(link)
    p = params.tx_power(link) if tx_power is None else tx_power
    d = np.hypot(*(np.asarray(u, dtype=float) - np.asarray(tx_pos, dtype=float)).T)
    return p * path_gain(np.maximum(d, d_min), K, eta)
