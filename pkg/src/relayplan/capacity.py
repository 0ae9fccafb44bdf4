"""Link adaptation, node and cell capacities, and the backhaul-share bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sinr_exact import ENB, EXCLUDED, SinrField


@dataclass(frozen=True)
class LinkAdaptation:
    """Truncated Shannon mapping from SINR to throughput."""

    gamma_low_db: float = -10.0
    gamma_high_db: float = 22.0
    slope: float = 0.6
    cap: float = 4.4  # bits/s/Hz above gamma_high
    W: float = 10e6

    def efficiency(self, gamma) -> np.ndarray:
        """Spectral efficiency in bits/s/Hz for linear SINR ``gamma``."""
        g = np.asarray(gamma, dtype=float)
        with np.errstate(divide="ignore"):
            g_db = 10.0 * np.log10(g)
        mid = self.slope * np.log2(1.0 + g)
        out = np.where(g_db < self.gamma_low_db, 0.0, mid)
        return np.where(g_db > self.gamma_high_db, self.cap, out)

    def __call__(self, gamma):
        return self.W * self.efficiency(gamma)


DEFAULT_LA = LinkAdaptation()


def spectral_efficiency(gamma, W: float = 10e6, la: LinkAdaptation | None = None):
    """Achievable throughput in bits/s at linear SINR ``gamma``."""
    la = DEFAULT_LA if la is None else la
    out = la.efficiency(gamma) * W
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class NodeCapacities:
    C_eNB: float
    C_RN: np.ndarray
    p_eNB: float
    p_RN: np.ndarray
    excluded_fraction: float


def node_capacities(field_: SinrField, W: float = 10e6, la: LinkAdaptation | None = None) -> NodeCapacities:
    """Average throughput of the central eNB and of each relay type.

    Each node's capacity is the mean of c(gamma) over the positions it serves
    (uniform UE density), i.e. the integral over its serving area divided by
    the number of UEs it serves. A node that serves no position gets 0.
    """
    la = DEFAULT_LA if la is None else la
    c = la.efficiency(field_.gamma) * W
    N = len(c)
    served = field_.server

    def area_mean(mask):
        k = int(mask.sum())
        return (math.fsum(c[mask]) / k if k else 0.0), k / N

    C_eNB, p_eNB = area_mean(served == ENB)
    C_RN = np.zeros(field_.n)
    p_RN = np.zeros(field_.n)
    for j in range(1, field_.n + 1):
        C_RN[j - 1], p_RN[j - 1] = area_mean(served == j)
    return NodeCapacities(C_eNB, C_RN, p_eNB, p_RN, float(np.mean(served == EXCLUDED)) if N else 0.0)


def cell_capacity(C_eNB: float, C_RN, tau: float) -> float:
    """Cell throughput when relays and eNB share the frame after a backhaul share ``tau``."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    return (1.0 - tau) * (C_eNB + math.fsum(np.atleast_1d(C_RN)))


def tau_star(C_cell0: float, C_eNB: float, C_RN) -> float:
    """Largest backhaul share for which relays still beat the no-relay cell."""
    total = C_eNB + math.fsum(np.atleast_1d(C_RN))
    if total <= 0:
        raise ZeroDivisionError("tau* undefined: eNB and relays deliver no throughput")
    return 1.0 - C_cell0 / total


def tau_backhaul(C_RN, C_B: float) -> float:
    """Self-consistent backhaul share when the backhaul carries all relay traffic.

    Solves tau = sum_i C_RNi * (1 - tau) / C_B.
    """
    if not C_B > 0:
        raise ValueError(f"backhaul capacity must be positive, got {C_B}")
    x = math.fsum(np.atleast_1d(C_RN)) / C_B
    return x / (1.0 + x)


def per_ue_throughput(C_X: float, tau: float, N_attached: int) -> float:
    if N_attached < 1:
        raise ValueError("need at least one attached UE")
    return C_X * (1.0 - tau) / N_attached


@dataclass(frozen=True)
class TauPolicy:
    """How the backhaul share is chosen.

    ``fixed``: tau = value. ``star``: report tau* and evaluate at tau = 0.
    ``backhaul``: tau = tau_B with backhaul capacity ``value`` bits/s/Hz, or,
    if ``value`` is None, C_B derived from the backhaul SINR.
    """

    kind: str = "fixed"
    value: float | None = 0.0

    @classmethod
    def parse(cls, text: str) -> "TauPolicy":
        text = text.strip()
        if text == "star":
            return cls("star", None)
        kind, _, val = text.partition(":")
        if kind == "fixed":
            return cls("fixed", float(val))
        if kind == "backhaul":
            return cls("backhaul", float(val) if val and val != "sinr" else None)
        raise ValueError(f"unknown tau policy {text!r}")

    def __str__(self):
        if self.kind == "star":
            return "star"
        if self.kind == "backhaul" and self.value is None:
            return "backhaul:sinr"
        return f"{self.kind}:{self.value:g}"


@dataclass
class CapacityReport:
    C_eNB: float
    C_RN: list[float]
    C_cell: float
    C_cell0: float
    tau_used: float
    p_eNB: float
    p_RN: list[float]
    excluded_fraction: float
    W: float
    tau_star: float | None = None
    tau_B: float | None = None
    C_B: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def spectral_efficiency(self) -> float:
        return self.C_cell / self.W

    def to_dict(self) -> dict:
        d = {
            "C_eNB": self.C_eNB, "C_RN": list(map(float, self.C_RN)), "C_cell": self.C_cell,
            "C_cell_per_Hz": self.spectral_efficiency, "C_cell0": self.C_cell0, "tau_used": self.tau_used,
            "tau_star": self.tau_star, "tau_B": self.tau_B, "C_B": self.C_B, "p_eNB": self.p_eNB,
            "p_RN": list(map(float, self.p_RN)), "excluded_fraction": self.excluded_fraction, "W": self.W,
        }
        d.update(self.extra)
        return d


def capacity_report(field_: SinrField, C_cell0: float, policy: TauPolicy, W: float = 10e6,
                    la: LinkAdaptation | None = None, gamma_B: float | None = None) -> CapacityReport:
    """Combine node capacities with a backhaul policy.

    ``C_cell0`` is the no-relay cell throughput (bits/s). ``gamma_B`` is only
    needed for the backhaul policy without an explicit C_B.
    """
    la = DEFAULT_LA if la is None else la
    nc = node_capacities(field_, W, la)
    total = nc.C_eNB + math.fsum(nc.C_RN)
    ts = tau_star(C_cell0, nc.C_eNB, nc.C_RN) if total > 0 else None
    C_B = tau_B = None
    if policy.kind == "fixed":
        tau = float(policy.value)
    elif policy.kind == "star":
        tau = 0.0
    else:
        if field_.n == 0:
            tau = 0.0
        else:
            if policy.value is not None:
                C_B = policy.value * W
            else:
                if gamma_B is None:
                    raise ValueError("backhaul SINR needed to derive C_B")
                C_B = spectral_efficiency(gamma_B, W, la)
            # an unusable backhaul leaves no frame time for access
            tau_B = tau_backhaul(nc.C_RN, C_B) if C_B > 0 else 1.0
            tau = tau_B
    return CapacityReport(
        C_eNB=nc.C_eNB, C_RN=list(nc.C_RN), C_cell=cell_capacity(nc.C_eNB, nc.C_RN, tau), C_cell0=C_cell0,
        tau_used=tau, p_eNB=nc.p_eNB, p_RN=list(nc.p_RN), excluded_fraction=nc.excluded_fraction, W=W,
        tau_star=ts, tau_B=tau_B, C_B=C_B,
    )
