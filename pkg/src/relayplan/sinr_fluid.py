"""Fluid-model SINR for a network of one eNB sub-lattice and n relay sub-lattices.

Every sub-lattice has half inter-site distance Rc and density rho, so the
interference from each one is replaced by the continuum kernel
``2*pi*rho*P*K*(2Rc - r)^(2-eta) / (eta - 2)``. The resulting closed forms
need only the distance to the eNB and the distance to the nearest relay of
each type.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import CellGrid, RelayLayout, nearest_in, relay_sublattice
from .propagation import LinkType, PropagationParams, path_gain
from .sinr_exact import NoBackhaulError, SinrField, select_server


class DivergentInterferenceError(ValueError):
    """Path-loss exponent <= 2: the continuum interference integral diverges."""


def _check_eta(eta):
    if not eta > 2:
        raise DivergentInterferenceError(f"fluid kernel needs eta > 2, got {eta}")


def _edge(r, Rc, floor):
    # (2Rc - r) with r clamped to [floor, 2Rc - floor]
    return 2.0 * Rc - np.clip(r, floor, 2.0 * Rc - floor)


def fluid_interference(r, rho, P, K, eta, Rc, floor: float | None = None):
    """Continuum interference at distance ``r`` from the serving node."""
    _check_eta(eta)
    floor = 1e-3 * Rc if floor is None else floor
    return 2.0 * np.pi * rho * P * K * _edge(r, Rc, floor) ** (2.0 - eta) / (eta - 2.0)


@dataclass
class FluidInputs:
    """Distances feeding the closed forms, with the lattice they live on."""

    r: np.ndarray
    r_i: np.ndarray = field(repr=False)
    params: PropagationParams
    Rc: float
    rho: float
    PR_dbm: float | None = None

    def __post_init__(self):
        self.r = np.atleast_1d(np.asarray(self.r, dtype=float))
        self.r_i = np.asarray(self.r_i, dtype=float).reshape(len(self.r), -1)
        _check_eta(self.params.eta)
        _check_eta(self.params.eta_R)

    @property
    def floor(self) -> float:
        return 1e-3 * self.Rc

    @property
    def n(self) -> int:
        return self.r_i.shape[1]

    @property
    def PR(self) -> float:
        p = self.params if self.PR_dbm is None else self.params.with_relay_power(self.PR_dbm)
        return p.PR

    def r_clamped(self):
        return np.clip(self.r, self.floor, 2 * self.Rc - self.floor)

    def ri_clamped(self):
        return np.clip(self.r_i, self.floor, 2 * self.Rc - self.floor)


# The six closed forms. `x` is FluidInputs throughout.

def gamma0_fluid(x: FluidInputs):
    p, r = x.params, x.r_clamped()
    return (p.eta - 2) * r ** (-p.eta) / (2 * np.pi * x.rho * (2 * x.Rc - r) ** (2 - p.eta))


def gamma_ik_fluid(x: FluidInputs):
    p, ri = x.params, x.ri_clamped()
    return ri ** (-p.eta_R) * (p.eta_R - 2) / (2 * np.pi * x.rho * (2 * x.Rc - ri) ** (2 - p.eta_R))


def omega_i_fluid(x: FluidInputs):
    p, r, ri = x.params, x.r_clamped(), x.ri_clamped()
    num = x.PR * p.K_R * (2 * x.Rc - ri) ** (2 - p.eta_R) * (p.eta - 2)
    den = p.P * p.K * (2 * x.Rc - r) ** (2 - p.eta) * (p.eta_R - 2)
    return num / den[:, None]


def i2_fluid(x: FluidInputs):
    p, r = x.params, x.r_clamped()
    return p.Nth * (p.eta - 2) / (2 * np.pi * x.rho * p.P * p.K * (2 * x.Rc - r) ** (2 - p.eta))


def omega_ij_fluid(x: FluidInputs, i: int, j: int):
    p, ri = x.params, x.ri_clamped()
    return (2 * x.Rc - ri[:, i - 1]) ** (2 - p.eta_R) / (2 * x.Rc - ri[:, j - 1]) ** (2 - p.eta_R)


def i3_fluid(x: FluidInputs, j: int):
    p, rj = x.params, x.ri_clamped()[:, j - 1]
    return p.Nth * (p.eta_R - 2) / (2 * np.pi * x.rho * x.PR * p.K_R * (2 * x.Rc - rj) ** (2 - p.eta_R))


def sinr_enb_fluid(x: FluidInputs):
    g0 = gamma0_fluid(x)
    I1 = np.sum(omega_i_fluid(x) * (1 + gamma_ik_fluid(x)), axis=1)
    return g0 / (1 + I1 + i2_fluid(x))


def sinr_relay_fluid(x: FluidInputs, j: int):
    if not 1 <= j <= x.n:
        raise ValueError(f"relay type {j} out of range 1..{x.n}")
    g0 = gamma0_fluid(x)
    g_ik = gamma_ik_fluid(x)
    om = omega_i_fluid(x)
    # sum_{i != j} (1 + g_i) * (2Rc - r_i)^(2-eta_R) / (2Rc - r_j)^(2-eta_R)
    edge = (2 * x.Rc - x.ri_clamped()) ** (2 - x.params.eta_R)
    cross = (np.sum((1 + g_ik) * edge, axis=1) - (1 + g_ik[:, j - 1]) * edge[:, j - 1]) / edge[:, j - 1]
    return g_ik[:, j - 1] / (1 + (1 + g0) / om[:, j - 1] + cross + i3_fluid(x, j))


@dataclass(frozen=True)
class FluidBackhaul:
    gamma_B: float
    I4: float


def sinr_backhaul_fluid(RR: float, params: PropagationParams, grid: CellGrid) -> FluidBackhaul:
    """Backhaul SINR with the eNB interference sum replaced by the kernel."""
    K_B, eta_B = params.constants(LinkType.BACKHAUL)
    RR = max(RR, grid.eps_min)
    useful = params.P * path_gain(RR, K_B, eta_B)
    interf = float(fluid_interference(RR, grid.density, params.P, K_B, eta_B, grid.Rc, grid.eps_min))
    return FluidBackhaul(gamma_B=useful / (interf + params.Nth), I4=params.Nth / (params.P * K_B * RR ** (-eta_B)))


def sinr_backhaul_fluid_for(layout: RelayLayout, grid: CellGrid, params: PropagationParams) -> FluidBackhaul:
    if layout.n == 0:
        raise NoBackhaulError("no backhaul link without relays")
    return sinr_backhaul_fluid(layout.RR, params, grid)


def _local_sites(grid: CellGrid) -> int:
    # Two rings always contain the nearest lattice site for an in-cell UE.
    r = min(grid.rings, 2)
    return 1 + 3 * r * (r + 1)


def nearest_distances(points, layout: RelayLayout, grid: CellGrid):
    """(N, n) distance and cell of the nearest relay of each type."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m = _local_sites(grid)
    dist = np.empty((len(pts), layout.n))
    cell = np.empty((len(pts), layout.n), dtype=int)
    for i in range(1, layout.n + 1):
        cell[:, i - 1], dist[:, i - 1] = nearest_in(pts, relay_sublattice(grid, layout, i)[:m], grid.eps_min)
    return dist, cell


def fluid_enb_terms(r, Rc: float, rho: float, params: PropagationParams) -> dict:
    """Layout-independent pieces of the closed forms for eNB distances ``r``."""
    floor = 1e-3 * Rc
    r = np.clip(r, floor, 2 * Rc - floor)
    edge = (2 * Rc - r) ** (2 - params.eta)
    return {
        "r": r,
        "gamma0": (params.eta - 2) * r ** (-params.eta) / (2 * np.pi * rho * edge),
        "edge": edge,
        "I2": params.Nth * (params.eta - 2) / (2 * np.pi * rho * params.P * params.K * edge),
        "power": params.P * path_gain(r, params.K, params.eta),
    }


def fluid_type_terms(r_i, Rc: float, rho: float, params: PropagationParams) -> dict:
    """Power-independent pieces for one relay sub-lattice at distances ``r_i``."""
    floor = 1e-3 * Rc
    r_i = np.clip(r_i, floor, 2 * Rc - floor)
    edge = (2 * Rc - r_i) ** (2 - params.eta_R)
    return {
        "r": r_i,
        "gamma": r_i ** (-params.eta_R) * (params.eta_R - 2) / (2 * np.pi * rho * edge),
        "edge": edge,
        "gain": path_gain(r_i, params.K_R, params.eta_R),
    }


def combine_fluid(enb: dict, per_type: list, relay_cell, PR: float, rho: float, params: PropagationParams):
    """Best-server label, SINR and serving distance from cached closed-form pieces."""
    N, n = len(enb["r"]), len(per_type)
    label, cell = select_server(enb["power"], np.zeros(N, dtype=int),
                                np.column_stack([PR * t["gain"] for t in per_type]) if n else np.empty((N, 0)),
                                relay_cell)
    if n == 0:
        return label, cell, enb["gamma0"] / (1 + enb["I2"]), enb["r"].copy()
    g = np.column_stack([t["gamma"] for t in per_type])
    e = np.column_stack([t["edge"] for t in per_type])
    p = params
    omega = PR * p.K_R * e * (p.eta - 2) / (p.P * p.K * enb["edge"][:, None] * (p.eta_R - 2))
    gamma = enb["gamma0"] / (1 + np.sum(omega * (1 + g), axis=1) + enb["I2"])
    dist = enb["r"].copy()
    if np.any(label >= 1):
        weighted = (1 + g) * e
        cross = (weighted.sum(axis=1, keepdims=True) - weighted) / e
        I3 = p.Nth * (p.eta_R - 2) / (2 * np.pi * rho * PR * p.K_R * e)
        g_relay = g / (1 + (1 + enb["gamma0"][:, None]) / omega + cross + I3)
        rows = np.nonzero(label >= 1)[0]
        cols = label[rows] - 1
        gamma[rows] = g_relay[rows, cols]
        dist[rows] = np.column_stack([t["r"] for t in per_type])[rows, cols]
    return label, cell, gamma, dist


def fluid_from_distances(positions, r, r_i, relay_cell, layout: RelayLayout, grid: CellGrid,
                         params: PropagationParams) -> SinrField:
    """Best-server SINR field from precomputed distances."""
    p = params.with_relay_power(layout.PR_dbm)
    enb = fluid_enb_terms(r, grid.Rc, grid.density, p)
    per_type = [fluid_type_terms(r_i[:, i], grid.Rc, grid.density, p) for i in range(layout.n)]
    label, cell, gamma, dist = combine_fluid(enb, per_type, relay_cell, p.PR, grid.density, p)
    return SinrField(positions=positions, server=label, server_cell=cell, server_dist=dist,
                     gamma=gamma, n=layout.n, backend="fluid")


def fluid_field(points, layout: RelayLayout, grid: CellGrid, params: PropagationParams) -> SinrField:
    """SINR of every position from the fluid closed forms under best server.

    In-cell positions are always closest to the central eNB, so no position
    is excluded in this backend.
    """
    layout.validate_for(grid)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.maximum(np.hypot(pts[:, 0], pts[:, 1]), grid.eps_min)
    r_i, cells = nearest_distances(pts, layout, grid)
    return fluid_from_distances(pts, r, r_i, cells, layout, grid, params)

