"""Exact SINR by full summation over every node of the finite ring grid.

This is the reference the fluid closed forms are checked against. All
quantities are linear; conversion to dB happens only when reporting.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import CellGrid, RelayLayout, relay_sublattice
from .propagation import LinkType, PropagationParams, path_gain

ENB = 0        # server label for the central eNB
EXCLUDED = -1  # best server is a neighbouring eNB

_CHUNK = 512


class NoBackhaulError(ValueError):
    """Raised when a backhaul quantity is requested for a layout without relays."""


@dataclass(frozen=True)
class SinrSample:
    position: tuple[float, float]
    server: tuple[str, int, int]  # ("enb", 0, k) or ("relay", j, k)
    gamma: float
    backend: str


@dataclass
class SinrField:
    """Per-position SINR over a sample set, for either backend.

    ``server`` holds 0 for the central eNB, j in 1..n for a type-j relay and
    -1 for positions best-served by a neighbouring eNB. ``server_cell`` is the
    cell index of the serving node; ``server_dist`` the clamped distance to it.
    """

    positions: np.ndarray = field(repr=False)
    server: np.ndarray = field(repr=False)
    server_cell: np.ndarray = field(repr=False)
    server_dist: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    n: int
    backend: str

    def __len__(self) -> int:
        return len(self.gamma)

    @property
    def excluded_fraction(self) -> float:
        return float(np.mean(self.server == EXCLUDED)) if len(self) else 0.0

    def gamma_db(self, which: int | None = None) -> np.ndarray:
        g = self.gamma if which is None else self.gamma[self.server == which]
        return 10.0 * np.log10(g)

    def served_by_relays(self) -> np.ndarray:
        return self.server >= 1

    def samples(self):
        for p, s, k, g in zip(self.positions, self.server, self.server_cell, self.gamma):
            kind = "enb" if s <= 0 else "relay"
            yield SinrSample((float(p[0]), float(p[1])), (kind, int(max(s, 0)), int(k)), float(g), self.backend)


@dataclass
class ExactTerms:
    """Raw interference sums at a set of positions.

    Shapes: ``(N,)`` for eNB terms, ``(N, n)`` for per-type relay terms.
    ``enb_own`` is the central eNB, ``enb_other`` the sum over cells 1..B;
    ``relay_near[:, i]`` is the nearest type-(i+1) relay, ``relay_other``
    the remaining relays of that type.
    """

    enb_own: np.ndarray
    enb_other: np.ndarray
    enb_best: np.ndarray
    enb_best_cell: np.ndarray
    r: np.ndarray
    relay_near: np.ndarray
    relay_other: np.ndarray
    relay_cell: np.ndarray
    r_relay: np.ndarray
    noise: float

    @property
    def n(self) -> int:
        return self.relay_near.shape[1]

    # decomposition of the eNB-served SINR
    @property
    def gamma0(self):
        return self.enb_own / self.enb_other

    @property
    def gamma_ik(self):
        return self.relay_near / self.relay_other

    @property
    def omega(self):
        return self.relay_other / self.enb_other[:, None]

    @property
    def I1(self):
        return np.sum(self.omega * (1.0 + self.gamma_ik), axis=1)

    @property
    def I2(self):
        return self.noise / self.enb_other

    def omega_ij(self, i: int, j: int):
        """Interference ratio of type-i to type-j relays (1-based types)."""
        return self.relay_other[:, i - 1] / self.relay_other[:, j - 1]

    def I3(self, j: int):
        return self.noise / self.relay_other[:, j - 1]

    # SINR, both as direct sums and from the decomposition
    def gamma_enb_direct(self):
        total_relay = np.sum(self.relay_near + self.relay_other, axis=1)
        return self.enb_own / (self.enb_other + total_relay + self.noise)

    def gamma_enb(self):
        return self.gamma0 / (1.0 + self.I1 + self.I2)

    def gamma_relay_direct(self, j: int):
        all_enb = self.enb_own + self.enb_other
        useful = self.relay_near[:, j - 1]
        others = np.sum(self.relay_other, axis=1) + np.sum(np.delete(self.relay_near, j - 1, axis=1), axis=1)
        return useful / (all_enb + others + self.noise)

    def gamma_relay(self, j: int):
        jj = j - 1
        g_ik = self.gamma_ik
        om_j = self.omega[:, jj]
        cross = np.zeros_like(self.r)
        for i in range(1, self.n + 1):
            if i != j:
                cross = cross + (1.0 + g_ik[:, i - 1]) * self.omega_ij(i, j)
        return g_ik[:, jj] / (1.0 + (1.0 + self.gamma0) / om_j + cross + self.I3(j))


def enb_terms(points, grid: CellGrid, params: PropagationParams) -> dict:
    """Layout-independent eNB sums at ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    N = len(pts)
    P = params.P
    K, eta = params.constants(LinkType.DIRECT)
    centers = grid.cell_centers
    out = {"enb_own": np.empty(N), "enb_other": np.empty(N), "enb_best": np.empty(N),
           "enb_best_cell": np.empty(N, dtype=int), "r": np.empty(N)}
    for s in range(0, N, _CHUNK):
        blk = pts[s:s + _CHUNK]
        d = np.maximum(np.hypot(blk[:, None, 0] - centers[None, :, 0], blk[:, None, 1] - centers[None, :, 1]),
                       grid.eps_min)
        pe = P * path_gain(d, K, eta)
        kb = np.argmax(pe, axis=1)
        out["enb_own"][s:s + _CHUNK] = pe[:, 0]
        out["enb_other"][s:s + _CHUNK] = pe[:, 1:].sum(axis=1)
        out["enb_best"][s:s + _CHUNK] = pe[np.arange(len(blk)), kb]
        out["enb_best_cell"][s:s + _CHUNK] = kb
        out["r"][s:s + _CHUNK] = d[:, 0]
    return out


def relay_type_terms(points, sites: np.ndarray, floor: float, K_R: float, eta_R: float):
    """Unit-power gain sums of one relay sub-lattice at ``points``.

    Returns ``(near_gain, other_gain, cell, dist)``: the gain of the nearest
    site, the summed gain of all the others, the nearest site index and its
    clamped distance. Multiply gains by the relay power to get powers.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    N = len(pts)
    near, other = np.empty(N), np.empty(N)
    cell, dist = np.empty(N, dtype=int), np.empty(N)
    for s in range(0, N, _CHUNK):
        blk = pts[s:s + _CHUNK]
        rows = np.arange(len(blk))
        d = np.maximum(np.hypot(blk[:, None, 0] - sites[None, :, 0], blk[:, None, 1] - sites[None, :, 1]), floor)
        k = np.argmin(d, axis=1)
        g = path_gain(d, K_R, eta_R)
        near[s:s + _CHUNK] = g[rows, k]
        g[rows, k] = 0.0  # summing the rest directly avoids cancellation near a relay
        other[s:s + _CHUNK] = g.sum(axis=1)
        cell[s:s + _CHUNK] = k
        dist[s:s + _CHUNK] = d[rows, k]
    return near, other, cell, dist


def assemble_terms(enb: dict, per_type: list, PR: float, noise: float) -> ExactTerms:
    """Build :class:`ExactTerms` from cached eNB sums and per-type unit-power sums."""
    N = len(enb["r"])
    n = len(per_type)
    near = np.empty((N, n))
    other = np.empty((N, n))
    cell = np.empty((N, n), dtype=int)
    dist = np.empty((N, n))
    for i, (g_near, g_other, k, d) in enumerate(per_type):
        near[:, i] = PR * g_near
        other[:, i] = PR * g_other
        cell[:, i] = k
        dist[:, i] = d
    return ExactTerms(relay_near=near, relay_other=other, relay_cell=cell, r_relay=dist, noise=noise, **enb)


def exact_terms(points, layout: RelayLayout, grid: CellGrid, params: PropagationParams) -> ExactTerms:
    """Evaluate every interference sum at ``points`` over the whole grid."""
    layout.validate_for(grid)
    KR, etaR = params.constants(LinkType.RELAY)
    per_type = [relay_type_terms(points, relay_sublattice(grid, layout, i), grid.eps_min, KR, etaR)
                for i in range(1, layout.n + 1)]
    PR = params.with_relay_power(layout.PR_dbm).PR
    return assemble_terms(enb_terms(points, grid, params), per_type, PR, params.Nth)


def select_server(enb_power, enb_cell, relay_power, relay_cell):
    """Best-server rule shared by both backends.

    Highest received power wins; exact ties go to the lowest
    (cell index, node type) key with the eNB as type 0.
    Returns ``(label, cell)``, label -1 meaning a neighbouring eNB.
    """
    N = len(enb_power)
    n = relay_power.shape[1] if relay_power.ndim == 2 else 0
    power = np.column_stack([enb_power, relay_power]) if n else enb_power[:, None]
    cells = np.column_stack([enb_cell, relay_cell]) if n else enb_cell[:, None]
    types = np.broadcast_to(np.arange(n + 1), power.shape)
    key = cells * (n + 1) + types
    best = power.max(axis=1, keepdims=True)
    key = np.where(power == best, key, np.iinfo(np.int64).max)
    col = np.argmin(key, axis=1)
    rows = np.arange(N)
    label = col.copy()
    cell = cells[rows, col]
    label[(col == 0) & (cell != 0)] = EXCLUDED
    return label, cell


def field_from_terms(t: ExactTerms, positions) -> SinrField:
    """Best-server SINR field from precomputed sums."""
    label, cell = select_server(t.enb_best, t.enb_best_cell, t.relay_near, t.relay_cell)
    gamma = np.empty(len(label))
    dist = np.empty(len(label))
    m = label == ENB
    gamma[m] = t.gamma_enb_direct()[m]
    dist[m] = t.r[m]
    m = label == EXCLUDED
    if m.any():
        # neighbouring-eNB service: useful power is that eNB, everything else interferes
        relays = np.sum(t.relay_near + t.relay_other, axis=1)
        gamma[m] = (t.enb_best / (t.enb_own + t.enb_other - t.enb_best + relays + t.noise))[m]
        dist[m] = np.nan
    for j in range(1, t.n + 1):
        m = label == j
        if m.any():
            gamma[m] = t.gamma_relay_direct(j)[m]
            dist[m] = t.r_relay[m, j - 1]
    return SinrField(positions=np.atleast_2d(np.asarray(positions, dtype=float)), server=label, server_cell=cell,
                     server_dist=dist, gamma=gamma, n=t.n, backend="exact")


def exact_field(points, layout: RelayLayout, grid: CellGrid, params: PropagationParams) -> SinrField:
    """SINR of every position under the best-server rule, by direct summation."""
    return field_from_terms(exact_terms(points, layout, grid, params), points)


def best_server(u, layout: RelayLayout, grid: CellGrid, params: PropagationParams):
    """Serving node at ``u``: ``("enb", 0, k)`` or ``("relay", j, k)``."""
    t = exact_terms(u, layout, grid, params)
    label, cell = select_server(t.enb_best, t.enb_best_cell, t.relay_near, t.relay_cell)
    lab, k = int(label[0]), int(cell[0])
    return ("relay", lab, k) if lab >= 1 else ("enb", 0, k)


@dataclass(frozen=True)
class EnbSinr:
    gamma: float
    gamma0: float
    I1: float
    I2: float
    omega: np.ndarray
    gamma_ik: np.ndarray
    served_by_enb0: bool


@dataclass(frozen=True)
class RelaySinr:
    gamma: float
    gamma_jk: float
    omega_j: float
    I3: float
    served_by_relay: bool


def sinr_enb_exact(u, layout: RelayLayout, grid: CellGrid, params: PropagationParams) -> EnbSinr:
    """SINR at ``u`` if served by the central eNB, with its decomposition.

    ``served_by_enb0`` is False when the best server is some other node; the
    value is still computed so the caller can decide what to do with it.
    """
    t = exact_terms(u, layout, grid, params)
    label, _ = select_server(t.enb_best, t.enb_best_cell, t.relay_near, t.relay_cell)
    return EnbSinr(
        gamma=float(t.gamma_enb_direct()[0]),
        gamma0=float(t.gamma0[0]),
        I1=float(t.I1[0]),
        I2=float(t.I2[0]),
        omega=t.omega[0].copy(),
        gamma_ik=t.gamma_ik[0].copy(),
        served_by_enb0=bool(label[0] == ENB),
    )


def sinr_relay_exact(u, j: int, layout: RelayLayout, grid: CellGrid, params: PropagationParams) -> RelaySinr:
    """SINR at ``u`` if served by its nearest type-``j`` relay."""
    if not 1 <= j <= layout.n:
        raise ValueError(f"relay type {j} out of range 1..{layout.n}")
    t = exact_terms(u, layout, grid, params)
    label, _ = select_server(t.enb_best, t.enb_best_cell, t.relay_near, t.relay_cell)
    return RelaySinr(
        gamma=float(t.gamma_relay_direct(j)[0]),
        gamma_jk=float(t.gamma_ik[0, j - 1]),
        omega_j=float(t.omega[0, j - 1]),
        I3=float(t.I3(j)[0]),
        served_by_relay=bool(label[0] == j),
    )


@dataclass(frozen=True)
class BackhaulSinr:
    gamma_B: float
    I4: float


def sinr_backhaul_exact(layout: RelayLayout, grid: CellGrid, params: PropagationParams) -> BackhaulSinr:
    """Backhaul SINR at the type-1 relay of the central cell."""
    if layout.n == 0:
        raise NoBackhaulError("no backhaul link without relays")
    K_B, eta_B = params.constants(LinkType.BACKHAUL)
    P, Nth = params.P, params.Nth
    RR = max(layout.RR, grid.eps_min)
    relay = grid.cell_centers[0] + RR * np.array([np.cos(layout.angles()[0]), np.sin(layout.angles()[0])])
    d = np.maximum(np.hypot(*(grid.cell_centers[1:] - relay).T), grid.eps_min)
    useful = P * path_gain(RR, K_B, eta_B)
    interf = float(np.sum(P * path_gain(d, K_B, eta_B)))
    return BackhaulSinr(gamma_B=useful / (interf + Nth), I4=Nth / (P * K_B * RR ** (-eta_B)))

