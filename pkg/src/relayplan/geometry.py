"""Hexagonal eNB lattice, regular relay sub-lattices and UE sampling.

Conventions: distances in km, angles in radians. Neighbouring eNBs are
``2 * Rc`` apart, so each cell is a pointy-top hexagon of apothem ``Rc``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SQRT3 = np.sqrt(3.0)

# Outward normals of the three pairs of hexagon edges (apothem direction).
_EDGE_NORMALS = np.array([[np.cos(a), np.sin(a)] for a in (0.0, np.pi / 3, 2 * np.pi / 3)])

EPS_MIN_FRACTION = 1e-3


def eps_min(Rc: float) -> float:
    """Minimum UE-to-node distance used to clamp the r^-eta singularity."""
    return EPS_MIN_FRACTION * Rc


@dataclass(frozen=True)
class CellGrid:
    Rc: float
    rings: int
    cell_centers: np.ndarray = field(repr=False)

    @property
    def n_cells(self) -> int:
        return len(self.cell_centers)

    @property
    def density(self) -> float:
        """eNB density (1/km^2) of the hexagonal lattice."""
        return 1.0 / (2.0 * SQRT3 * self.Rc ** 2)

    @property
    def eps_min(self) -> float:
        return eps_min(self.Rc)

    @property
    def cell_area(self) -> float:
        return 2.0 * SQRT3 * self.Rc ** 2


@dataclass(frozen=True)
class RelayLayout:
    """Per-cell relay pattern: ``n`` relays at radius ``RR`` and offset ``phi``."""

    n: int
    RR: float = 0.0
    phi: float = 0.0
    PR_dbm: float = 31.0

    def __post_init__(self):
        if not 0 <= self.n <= 6:
            raise ValueError(f"relay count n must be in 0..6, got {self.n}")
        if self.RR < 0:
            raise ValueError(f"relay radius must be >= 0, got {self.RR}")

    def angles(self) -> np.ndarray:
        """Angle of relay type i = 1..n, i.e. phi + 2*pi*i/n."""
        if self.n == 0:
            return np.empty(0)
        i = np.arange(1, self.n + 1)
        return self.phi + 2.0 * np.pi * i / self.n

    def offsets(self) -> np.ndarray:
        """(n, 2) displacement of each relay type from its eNB."""
        a = self.angles()
        return self.RR * np.column_stack([np.cos(a), np.sin(a)])

    def validate_for(self, grid: CellGrid) -> None:
        if self.RR > grid.Rc * (1 + 1e-12):
            raise ValueError(f"relay radius {self.RR} exceeds Rc={grid.Rc}")


@dataclass(frozen=True)
class UESampleSet:
    positions: np.ndarray = field(repr=False)
    scheme: str
    seed: int | None

    def __len__(self) -> int:
        return len(self.positions)


def _hex_distance(q: np.ndarray, r: np.ndarray) -> np.ndarray:
    return np.maximum.reduce([np.abs(q), np.abs(r), np.abs(q + r)])


def build_grid(Rc: float = 1.0, rings: int = 10) -> CellGrid:
    """All lattice sites within ``rings`` hexagonal rings of the origin.

    Index 0 is the origin; the rest are ordered by ring, then by angle, so
    that the ordering is stable across ring counts.
    """
    if Rc <= 0:
        raise ValueError("Rc must be positive")
    if rings < 0:
        raise ValueError("rings must be >= 0")
    span = np.arange(-rings, rings + 1)
    q, r = np.meshgrid(span, span, indexing="ij")
    q, r = q.ravel(), r.ravel()
    ring = _hex_distance(q, r)
    keep = ring <= rings
    q, r, ring = q[keep], r[keep], ring[keep]
    a1 = np.array([2.0 * Rc, 0.0])
    a2 = np.array([Rc, SQRT3 * Rc])
    pts = q[:, None] * a1 + r[:, None] * a2
    theta = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi)
    theta = np.round(theta, 12)
    order = np.lexsort((theta, ring))
    pts = pts[order]
    pts[0] = 0.0
    return CellGrid(Rc=float(Rc), rings=int(rings), cell_centers=pts)


def place_relays(grid: CellGrid, layout: RelayLayout):
    """Relay positions for every cell.

    Returns ``(positions, types, cells)`` with ``positions`` of shape
    ``(n * n_cells, 2)``; types are 1-based. Rows are ordered by cell, then type.
    """
    layout.validate_for(grid)
    n, B1 = layout.n, grid.n_cells
    if n == 0:
        return np.empty((0, 2)), np.empty(0, dtype=int), np.empty(0, dtype=int)
    pos = grid.cell_centers[:, None, :] + layout.offsets()[None, :, :]
    types = np.tile(np.arange(1, n + 1), B1)
    cells = np.repeat(np.arange(B1), n)
    return pos.reshape(-1, 2), types, cells


def relay_sublattice(grid: CellGrid, layout: RelayLayout, i: int) -> np.ndarray:
    """(n_cells, 2) positions of all type-``i`` relays, indexed by cell."""
    if not 1 <= i <= layout.n:
        raise ValueError(f"relay type {i} out of range 1..{layout.n}")
    return grid.cell_centers + layout.offsets()[i - 1]


def nearest_in(points: np.ndarray, sites: np.ndarray, floor: float = 0.0):
    """Arg-min site index and clamped distance for each point (ties -> lowest index)."""
    points = np.atleast_2d(points)
    d = np.hypot(points[:, None, 0] - sites[None, :, 0], points[:, None, 1] - sites[None, :, 1])
    k = np.argmin(d, axis=1)
    return k, np.maximum(d[np.arange(len(points)), k], floor)


def nearest_relay_of_type(u, i: int, layout: RelayLayout, grid: CellGrid):
    """Cell index k*(i) of the closest type-i relay and the clamped distance."""
    k, d = nearest_in(np.asarray(u, dtype=float), relay_sublattice(grid, layout, i), grid.eps_min)
    if np.ndim(u) == 1:
        return int(k[0]), float(d[0])
    return k, d


def inside_central_cell(points, Rc: float, strict: bool = True) -> np.ndarray:
    """Whether each point lies in the hexagon of apothem ``Rc`` around the origin."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    proj = np.abs(p @ _EDGE_NORMALS.T).max(axis=1)
    return proj < Rc if strict else proj <= Rc


def sample_cell(grid: CellGrid, N: int = 10_000, scheme: str = "grid", seed: int | None = 0) -> UESampleSet:
    """UE positions inside the central hexagon.

    ``grid``: square lattice through the origin with spacing chosen so that
    about ``N`` points fall strictly inside (equal weight per point).
    ``uniform``: exactly ``N`` i.i.d. uniform points (rejection sampling).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    Rc = grid.Rc
    if scheme == "grid":
        h = np.sqrt(grid.cell_area / N)
        m = int(np.ceil(2 * Rc / SQRT3 / h)) + 1
        ax = h * np.arange(-m, m + 1)
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        pts = pts[inside_central_cell(pts, Rc)]
        return UESampleSet(positions=pts, scheme=scheme, seed=None)
    if scheme in ("uniform", "uniform-random"):
        rng = np.random.default_rng(seed)
        half_h = 2 * Rc / SQRT3
        out = []
        have = 0
        while have < N:
            cand = rng.uniform((-Rc, -half_h), (Rc, half_h), size=(2 * (N - have) + 16, 2))
            cand = cand[inside_central_cell(cand, Rc)]
            out.append(cand)
            have += len(cand)
        pts = np.concatenate(out)[:N]
        return UESampleSet(positions=pts, scheme="uniform", seed=seed)
    raise ValueError(f"unknown sampling scheme {scheme!r}")
