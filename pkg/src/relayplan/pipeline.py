"""Layout -> SINR field -> capacity, with caching for repeated evaluation.

The optimizer evaluates thousands of layouts on one fixed sample set. Relay
sub-lattices only depend on (radius, angle), and relay powers enter linearly,
so per-sub-lattice distance and gain sums are cached once per (radius, angle)
and reused across relay counts, offsets and powers.
"""
from __future__ import annotations

import numpy as np

from .capacity import DEFAULT_LA, CapacityReport, LinkAdaptation, TauPolicy, capacity_report
from .geometry import CellGrid, RelayLayout, UESampleSet, nearest_in
from .propagation import LinkType, PropagationParams
from .sinr_exact import (NoBackhaulError, SinrField, assemble_terms, enb_terms, field_from_terms,
                         relay_type_terms, sinr_backhaul_exact)
from .sinr_fluid import _local_sites, combine_fluid, fluid_enb_terms, fluid_type_terms, sinr_backhaul_fluid

BACKENDS = ("exact", "fluid")


def _angle_key(RR: float, angle: float) -> tuple[float, float]:
    a = float(np.mod(angle, 2 * np.pi))
    if np.isclose(a, 2 * np.pi, atol=1e-12):
        a = 0.0
    return round(float(RR), 12), round(a, 10)


class Evaluator:
    """Capacity pipeline for one grid, parameter set and UE sample set."""

    def __init__(self, grid: CellGrid, params: PropagationParams, samples: UESampleSet,
                 backend: str = "fluid", policy: TauPolicy | None = None, la: LinkAdaptation | None = None):
        if backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
        self.grid = grid
        self.params = params
        self.samples = samples
        self.backend = backend
        self.policy = TauPolicy() if policy is None else policy
        self.la = DEFAULT_LA if la is None else la
        self.W = params.W
        self._pts = samples.positions
        self._r = np.maximum(np.hypot(self._pts[:, 0], self._pts[:, 1]), grid.eps_min)
        self._type_cache: dict = {}
        if backend == "exact":
            self._enb = enb_terms(self._pts, grid, params)
        else:
            self._enb = fluid_enb_terms(self._r, grid.Rc, grid.density, params)
        self._baseline: float | None = None

    def _type_terms(self, RR: float, angle: float):
        key = _angle_key(RR, angle)
        hit = self._type_cache.get(key)
        if hit is None:
            offset = RR * np.array([np.cos(angle), np.sin(angle)])
            if self.backend == "exact":
                K_R, eta_R = self.params.constants(LinkType.RELAY)
                hit = relay_type_terms(self._pts, self.grid.cell_centers + offset, self.grid.eps_min, K_R, eta_R)
            else:
                sites = self.grid.cell_centers[:_local_sites(self.grid)] + offset
                cell, dist = nearest_in(self._pts, sites, self.grid.eps_min)
                hit = (cell, fluid_type_terms(dist, self.grid.Rc, self.grid.density, self.params))
            self._type_cache[key] = hit
        return hit

    def field(self, layout: RelayLayout) -> SinrField:
        layout.validate_for(self.grid)
        per_type = [self._type_terms(layout.RR, a) for a in layout.angles()]
        if self.backend == "exact":
            PR = self.params.with_relay_power(layout.PR_dbm).PR
            t = assemble_terms(self._enb, per_type, PR, self.params.Nth)
            return field_from_terms(t, self._pts)
        cells = np.column_stack([c for c, _ in per_type]) if per_type else np.empty((len(self._pts), 0), dtype=int)
        PR = self.params.with_relay_power(layout.PR_dbm).PR
        label, cell, gamma, dist = combine_fluid(self._enb, [t for _, t in per_type], cells, PR,
                                                 self.grid.density, self.params)
        return SinrField(positions=self._pts, server=label, server_cell=cell, server_dist=dist,
                         gamma=gamma, n=layout.n, backend="fluid")

    def backhaul_sinr(self, layout: RelayLayout) -> float:
        if layout.n == 0:
            raise NoBackhaulError("no backhaul link without relays")
        if self.backend == "exact":
            return sinr_backhaul_exact(layout, self.grid, self.params).gamma_B
        return sinr_backhaul_fluid(layout.RR, self.params, self.grid).gamma_B

    @property
    def C_cell0(self) -> float:
        """No-relay cell throughput (bits/s) on this sample set."""
        if self._baseline is None:
            f = self.field(RelayLayout(0))
            self._baseline = capacity_report(f, 0.0, TauPolicy("fixed", 0.0), self.W, self.la).C_cell
        return self._baseline

    def report(self, layout: RelayLayout, policy: TauPolicy | None = None) -> CapacityReport:
        policy = self.policy if policy is None else policy
        f = self.field(layout)
        gamma_B = None
        if policy.kind == "backhaul" and policy.value is None and layout.n:
            gamma_B = self.backhaul_sinr(layout)
        rep = capacity_report(f, self.C_cell0, policy, self.W, self.la, gamma_B)
        rep.extra["backend"] = self.backend
        return rep

    def cell_capacity(self, layout: RelayLayout, policy: TauPolicy | None = None) -> float:
        return self.report(layout, policy).C_cell
