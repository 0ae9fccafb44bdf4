"""Reproduction recipes shared by the CLI and the acceptance suite."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .capacity import TauPolicy
from .geometry import CellGrid, RelayLayout, UESampleSet
from .optimizer import EnergyFunction, ExhaustiveResult, SearchSpace, exhaustive_search
from .pipeline import Evaluator
from .propagation import PropagationParams
from .sinr_exact import ENB, exact_field
from .sinr_fluid import fluid_field
from .validation import EmpiricalCdf, empirical_cdf, ks_distance, mean_sinr_vs_distance


@dataclass
class BackendComparison:
    layout: RelayLayout
    cdf: dict = field(repr=False)  # (backend, "enb"|"relay") -> EmpiricalCdf
    ks_enb: float = float("nan")
    ks_relay: float = float("nan")
    server_agreement: float = float("nan")
    fields: dict = field(default_factory=dict, repr=False)


def compare_backends(layout: RelayLayout, grid: CellGrid, params: PropagationParams,
                     samples: UESampleSet) -> BackendComparison:
    """Fluid vs exact SINR CDFs for eNB-served and relay-served positions."""
    fields = {"exact": exact_field(samples.positions, layout, grid, params),
              "fluid": fluid_field(samples.positions, layout, grid, params)}
    cdf: dict[tuple[str, str], EmpiricalCdf] = {}
    for name, f in fields.items():
        g_db = 10 * np.log10(f.gamma)
        cdf[name, "enb"] = empirical_cdf(g_db[f.server == ENB])
        if layout.n:
            cdf[name, "relay"] = empirical_cdf(g_db[f.server >= 1])
    out = BackendComparison(layout=layout, cdf=cdf, fields=fields)
    out.ks_enb = ks_distance(cdf["exact", "enb"], cdf["fluid", "enb"])
    if layout.n:
        out.ks_relay = ks_distance(cdf["exact", "relay"], cdf["fluid", "relay"])
    out.server_agreement = float(np.mean(fields["exact"].server == fields["fluid"].server))
    return out


def relay_distance_curves(layout: RelayLayout, grid: CellGrid, params: PropagationParams,
                          samples: UESampleSet, edges) -> dict:
    """Mean relay-served SINR (dB) per bin of distance to the serving relay, per backend.

    ``edges`` are in units of Rc.
    """
    out = {}
    for name, fn in (("exact", exact_field), ("fluid", fluid_field)):
        f = fn(samples.positions, layout, grid, params)
        m = f.server >= 1
        out[name] = mean_sinr_vs_distance(f.server_dist[m] / grid.Rc, 10 * np.log10(f.gamma[m]), edges)
    return out


@dataclass
class PerNOptimum:
    n: int
    state: object
    layout: RelayLayout
    C_cell: float  # bits/s at tau = 0
    energy: float


def optimum_per_n(evaluator: Evaluator, space: SearchSpace, n_values=range(7)) -> dict[int, PerNOptimum]:
    """Exhaustive tau = 0 optimum for each relay count."""
    out = {}
    for n in n_values:
        sub = space.fixed(n=n)
        E = EnergyFunction(evaluator, sub, TauPolicy("fixed", 0.0))
        res = exhaustive_search(sub, E)
        s = res.best_state
        out[n] = PerNOptimum(n, s, sub.layout(s), -res.best_energy * evaluator.W, res.best_energy)
    return out


def omega_sweep(grid: CellGrid, params: PropagationParams, samples: UESampleSet, omegas,
                n: int = 6, PR_dbm: float = 20.0, P_dbm: float = 46.0, backend: str = "fluid",
                space: SearchSpace | None = None) -> dict[float, ExhaustiveResult]:
    """Optimal layouts as K_R / K varies, with n and relay power pinned."""
    space = SearchSpace.default(Rc=grid.Rc) if space is None else space
    sub = space.fixed(n=n, PR=PR_dbm)
    out = {}
    for w in omegas:
        p = replace(params, K_R=float(w) * params.K, P_dbm=P_dbm, PR_dbm=PR_dbm)
        ev = Evaluator(grid, p, samples, backend)
        out[float(w)] = exhaustive_search(sub, EnergyFunction(ev, sub, TauPolicy("fixed", 0.0)))
    return out
