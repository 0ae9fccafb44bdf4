"""Relay placement planning for hexagonal LTE downlinks.

SINR fields from exact lattice sums or a fluid (continuum) interference
model, link-adaptation capacity, and simulated-annealing search over relay
count, radius, angular offset and transmit power.
"""
from .capacity import (CapacityReport, LinkAdaptation, TauPolicy, capacity_report, cell_capacity,
                       node_capacities, tau_backhaul, tau_star)
from .geometry import CellGrid, RelayLayout, UESampleSet, build_grid, place_relays, sample_cell
from .optimizer import (AnnealingSchedule, EnergyFunction, SearchSpace, State, exhaustive_search,
                        sa_search)
from .pipeline import Evaluator
from .propagation import LinkType, PropagationParams
from .sinr_exact import exact_field, sinr_backhaul_exact, sinr_enb_exact, sinr_relay_exact
from .sinr_fluid import fluid_field, sinr_backhaul_fluid, sinr_enb_fluid, sinr_relay_fluid

__version__ = "0.1.0"

__all__ = [
    "AnnealingSchedule", "CapacityReport", "CellGrid", "EnergyFunction", "Evaluator", "LinkAdaptation",
    "LinkType", "PropagationParams", "RelayLayout", "SearchSpace", "State", "TauPolicy", "UESampleSet",
    "build_grid", "capacity_report", "cell_capacity", "exact_field", "exhaustive_search", "fluid_field",
    "node_capacities", "place_relays", "sa_search", "sample_cell", "sinr_backhaul_exact",
    "sinr_backhaul_fluid", "sinr_enb_exact", "sinr_enb_fluid", "sinr_relay_exact", "sinr_relay_fluid",
    "tau_backhaul", "tau_star",
]
