"""Simulated annealing over the discretized relay configuration space.

A chain state keeps all four grid indices even when n = 0, so a move back to
n >= 1 restores the previous radius, offset and power. Such states share one
canonical configuration (and one energy); counting and exhaustive search work
on canonical configurations.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .capacity import TauPolicy
from .geometry import RelayLayout
from .pipeline import Evaluator

COORDS = ("n", "RR", "phi", "PR")


class State(NamedTuple):
    """Grid indices into the value lists of a :class:`SearchSpace`."""

    n: int
    RR: int
    phi: int
    PR: int


@dataclass(frozen=True)
class SearchSpace:
    n_values: tuple = tuple(range(7))
    RR_values: tuple = tuple(round(0.1 * k, 10) for k in range(11))  # in units of Rc
    phi_values: tuple = tuple(k * math.pi / 20 for k in range(11))
    PR_values: tuple = tuple(float(p) for p in range(18, 32))
    Rc: float = 1.0

    @classmethod
    def default(cls, Rc: float = 1.0, fix_n: int | None = None, fix_PR: float | None = None) -> "SearchSpace":
        s = cls(Rc=Rc)
        if fix_n is not None:
            s = s.fixed(n=fix_n)
        if fix_PR is not None:
            s = s.fixed(PR=fix_PR)
        return s

    def fixed(self, n: int | None = None, RR: float | None = None, phi: float | None = None,
              PR: float | None = None) -> "SearchSpace":
        """Copy with some coordinates pinned to a single value."""
        kw = {}
        if n is not None:
            if n not in range(7):
                raise ValueError(f"n must be in 0..6, got {n}")
            kw["n_values"] = (int(n),)
        if RR is not None:
            kw["RR_values"] = (float(RR),)
        if phi is not None:
            kw["phi_values"] = (float(phi),)
        if PR is not None:
            kw["PR_values"] = (float(PR),)
        return SearchSpace(**{**self.__dict__, **kw})

    def values(self, coord: str) -> tuple:
        return getattr(self, f"{coord}_values")

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return tuple(len(self.values(c)) for c in COORDS)

    def contains(self, s: State) -> bool:
        return all(0 <= v < m for v, m in zip(s, self.shape))

    def canonical(self, s: State) -> State:
        return State(s.n, 0, 0, 0) if self.n_values[s.n] == 0 else s

    def states(self):
        """Canonical configurations in a fixed order (n, RR, phi, PR)."""
        _, a, b, c = self.shape
        for ni, n in enumerate(self.n_values):
            if n == 0:
                yield State(ni, 0, 0, 0)
                continue
            for i in range(a):
                for j in range(b):
                    for k in range(c):
                        yield State(ni, i, j, k)

    @property
    def size(self) -> int:
        _, a, b, c = self.shape
        return sum(1 if n == 0 else a * b * c for n in self.n_values)

    def layout(self, s: State) -> RelayLayout:
        n = self.n_values[s.n]
        if n == 0:
            return RelayLayout(0)
        return RelayLayout(n=n, RR=self.RR_values[s.RR] * self.Rc, phi=self.phi_values[s.phi],
                           PR_dbm=self.PR_values[s.PR])

    def describe(self, s: State) -> dict:
        lay = self.layout(s)
        return {"n": lay.n, "RR_over_Rc": lay.RR / self.Rc, "phi_rad": lay.phi, "PR_dbm": lay.PR_dbm}

    def random_state(self, rng: np.random.Generator) -> State:
        return State(*(int(rng.integers(m)) for m in self.shape))


@dataclass(frozen=True)
class AnnealingSchedule:
    T0: float = 35.0
    alpha: float = 0.995
    iterations: int = 2000
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if not self.T0 > 0:
            raise ValueError("T0 must be positive")
        if self.iterations < 1:
            raise ValueError("need at least one iteration")

    def temperature(self, m: int) -> float:
        return self.T0 * self.alpha ** m


def propose(state: State, rng: np.random.Generator, space: SearchSpace) -> State:
    """Move one randomly chosen coordinate by one grid step.

    The coordinate is drawn uniformly among those with more than one value,
    then the direction with probability 1/2 each. A step past a bound leaves
    the state unchanged, which keeps the kernel symmetric.
    """
    movable = [i for i, m in enumerate(space.shape) if m > 1]
    if not movable:
        return state
    c = movable[int(rng.integers(len(movable)))]
    step = 1 if rng.random() < 0.5 else -1
    v = state[c] + step
    if not 0 <= v < space.shape[c]:
        return state
    return state._replace(**{COORDS[c]: v})


def neighbours(state: State, space: SearchSpace) -> list[State]:
    """Distinct states reachable by one proposal."""
    out = []
    for c, m in enumerate(space.shape):
        for step in (-1, 1):
            v = state[c] + step
            if 0 <= v < m:
                out.append(state._replace(**{COORDS[c]: v}))
    return out


def reachable(space: SearchSpace, start: State | None = None) -> set[State]:
    """Canonical configurations reachable from ``start`` through the proposal graph."""
    start = State(0, 0, 0, 0) if start is None else start
    seen = {start}
    todo = deque([start])
    while todo:
        s = todo.popleft()
        for t in neighbours(s, space):
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return {space.canonical(s) for s in seen}


def accept(delta_u: float, T: float, u: float) -> bool:
    """Metropolis rule: downhill always, uphill with probability exp(-dU/T)."""
    if delta_u <= 0:
        return True
    return u < math.exp(-delta_u / T)


class EnergyFunction:
    """U = -C_cell in bits/s/Hz, memoized by canonical configuration."""

    def __init__(self, evaluator: Evaluator, space: SearchSpace, policy: TauPolicy | None = None):
        self.evaluator = evaluator
        self.space = space
        self.policy = evaluator.policy if policy is None else policy
        self._memo: dict[State, float] = {}
        self._tau: dict[State, float] = {}

    def __call__(self, s: State) -> float:
        key = self.space.canonical(s)
        u = self._memo.get(key)
        if u is None:
            rep = self.evaluator.report(self.space.layout(key), self.policy)
            u = -rep.C_cell / self.evaluator.W
            self._memo[key] = u
            self._tau[key] = rep.tau_used
        return u

    def tau_used(self, s: State) -> float:
        """Resource split applied when ``s`` was evaluated."""
        key = self.space.canonical(s)
        if key not in self._tau:
            self(key)
        return self._tau[key]

    def report(self, s: State):
        return self.evaluator.report(self.space.layout(s), self.policy)

    @property
    def evaluations(self) -> int:
        return len(self._memo)


def energy(state: State, evaluator: Evaluator, space: SearchSpace, policy: TauPolicy | None = None) -> float:
    return EnergyFunction(evaluator, space, policy)(state)


class TraceRow(NamedTuple):
    iter: int
    temperature: float
    energy: float
    best_energy: float


@dataclass
class SAResult:
    best_state: State
    best_energy: float
    final_state: State
    trace: list[TraceRow] = field(repr=False)
    accepted: int = 0


def sa_search(space: SearchSpace, schedule: AnnealingSchedule, energy_fn: Callable[[State], float],
              start: State | None = None) -> SAResult:
    """Run one annealing chain; returns the best configuration ever visited."""
    rng = np.random.default_rng(schedule.seed)
    x = space.random_state(rng) if start is None else start
    if not space.contains(x):
        raise ValueError(f"start state {x} outside the search space")
    u = energy_fn(x)
    best, best_u = space.canonical(x), u
    trace = []
    accepted = 0
    for m in range(schedule.iterations):
        T = schedule.temperature(m)
        xi = propose(x, rng, space)
        du = energy_fn(xi) - u
        if accept(du, T, rng.random()):
            x, u = xi, u + du
            accepted += 1
            if u < best_u:
                best, best_u = space.canonical(x), u
        trace.append(TraceRow(m, T, u, best_u))
    return SAResult(best_state=best, best_energy=best_u, final_state=x, trace=trace, accepted=accepted)


@dataclass
class ExhaustiveResult:
    ranked: list[tuple[State, float]] = field(repr=False)

    @property
    def best_energy(self) -> float:
        return self.ranked[0][1]

    @property
    def best_state(self) -> State:
        return self.ranked[0][0]

    @property
    def optima(self) -> list[State]:
        """All configurations tied at the minimum energy."""
        u0 = self.best_energy
        return [s for s, u in self.ranked if u == u0]


def exhaustive_search(space: SearchSpace, energy_fn: Callable[[State], float]) -> ExhaustiveResult:
    """Energy of every canonical configuration, ranked by (U, enumeration order)."""
    rows = [(s, energy_fn(s)) for s in space.states()]
    order = sorted(range(len(rows)), key=lambda i: (rows[i][1], i))
    return ExhaustiveResult([rows[i] for i in order])
