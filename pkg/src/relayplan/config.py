"""Experiment configuration: JSON in, validated dataclasses out."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path

from .capacity import TauPolicy
from .geometry import RelayLayout, build_grid
from .optimizer import AnnealingSchedule, SearchSpace
from .propagation import PropagationParams

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass
class GridConfig:
    Rc: float = 1.0
    rings: int = 10


@dataclass
class LayoutConfig:
    n: int = 3
    RR_over_Rc: float = 0.7
    phi_rad: float = 0.0
    PR_dbm: float = 31.0


@dataclass
class SamplingConfig:
    N: int = 10_000
    scheme: str = "grid"
    seed: int = 0


@dataclass
class SearchConfig:
    fix_n: int | None = None
    fix_PR: float | None = None
    # explicit grids; null keeps the default discretization
    n_values: list | None = None
    RR_over_Rc_values: list | None = None
    phi_rad_values: list | None = None
    PR_dbm_values: list | None = None


@dataclass
class AnnealingConfig:
    T0: float = 35.0
    alpha: float = 0.995
    iterations: int = 2000


@dataclass
class ValidationConfig:
    radii_over_Rc: list = field(default_factory=lambda: [0.4, 0.7, 1.0])
    distance_bins_over_Rc: list = field(default_factory=lambda: [round(0.1 * k, 10) for k in range(7)])


@dataclass
class ExperimentConfig:
    schema_version: int = SCHEMA_VERSION
    propagation: dict = field(default_factory=lambda: asdict_params(PropagationParams()))
    grid: GridConfig = field(default_factory=GridConfig)
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    annealing: AnnealingConfig = field(default_factory=AnnealingConfig)
    tau: str = "fixed:0"
    backend: str = "fluid"
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    validation: ValidationConfig = field(default_factory=ValidationConfig)
    seed: int = 0
    output_dir: str = "out"

    # built objects
    def params(self) -> PropagationParams:
        try:
            return PropagationParams(**self.propagation)
        except ValueError as e:
            raise ConfigError(f"propagation: {e}") from None

    def cell_grid(self):
        return build_grid(self.grid.Rc, self.grid.rings)

    def relay_layout(self) -> RelayLayout:
        L = self.layout
        return RelayLayout(n=L.n, RR=L.RR_over_Rc * self.grid.Rc, phi=L.phi_rad, PR_dbm=L.PR_dbm)

    def tau_policy(self) -> TauPolicy:
        return TauPolicy.parse(self.tau)

    def search_space(self) -> SearchSpace:
        S = self.search
        kw = {}
        for key, name in (("n_values", "n_values"), ("RR_values", "RR_over_Rc_values"),
                          ("phi_values", "phi_rad_values"), ("PR_values", "PR_dbm_values")):
            v = getattr(S, name)
            if v is not None:
                kw[key] = tuple(int(x) for x in v) if key == "n_values" else tuple(float(x) for x in v)
        space = SearchSpace(Rc=self.grid.Rc, **kw)
        if S.fix_n is not None:
            space = space.fixed(n=S.fix_n)
        if S.fix_PR is not None:
            space = space.fixed(PR=S.fix_PR)
        return space

    def schedule(self) -> AnnealingSchedule:
        a = self.annealing
        return AnnealingSchedule(T0=a.T0, alpha=a.alpha, iterations=a.iterations, seed=self.seed)

    def to_dict(self) -> dict:
        return asdict(self)

    def echo(self) -> dict:
        """Everything that determines results (the output location does not)."""
        d = self.to_dict()
        d.pop("output_dir")
        return d

    def to_json(self, echo: bool = False) -> str:
        return json.dumps(self.echo() if echo else self.to_dict(), sort_keys=True, indent=2)

    def validate(self) -> "ExperimentConfig":
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"schema_version: unsupported version {self.schema_version}")
        self.params()
        if not self.grid.Rc > 0:
            raise ConfigError("grid.Rc: must be positive")
        if self.grid.rings < 0:
            raise ConfigError("grid.rings: must be >= 0")
        L = self.layout
        if not 0 <= L.n <= 6:
            raise ConfigError("layout.n: must be in 0..6")
        if not 0 <= L.RR_over_Rc <= 1:
            raise ConfigError("layout.RR_over_Rc: must be in [0, 1]")
        if self.backend not in ("exact", "fluid"):
            raise ConfigError(f"backend: must be 'exact' or 'fluid', got {self.backend!r}")
        try:
            pol = self.tau_policy()
        except ValueError as e:
            raise ConfigError(f"tau: {e}") from None
        if pol.kind == "fixed" and not 0 <= pol.value <= 1:
            raise ConfigError("tau: fixed value must be in [0, 1]")
        if pol.kind == "backhaul" and pol.value is not None and not pol.value > 0:
            raise ConfigError("tau: backhaul capacity must be positive")
        if self.sampling.N < 1:
            raise ConfigError("sampling.N: must be >= 1")
        if self.sampling.scheme not in ("grid", "uniform"):
            raise ConfigError("sampling.scheme: must be 'grid' or 'uniform'")
        if self.search.fix_n is not None and (int(self.search.fix_n) != self.search.fix_n or not 0 <= self.search.fix_n <= 6):
            raise ConfigError("search.fix_n: must be in 0..6")
        S = self.search
        for name in ("n_values", "RR_over_Rc_values", "phi_rad_values", "PR_dbm_values"):
            v = getattr(S, name)
            if v is not None and (len(v) == 0 or any(b <= a for a, b in zip(v, v[1:]))):
                raise ConfigError(f"search.{name}: must be a non-empty increasing list")
        if S.n_values is not None and any(int(x) != x or not 0 <= x <= 6 for x in S.n_values):
            raise ConfigError("search.n_values: entries must be integers in 0..6")
        if S.RR_over_Rc_values is not None and any(not 0 <= x <= 1 for x in S.RR_over_Rc_values):
            raise ConfigError("search.RR_over_Rc_values: entries must be in [0, 1]")
        try:
            self.schedule()
        except ValueError as e:
            raise ConfigError(f"annealing: {e}") from None
        bins = self.validation.distance_bins_over_Rc
        if len(bins) < 2 or any(b <= a for a, b in zip(bins, bins[1:])):
            raise ConfigError("validation.distance_bins_over_Rc: must be strictly increasing")
        return self


def asdict_params(p: PropagationParams) -> dict:
    return {f.name: getattr(p, f.name) for f in fields(p)}


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_type(value, default, where):
    if value is None:
        if default is not None:
            raise ConfigError(f"{where}: must not be null")
        return
    if isinstance(default, str) and not isinstance(value, str):
        raise ConfigError(f"{where}: expected a string")
    if isinstance(default, list) and not (isinstance(value, list) and all(map(_is_number, value))):
        raise ConfigError(f"{where}: expected a list of numbers")
    if default is None and isinstance(value, list):
        if not all(map(_is_number, value)):
            raise ConfigError(f"{where}: expected a list of numbers")
        return
    if isinstance(default, (int, float)) or default is None:
        if not _is_number(value):
            raise ConfigError(f"{where}: expected a number")
        if isinstance(default, int) and not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")


def _build(cls, data, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    known = {f.name: f for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{path + '.' if path else ''}{key}: unknown key")
    kw = {}
    defaults = cls()
    for name, value in data.items():
        sub = getattr(defaults, name)
        where = f"{path + '.' if path else ''}{name}"
        if is_dataclass(sub):
            kw[name] = _build(type(sub), value, where)
        elif name == "propagation":
            if not isinstance(value, dict):
                raise ConfigError(f"{where}: expected an object")
            for k, v in value.items():
                if k not in sub:
                    raise ConfigError(f"{where}.{k}: unknown key")
                if v is not None and not _is_number(v):
                    raise ConfigError(f"{where}.{k}: expected a number")
            kw[name] = {**sub, **value}
        else:
            _check_type(value, sub, where)
            kw[name] = value
    return cls(**kw)


def from_dict(data: dict) -> ExperimentConfig:
    try:
        return _build(ExperimentConfig, data, "").validate()
    except TypeError as e:
        raise ConfigError(str(e)) from None


def read_json(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"config: cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config: invalid JSON in {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    return data


def load(path: str | Path) -> ExperimentConfig:
    return from_dict(read_json(path))
