"""Batch front-end: ``relayplan {evaluate,validate,optimize,exhaustive}``.

Every command writes into ``--out`` (default: the config's ``output_dir``):
the resolved configuration as ``config.json``, a JSON summary, and CSV
series. CSV files start with a ``# config=...`` comment line echoing the
resolved configuration; the remaining lines are plain CSV.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .capacity import TauPolicy
from .config import ConfigError, ExperimentConfig
from .experiments import compare_backends, optimum_per_n, relay_distance_curves
from .geometry import build_grid, sample_cell
from .optimizer import EnergyFunction, SearchSpace, exhaustive_search, sa_search
from .pipeline import Evaluator
from .sinr_exact import NoBackhaulError

log = logging.getLogger("relayplan")

CDF_COLUMNS = ("sinr_db", "fraction")
MEAN_COLUMNS = ("bin_center_over_Rc", "mean_sinr_db", "backend")
TRACE_COLUMNS = ("iter", "temperature", "energy", "best_energy")
STATE_COLUMNS = ("n", "RR_over_Rc", "phi_rad", "PR_dbm", "cell_capacity_bps", "tau_used")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"relayplan: config error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path: Path, columns, rows, cfg: ExperimentConfig) -> None:
    buf = io.StringIO()
    buf.write("# config=" + json.dumps(cfg.echo(), sort_keys=True, separators=(",", ":")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    path.write_text(buf.getvalue())


def read_csv(path) -> list[dict]:
    """Rows of a CSV written by this tool, skipping the config comment."""
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def read_config_echo(path) -> dict:
    first = Path(path).read_text().splitlines()[0]
    if not first.startswith("# config="):
        raise ValueError(f"{path} has no config header")
    return json.loads(first[len("# config="):])


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o)}")


def _sinr_summary(field_) -> dict:
    g = 10 * np.log10(field_.gamma)
    out = {"mean_db": float(g.mean())}
    for q in (0.02, 0.1, 0.5, 0.9):
        out[f"p{int(q * 100):02d}_db"] = float(np.quantile(g, q, method="inverted_cdf"))
    out["served"] = {"enb": int(np.sum(field_.server == 0)),
                     **{f"relay{j}": int(np.sum(field_.server == j)) for j in range(1, field_.n + 1)},
                     "excluded": int(np.sum(field_.server < 0))}
    return out


def _samples(cfg: ExperimentConfig, grid):
    s = cfg.sampling
    return sample_cell(grid, s.N, s.scheme, s.seed)


def _parse_sweep(text: str | None):
    if not text:
        return None, []
    key, _, vals = text.partition("=")
    key = key.strip()
    values = [float(v) for v in vals.split(",") if v.strip()] if vals else []
    return key, values


def cmd_evaluate(cfg: ExperimentConfig, out: Path, args) -> dict:
    grid = cfg.cell_grid()
    params = cfg.params()
    samples = _samples(cfg, grid)
    layout = cfg.relay_layout()
    policy = cfg.tau_policy()
    backends = ["exact", "fluid"] if args.compare else [cfg.backend]
    result = {"config": cfg.echo(), "layout": asdict(layout), "reports": {}}
    for be in backends:
        ev = Evaluator(grid, params, samples, be, policy)
        rep = ev.report(layout)
        entry = rep.to_dict()
        entry["sinr"] = _sinr_summary(ev.field(layout))
        if layout.n:
            entry["gamma_B_db"] = float(10 * np.log10(ev.backhaul_sinr(layout)))
        result["reports"][be] = entry
    write_json(out / "report.json", result)
    return result


def cmd_validate(cfg: ExperimentConfig, out: Path, args) -> dict:
    grid = cfg.cell_grid()
    params = cfg.params()
    samples = _samples(cfg, grid)
    layout = cfg.relay_layout()
    cmp = compare_backends(layout, grid, params, samples)
    for (backend, cls), cdf in sorted(cmp.cdf.items()):
        v, f = cdf.steps()
        write_csv(out / f"cdf_{cls}_{backend}.csv", CDF_COLUMNS, zip(v, f), cfg)
    rows = []
    curves = {}
    for rr in cfg.validation.radii_over_Rc:
        lay = replace(layout, RR=rr * grid.Rc)
        if lay.n == 0:
            break
        c = relay_distance_curves(lay, grid, params, samples, cfg.validation.distance_bins_over_Rc)
        curves[rr] = {be: [None if np.isnan(m) else float(m) for m in bm.mean] for be, bm in c.items()}
        for be, bm in c.items():
            for x, m, k in zip(bm.centers, bm.mean, bm.count):
                if k:
                    rows.append((x, m, f"{be}:RR={rr:g}"))
    if rows:
        write_csv(out / "mean_vs_dist.csv", MEAN_COLUMNS, rows, cfg)
    summary = {"config": cfg.echo(), "ks_enb": cmp.ks_enb,
               "ks_relay": None if np.isnan(cmp.ks_relay) else cmp.ks_relay,
               "server_agreement": cmp.server_agreement, "mean_vs_dist": {f"{k:g}": v for k, v in curves.items()}}
    key, values = _parse_sweep(args.sweep)
    if key == "rings":
        ref = compare_backends(layout, grid, params, samples).cdf
        conv = {}
        for r in values:
            g2 = build_grid(grid.Rc, int(r))
            c2 = compare_backends(layout, g2, params, samples)
            conv[str(int(r))] = {cls: float(_ks(ref["exact", cls], c2.cdf["exact", cls]))
                                 for cls in ("enb", "relay") if ("exact", cls) in c2.cdf}
        summary["rings_convergence_ks"] = conv
    elif key:
        raise ConfigError(f"--sweep: unsupported key {key!r} for validate (use rings=...)")
    write_json(out / "summary.json", summary)
    return summary


def _ks(a, b):
    from .validation import ks_distance
    return ks_distance(a, b)


def _state_row(space, s, energy, W, tau):
    d = space.describe(s)
    return (d["n"], d["RR_over_Rc"], d["phi_rad"], d["PR_dbm"], -energy * W, tau)


def _optimize_once(cfg, grid, params, samples, space, policy, out: Path, tag: str = ""):
    ev = Evaluator(grid, params, samples, cfg.backend, policy)
    E = EnergyFunction(ev, space, policy)
    res = sa_search(space, cfg.schedule(), E)
    write_csv(out / f"trace{tag}.csv", TRACE_COLUMNS, res.trace, cfg)
    rep = E.report(res.best_state)
    return {"best": space.describe(res.best_state), "best_energy": res.best_energy,
            "report": rep.to_dict(), "accepted": res.accepted, "evaluations": E.evaluations}


def cmd_optimize(cfg: ExperimentConfig, out: Path, args) -> dict:
    grid = cfg.cell_grid()
    params = cfg.params()
    samples = _samples(cfg, grid)
    space = cfg.search_space()
    policy = cfg.tau_policy()
    key, values = _parse_sweep(args.sweep)
    result = {"config": cfg.echo()}
    if key is None:
        result.update(_optimize_once(cfg, grid, params, samples, space, policy, out))
    elif key == "omega_R":
        rows, runs = [], {}
        for w in values:
            p = replace(params, K_R=w * params.K)
            r = _optimize_once(cfg, grid, p, samples, space, policy, out, tag=f"_omega_R={w:g}")
            runs[f"{w:g}"] = r
            b = r["best"]
            rows.append((w, b["n"], b["RR_over_Rc"], b["phi_rad"], b["PR_dbm"], r["report"]["C_cell"]))
        write_csv(out / "sweep_omega_R.csv",
                  ("omega_R", "n", "RR_over_Rc", "phi_rad", "PR_dbm", "cell_capacity_bps"), rows, cfg)
        result["sweep"] = runs
    elif key == "tau_star":
        ev = Evaluator(grid, params, samples, cfg.backend, policy)
        best = optimum_per_n(ev, SearchSpace.default(Rc=grid.Rc, fix_PR=cfg.search.fix_PR))
        rows = []
        for n, o in best.items():
            rep = ev.report(o.layout, TauPolicy("star", None))
            rows.append((n, o.layout.RR / grid.Rc, o.layout.phi, o.layout.PR_dbm, o.C_cell,
                         0.0 if n == 0 else rep.tau_star))
        write_csv(out / "tau_star.csv",
                  ("n", "RR_over_Rc", "phi_rad", "PR_dbm", "cell_capacity_bps", "tau_star"), rows, cfg)
        result["tau_star"] = {str(r[0]): r[-1] for r in rows}
        result["C_cell0"] = ev.C_cell0
    else:
        raise ConfigError(f"--sweep: unsupported key {key!r} for optimize (use omega_R=... or tau_star)")
    write_json(out / "best.json", result)
    return result


def cmd_exhaustive(cfg: ExperimentConfig, out: Path, args) -> dict:
    grid = cfg.cell_grid()
    params = cfg.params()
    samples = _samples(cfg, grid)
    space = cfg.search_space()
    policy = cfg.tau_policy()
    key, values = _parse_sweep(args.sweep)
    if key not in (None, "omega_R"):
        raise ConfigError(f"--sweep: unsupported key {key!r} for exhaustive (use omega_R=...)")
    runs = [(None, params)] if key is None else [(w, replace(params, K_R=w * params.K)) for w in values]
    result = {"config": cfg.echo(), "runs": {}}
    for w, p in runs:
        ev = Evaluator(grid, p, samples, cfg.backend, policy)
        E = EnergyFunction(ev, space, policy)
        res = exhaustive_search(space, E)
        rows = [_state_row(space, s, u, ev.W, E.tau_used(s)) for s, u in res.ranked]
        tag = "" if w is None else f"_omega_R={w:g}"
        write_csv(out / f"states{tag}.csv", STATE_COLUMNS, rows, cfg)
        result["runs"]["default" if w is None else f"{w:g}"] = {
            "best": space.describe(res.best_state), "best_energy": res.best_energy,
            "optima": [space.describe(s) for s in res.optima], "size": space.size,
        }
    write_json(out / "exhaustive.json", result)
    return result


COMMANDS = {"evaluate": cmd_evaluate, "validate": cmd_validate, "optimize": cmd_optimize,
            "exhaustive": cmd_exhaustive}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="relayplan", description="Relay placement planning with fluid-model SINR.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="JSON experiment configuration")
    p.add_argument("--backend", choices=("exact", "fluid"))
    p.add_argument("--seed", type=int, help="SA seed")
    p.add_argument("--fix-n", type=int, dest="fix_n", help="pin the relay count")
    p.add_argument("--tau", help="fixed:X | star | backhaul:CB | backhaul:sinr")
    p.add_argument("--sweep", help="KEY=V1,V2,... (omega_R, rings) or tau_star")
    p.add_argument("--samples", type=int, help="override sampling.N")
    p.add_argument("--compare", action="store_true", help="evaluate: emit both backends")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args) -> ExperimentConfig:
    data = cfgmod.read_json(args.config) if args.config else {}
    for flag, key in (("backend", "backend"), ("seed", "seed"), ("tau", "tau")):
        v = getattr(args, flag)
        if v is not None:
            data[key] = v
    if args.fix_n is not None:
        data.setdefault("search", {})["fix_n"] = args.fix_n
    if args.samples is not None:
        data.setdefault("sampling", {})["N"] = args.samples
    if args.out is not None:
        data["output_dir"] = str(args.out)
    return cfgmod.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as e:
        print(f"relayplan: config error: {e}", file=sys.stderr)
        return 1
    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(cfg.to_json(echo=True) + "\n")
        result = COMMANDS[args.command](cfg, out, args)
    except ConfigError as e:
        print(f"relayplan: config error: {e}", file=sys.stderr)
        return 1
    except (NoBackhaulError, ValueError, ArithmeticError, OSError) as e:
        print(f"relayplan: error: {e}", file=sys.stderr)
        return 2
    log.info(json.dumps({k: v for k, v in result.items() if k != "config"}, default=_json_default)[:2000])
    return 0


if __name__ == "__main__":
    sys.exit(main())
