"""Command-line front end: JSON-configured, deterministic file outputs.

Every run writes its tabular results plus a ``manifest.json`` holding the
fully resolved configuration and the package version; re-running any
subcommand from a manifest reproduces the output files byte for byte.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
import jsonschema

from . import __version__
from .correlator import g2_cross
from .liouville import emission_spectrum, liouvillian_matrix, transition_energies
from .modelkit import build_driven_2ls
from .opalg import annihilation, basis_state, embed
from .scenarios import (
    MollowConfig,
    build_system,
    default_polariton_spec,
    entanglement_map,
    optimal_detuning,
    optimal_drive,
    optimal_map,
    polariton_study,
    sideband_frequencies,
    write_sweep_csv,
)
from .trajec import click_statistics, delay_histogram, heralding_ratio, run_ensemble


class ConfigError(ValueError):
    pass


_NUM = {"type": "number"}
_POSNUM = {"type": "number", "exclusiveMinimum": 0}
_NULLNUM = {"type": ["number", "null"]}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["system"],
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "threads": {"type": "integer", "minimum": 0},  # 0 = all cores
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["omega_drive", "delta"],
            "properties": {
                "omega_drive": {"type": "number", "minimum": 0},
                "delta": _NUM,
                "gamma": _POSNUM,
                "Gamma": _POSNUM,
                "omega1": _NULLNUM,
                "omega2": _NULLNUM,
                "truncation": {"type": "integer", "minimum": 2},
                "lam": {"type": "number", "minimum": 0, "maximum": 1},
                "kappa": {"type": "number", "minimum": 0, "maximum": 1},
                "epsilon": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
            },
        },
        "spectrum": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "omega_min": _NUM, "omega_max": _NUM,
                "points": {"type": "integer", "minimum": 3},
            },
        },
        "lines": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "omega_drive_min": {"type": "number", "minimum": 0},
                "omega_drive_max": _POSNUM,
                "points": {"type": "integer", "minimum": 2},
                "weighted": {"type": "boolean"},
            },
        },
        "g2": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tau_max": _POSNUM,
                "points": {"type": "integer", "minimum": 3},
            },
        },
        "mc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "trajectories": {"type": "integer", "minimum": 1},
                "duration": _POSNUM,
                "burn_in": {"type": "number", "minimum": 0},
                "kappa": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "tau_max": _POSNUM,
                "tau_points": {"type": "integer", "minimum": 2},
                "herald": {"type": "string"},
                "signal": {"type": "string"},
                "resonant_reference": {"type": "boolean"},
                "histogram_bins": {"type": "integer", "minimum": 2},
                "histogram_tau_max": _POSNUM,
                "dump_clicks": {"type": "boolean"},
            },
        },
        "map": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["delta_scan", "optimal"]},
                "omega_min": _POSNUM, "omega_max": _POSNUM,
                "omega_points": {"type": "integer", "minimum": 1},
                "log_omega": {"type": "boolean"},
                "delta_min": _NUM, "delta_max": _NUM,
                "delta_points": {"type": "integer", "minimum": 1},
                "Gamma_min": _POSNUM, "Gamma_max": _POSNUM,
                "Gamma_points": {"type": "integer", "minimum": 1},
                "log_Gamma": {"type": "boolean"},
                "with_bell": {"type": "boolean"},
            },
        },
        "optimal": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "variable": {"enum": ["delta", "omega_drive"]},
                "range": {"type": ["array", "null"], "items": _NUM,
                          "minItems": 2, "maxItems": 2},
            },
        },
        "polariton": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "g": _POSNUM,
                "Gamma_a": _POSNUM,
                "Gamma_b": _NULLNUM,
                "truncation": {"type": "integer", "minimum": 2},
            },
        },
    },
}

DEFAULTS = {
    "seed": 12345,
    "threads": 0,  # 0 -> all cores, resolved at run time
    "system": {"gamma": 1.0, "Gamma": 0.1, "omega1": None, "omega2": None,
               "truncation": 4, "lam": 0.5, "kappa": 0.0, "epsilon": 1.0},
    "spectrum": {"omega_min": -12.0, "omega_max": 12.0, "points": 801},
    "lines": {"omega_drive_min": 0.0, "omega_drive_max": 8.0, "points": 81,
              "weighted": True},
    "g2": {"tau_max": 20.0, "points": 401},
    "mc": {"trajectories": 20000, "duration": 200.0, "burn_in": 10.0,
           "kappa": 0.5, "tau_max": 6.0, "tau_points": 60,
           "herald": "a2_res", "signal": "a1_res", "resonant_reference": True,
           "histogram_bins": 50, "histogram_tau_max": 10.0,
           "dump_clicks": False},
    "map": {"mode": "delta_scan", "omega_min": 0.5, "omega_max": 10.0,
            "omega_points": 21, "log_omega": False,
            "delta_min": -20.0, "delta_max": 20.0, "delta_points": 21,
            "Gamma_min": 0.1, "Gamma_max": 10.0, "Gamma_points": 21,
            "log_Gamma": True, "with_bell": False},
    "optimal": {"variable": "delta", "range": None},
    "polariton": {"g": 300.0, "Gamma_a": 10.0, "Gamma_b": None, "truncation": 4},
}


def _merge_defaults(user: dict) -> dict:
    out = copy.deepcopy(DEFAULTS)
    for key, val in user.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key].update(val)
        else:
            out[key] = val
    return out


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if isinstance(doc, dict) and "config" in doc and "command" in doc:
        doc = doc["config"]  # rerun from a manifest
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {loc}: {exc.message}") from exc
    return _merge_defaults(doc)


def _system_config(cfg: dict, **overrides) -> MollowConfig:
    sys_cfg = dict(cfg["system"])
    sys_cfg.update(overrides)
    return MollowConfig(**sys_cfg)


def _write_manifest(out: Path, command: str, cfg: dict) -> None:
    doc = {"command": command, "version": __version__, "config": cfg}
    (out / "manifest.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(
                ("nan" if math.isnan(v) else repr(v)) if isinstance(v, float)
                else str(v) for v in row) + "\n")


def cmd_spectrum(cfg: dict, out: Path) -> None:
    sc = cfg["spectrum"]
    mcfg = _system_config(cfg)
    model = build_driven_2ls(mcfg.delta, mcfg.omega_drive, mcfg.gamma)
    sigma = model.channel("sigma").collapse
    grid = np.linspace(sc["omega_min"], sc["omega_max"], sc["points"])
    table = emission_spectrum(model, sigma, grid)
    table.to_csv(out / "spectrum.csv")
    (out / "summary.json").write_text(json.dumps(
        {"coherent_weight": table.coherent_weight}, indent=2, sort_keys=True) + "\n")


def cmd_lines(cfg: dict, out: Path) -> None:
    lc = cfg["lines"]
    mcfg = _system_config(cfg)
    omegas = np.linspace(lc["omega_drive_min"], lc["omega_drive_max"], lc["points"])
    rows = []
    for om in omegas:
        model = build_driven_2ls(mcfg.delta, float(om), mcfg.gamma)
        weight = model.channel("sigma").collapse if lc["weighted"] else None
        lines = transition_energies(liouvillian_matrix(model), weight_op=weight)
        for e in lines:
            rows.append((float(om), float(e)))
    _write_csv(out / "lines.csv", "omega_drive,line_energy", rows)


def cmd_g2(cfg: dict, out: Path) -> None:
    gc = cfg["g2"]
    mcfg = _system_config(cfg)
    model = build_system(mcfg)
    lay = model.layout
    a1 = embed(annihilation(mcfg.truncation), lay, "a1")
    a2 = embed(annihilation(mcfg.truncation), lay, "a2")
    taus = np.linspace(-gc["tau_max"], gc["tau_max"], gc["points"])
    curve = g2_cross(model, a1, a2, taus)
    curve.to_csv(out / "g2.csv")


def cmd_mc(cfg: dict, out: Path) -> None:
    mc = cfg["mc"]
    threads = _threads(cfg)
    seed = int(cfg["seed"])
    tau = np.linspace(mc["tau_max"] / mc["tau_points"], mc["tau_max"],
                      mc["tau_points"])
    runs = [("detuned", None)]
    if mc["resonant_reference"]:
        runs.append(("resonant", 0.0))
    stats = {}
    for tag, delta_override in runs:
        mcfg = _system_config(cfg, kappa=mc["kappa"],
                              **({} if delta_override is None
                                 else {"delta": delta_override}))
        model = build_system(mcfg)
        for label in (mc["herald"], mc["signal"]):
            if label not in model.channel_labels:
                raise ConfigError(
                    f"channel {label!r} not present (channels: "
                    f"{model.channel_labels}); mc needs kappa > 0 for "
                    "detector absorption channels")
        psi0 = basis_state(model.layout, [0] * len(model.layout.dims))
        batch = run_ensemble(model, psi0, mc["duration"], mc["trajectories"],
                             seed, threads=threads)
        stats[tag] = click_statistics(batch, mc["herald"], mc["signal"], tau,
                                      burn_in=mc["burn_in"])
        stats[tag].to_csv(out / f"mc_{tag}.csv")
        if mc["dump_clicks"]:
            batch.write_jsonl(out / f"clicks_{tag}.jsonl")
        if tag == "detuned":
            edges = np.linspace(-mc["histogram_tau_max"], mc["histogram_tau_max"],
                                mc["histogram_bins"] + 1)
            hist = delay_histogram(batch, "a1_res", "a2_res", edges,
                                   burn_in=mc["burn_in"])
            _write_csv(out / "mc_g2_histogram.csv",
                       "tau_gamma,g2_mc,stderr,pairs",
                       zip(hist.centers.tolist(), hist.g2.tolist(),
                           hist.stderr.tolist(), hist.pairs.tolist()))
            lay = model.layout
            a1 = embed(annihilation(mcfg.truncation), lay, "a1")
            a2 = embed(annihilation(mcfg.truncation), lay, "a2")
            fine = np.linspace(edges[0], edges[-1], 10 * mc["histogram_bins"] + 1)
            g2_cross(model, a1, a2, fine).to_csv(out / "g2_regression.csv")
    if mc["resonant_reference"]:
        r1 = heralding_ratio(stats["detuned"], stats["resonant"], 1)
        r2p = heralding_ratio(stats["detuned"], stats["resonant"], "2plus")
        r1.to_csv(out / "mc_r1.csv", value_column="r1")
        r2p.to_csv(out / "mc_r2plus.csv", value_column="r2plus")


def cmd_map(cfg: dict, out: Path) -> None:
    mp = cfg["map"]
    threads = _threads(cfg)
    base = _system_config(cfg)
    space = np.geomspace if mp["log_omega"] else np.linspace
    omegas = space(mp["omega_min"], mp["omega_max"], mp["omega_points"])
    if mp["mode"] == "delta_scan":
        deltas = np.linspace(mp["delta_min"], mp["delta_max"], mp["delta_points"])
        rows = entanglement_map(omegas, deltas, base.Gamma, base=base,
                                with_bell=mp["with_bell"], threads=threads)
    else:
        gspace = np.geomspace if mp["log_Gamma"] else np.linspace
        gammas = gspace(mp["Gamma_min"], mp["Gamma_max"], mp["Gamma_points"])
        rows = optimal_map(omegas, gammas, base=base,
                           with_bell=mp["with_bell"], threads=threads)
    write_sweep_csv(rows, out / "map.csv")


def cmd_optimal(cfg: dict, out: Path) -> None:
    oc = cfg["optimal"]
    base = _system_config(cfg)
    rng = tuple(oc["range"]) if oc["range"] else None
    if oc["variable"] == "delta":
        arg, n_max = optimal_detuning(base.omega_drive, base.Gamma, rng, base=base)
    else:
        arg, n_max = optimal_drive(base.delta, base.Gamma, rng, base=base)
    doc = {"variable": oc["variable"], "argmax": None if math.isnan(arg) else arg,
           "max_negativity": n_max,
           "omega_drive": base.omega_drive, "delta": base.delta,
           "Gamma": base.Gamma}
    (out / "optimal.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _matrix_json(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def cmd_polariton(cfg: dict, out: Path) -> None:
    pc = cfg["polariton"]
    base = _system_config(cfg)
    pol = default_polariton_spec(base, g=pc["g"], Gamma_a=pc["Gamma_a"],
                                 Gamma_b=pc["Gamma_b"], truncation=pc["truncation"])
    study = polariton_study(pol, base)
    doc = {
        "concurrence_before_postselection": study.concurrence_before,
        "concurrence_after_postselection": study.concurrence_after,
        "theta_before": _matrix_json(study.theta_before),
        "theta_after": _matrix_json(study.theta_after),
        "basis": ["00", "10", "01", "11"],
        "bell_report": {
            "bell_kind": study.bell.bell_kind,
            "bell_weight": study.bell.bell_weight,
            "vacuum_weight": study.bell.vacuum_weight,
            "fidelity_to_model": study.bell.fidelity_to_model,
            "overlap_to_model": study.bell.overlap_to_model,
            "fidelity_block": study.bell.fidelity_block,
            "bell_purity": study.bell.bell_purity,
            "postselected_purity": study.bell.postselected_purity,
        },
        "fidelity_model_after_postselection": study.fidelity_model_after,
        "psi_minus_overlap": study.psi_minus_overlap,
        "top_populations": study.top_populations,
        "branch_frequencies": list(pol.branch_frequencies()),
        "sidebands": list(sideband_frequencies(base.delta, base.omega_drive)),
    }
    (out / "polariton.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


COMMANDS = {
    "spectrum": cmd_spectrum,
    "lines": cmd_lines,
    "g2": cmd_g2,
    "mc": cmd_mc,
    "map": cmd_map,
    "optimal": cmd_optimal,
    "polariton": cmd_polariton,
}


def _threads(cfg: dict) -> int:
    t = int(cfg["threads"])
    return t if t > 0 else (os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mollow",
        description="Driven-emitter sideband entanglement simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config (or manifest)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--trajectories", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be >= 1")
            cfg["threads"] = args.threads
        if args.trajectories is not None:
            if args.trajectories < 1:
                raise ConfigError("--trajectories must be >= 1")
            cfg["mc"]["trajectories"] = args.trajectories
        jsonschema.validate(cfg, SCHEMA)
    except (ConfigError, jsonschema.ValidationError) as exc:
        json.dump({"error": "config", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, out)
        _write_manifest(out, args.command, cfg)
    except ConfigError as exc:
        json.dump({"error": "config", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except Exception as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
