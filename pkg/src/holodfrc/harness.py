"""Experiment harness: scenario files, paired-seed runs, sweeps, CSV output.

Seed discipline: a master seed spawns one channel seed per trial (shared by
every mode inside that trial, so mode comparisons are paired on identical
channel realizations) and one initialization seed per trial (shared across
modes as well, so e.g. the fixed random phases of the random-reflector mode
equal the starting phases of the optimized-reflector mode).

All emitted files are pure functions of (scenario, CLI arguments): wall-clock
timings are kept out of CSV and JSON payloads so identical invocations are
byte identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .model import SystemModel
from .orchestrator import MODES, am_loop
from .scenario import ScenarioConfig, db_to_linear, dbm_to_watts

SWEEP_PARAMETERS = ("power_dbw", "eps_dir", "n_ris_side", "n_rhs_side",
                    "eta_db", "num_users")

# dB-scaled convenience keys accepted in scenario files, resolved to linear
# config fields at the parsing boundary.
_DB_KEYS = {
    "power_dbw": ("power_per_subcarrier_w", db_to_linear),
    "eta_db": ("comm_threshold", db_to_linear),
    "k0_db": ("pathloss_ref", db_to_linear),
    "noise_radar_dbm": ("noise_radar_w", dbm_to_watts),
    "noise_comm_dbm": ("noise_comm_w", dbm_to_watts),
}

# Sweep-style experiments default to the smaller transmit surface used in the
# parameter studies; convergence experiments keep the larger default.
_SWEEP_PROFILE_DEFAULTS = {"n_rhs_side": 4}


@dataclass
class SweepSpec:
    parameter: str
    values: list
    trials: int = 20
    modes: list = field(default_factory=lambda: list(MODES.values()))

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}; "
                             f"choose from {SWEEP_PARAMETERS}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class RunRecord:
    scenario_hash: str
    seed: int
    mode: str
    parameter: str
    value: float
    report: dict
    iterations: int
    converged: bool
    wall_s: float  # informational only; never serialized

    def to_dict(self) -> dict:
        return {
            "scenario_hash": self.scenario_hash,
            "seed": self.seed,
            "mode": self.mode,
            "parameter": self.parameter,
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
            **self.report,
        }


_OPTIONAL_FLOATS = {"d_rhs", "d_ris", "d_ue"}


def _coerce(key: str, value):
    """Coerce scalar scenario values to the field's numeric type.

    YAML 1.1 reads unsigned exponents like 1.0e9 as strings; coercion keyed
    on each field's default keeps such inputs usable.
    """
    if value is None or isinstance(value, (list, tuple, dict)):
        return value
    if key in _OPTIONAL_FLOATS:
        return float(value)
    default = ScenarioConfig.__dataclass_fields__[key].default
    if isinstance(default, bool):
        return bool(value)
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def _flatten(tree: dict, out: dict, context: str) -> None:
    for key, value in tree.items():
        if isinstance(value, dict):
            _flatten(value, out, f"{context}{key}.")
        else:
            if key in out:
                raise ValueError(f"duplicate scenario key {context}{key}")
            out[key] = value


def load_scenario(path=None, profile: str = "convergence") -> ScenarioConfig:
    """Parse a YAML scenario file into a full configuration.

    Nested sections are organizational only; leaf keys must be config fields
    or one of the dB convenience keys.  Unknown keys are rejected.  An empty
    or missing file yields the built-in default scenario.
    """
    raw: dict = {}
    if path is not None:
        text = Path(path).read_text()
        tree = yaml.safe_load(text)
        if tree is None:
            tree = {}
        if not isinstance(tree, dict):
            raise ValueError(f"scenario file {path} must be a mapping")
        _flatten(tree, raw, "")

    known = set(ScenarioConfig.__dataclass_fields__)
    kwargs: dict = {}
    for key, value in raw.items():
        if key in _DB_KEYS:
            target, conv = _DB_KEYS[key]
            kwargs[target] = conv(float(value))
        elif key in known:
            kwargs[key] = _coerce(key, value)
        else:
            raise ValueError(f"unknown scenario key {key!r}")
    if profile == "sweep":
        for key, value in _SWEEP_PROFILE_DEFAULTS.items():
            explicit = key in kwargs or any(k in raw for k, (t, _) in _DB_KEYS.items()
                                            if t == key)
            if not explicit:
                kwargs[key] = value
    elif profile != "convergence":
        raise ValueError(f"unknown profile {profile!r}")
    return ScenarioConfig(**kwargs)


def channel_seed(master: int, trial: int) -> int:
    ss = np.random.SeedSequence(entropy=master, spawn_key=(trial, 0))
    return int(ss.generate_state(1)[0])


def init_seed(master: int, trial: int) -> int:
    ss = np.random.SeedSequence(entropy=master, spawn_key=(trial, 1))
    return int(ss.generate_state(1)[0])


def apply_sweep_value(cfg: ScenarioConfig, parameter: str, value) -> ScenarioConfig:
    if parameter == "power_dbw":
        return cfg.replace(power_per_subcarrier_w=db_to_linear(float(value)))
    if parameter == "eps_dir":
        return cfg.replace(eps_dir=float(value))
    if parameter == "n_ris_side":
        return cfg.replace(n_ris_side=int(value))
    if parameter == "n_rhs_side":
        return cfg.replace(n_rhs_side=int(value))
    if parameter == "eta_db":
        return cfg.replace(comm_threshold=db_to_linear(float(value)))
    if parameter == "num_users":
        n = int(value)
        users = list(cfg.p_users)
        base = users[0]
        while len(users) < n:  # extend the user cluster westward, 1 m steps
            users.append((base[0] - (len(users) - len(cfg.p_users) + 1),
                          base[1], base[2]))
        return cfg.replace(p_users=tuple(users[:n]),
                           n_feeds=max(cfg.n_feeds, n))
    raise ValueError(f"unknown sweep parameter {parameter!r}")


def run_modes(cfg: ScenarioConfig, modes, master_seed: int, trial: int,
              parameter: str = "", value: float = 0.0):
    """Run each mode on one shared channel realization; paired initialization."""
    model = SystemModel.build(cfg, seed=channel_seed(master_seed, trial))
    results = {}
    for mode in modes:
        rng = np.random.default_rng(init_seed(master_seed, trial))
        out = am_loop(model, mode, rng=rng)
        wall = sum(row.wall_ms for row in out.trace) / 1e3
        record = RunRecord(
            scenario_hash=cfg.canonical_hash(), seed=master_seed, mode=mode.name,
            parameter=parameter, value=float(value),
            report=out.report.to_dict(), iterations=out.iterations,
            converged=out.converged, wall_s=wall)
        results[mode.name] = (out, record)
    return results


def run_convergence(cfg: ScenarioConfig, modes, seed: int, out_dir=None):
    """One shared-channel convergence run per mode; optional CSV emission."""
    results = run_modes(cfg, modes, seed, trial=0)
    n_t, n_u = cfg.n_targets, cfg.n_users
    header = (["mode", "outer_iter", "min_radar_sinr_db"]
              + [f"radar_sinr_db_t{t + 1}" for t in range(n_t)]
              + [f"comm_sinr_db_u{u + 1}" for u in range(n_u)]
              + ["phase_accepted"])
    rows = []
    for mode in modes:
        out, _ = results[mode.name]
        for tr in out.trace:
            rows.append([mode.name, tr.outer_iter, tr.min_radar_db,
                         *tr.radar_db, *tr.comm_db, int(tr.phase_accepted)])
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        emit_csv(header, rows, out_dir / "convergence.csv")
        write_report([rec for _, rec in results.values()], out_dir / "report.json")
    return results, header, rows


def run_sweep(cfg: ScenarioConfig, spec: SweepSpec, seed: int, out_dir=None):
    """Monte-Carlo sweep: channels are redrawn per trial, paired across modes
    and parameter values; aggregates are emitted per (mode, value)."""
    header = ["parameter", "value", "mode", "aggregate", "trials",
              "min_radar_sinr_db", "worst_comm_sinr_db"]
    rows = []
    records = []
    for value in spec.values:
        cfg_v = apply_sweep_value(cfg, spec.parameter, value)
        per_mode: dict = {m.name: ([], []) for m in spec.modes}
        for trial in range(spec.trials):
            results = run_modes(cfg_v, spec.modes, seed, trial,
                                parameter=spec.parameter, value=float(value))
            for mode in spec.modes:
                out, rec = results[mode.name]
                records.append(rec)
                radar_db, comm_db = per_mode[mode.name]
                radar_db.append(rec.report["min_radar_sinr_db"])
                comm_db.append(min(rec.report["comm_sum_avg_sinr_db"]))
        for mode in spec.modes:
            radar_db, comm_db = per_mode[mode.name]
            for agg, fn in (("mean", np.mean), ("stddev", np.std)):
                rows.append([spec.parameter, float(value), mode.name, agg,
                             spec.trials, float(fn(radar_db)), float(fn(comm_db))])
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        emit_csv(header, rows, out_dir / f"sweep_{spec.parameter}.csv")
        write_report(records, out_dir / "report.json")
    return header, rows, records


def _format_cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def emit_csv(header, rows, path) -> None:
    """Deterministic CSV: fixed column order, 9 significant digits, LF."""
    lines = [",".join(header)]
    lines += [",".join(_format_cell(x) for x in row) for row in rows]
    Path(path).write_bytes(("\n".join(lines) + "\n").encode())


def write_report(records, path) -> None:
    payload = {"runs": [rec.to_dict() for rec in records]}
    Path(path).write_bytes(
        (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode())
