"""Experiment orchestration and artifact persistence.

An experiment is: generate seed -> run flow -> monitor invariants ->
estimate singularity -> write artifacts (trajectory CSV, report JSON,
snapshot curves, figures).  Exit status 0 means no invariant violated its
tolerance.  All files go through atomic temp+rename writes and repeated
runs with identical configuration are byte-identical.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curve import atomic_write_text, curve_json_text
from .errors import ExitEmptyGrid, LagflowError
from .flow import FlowConfig, TrajectoryRecord, invariant_monitor, run
from .geometry import geometry
from .scenarios import ScenarioSpec, generate
from .topology import topology

AREA_LAW_REL_TOL = 1e-3


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and not np.isfinite(x)):
        return "nan"
    return format(float(x), ".17g")


def trajectory_csv_text(record: TrajectoryRecord) -> str:
    cols = "t,area,eps_t,min_r,max_r,max_abs_f,max_abs_k,harnack,starshaped,tamed,austere,embedded"
    lines = [cols]
    for i in range(len(record)):
        vals = [record.times[i], record.area[i], record.eps_t[i], record.min_r[i],
                record.max_r[i], record.max_abs_f[i], record.max_abs_k[i],
                record.harnack_ratio[i]]
        flags = [int(record.flags[k][i]) for k in ("starshaped", "tamed", "austere", "embedded")]
        lines.append(",".join([_fmt(v) for v in vals] + [str(b) for b in flags]))
    return "\n".join(lines) + "\n"


@dataclass
class RunArtifacts:
    outdir: str
    files: list
    violations: list
    record: TrajectoryRecord
    report: object
    monitor: dict
    topo0: object


def experiment(scenario: ScenarioSpec, config: FlowConfig, outdir,
               snapshots: int = 16, embed_loss: str = "flag",
               make_plots: bool = True) -> RunArtifacts:
    """Full pipeline for one scenario; writes artifacts into outdir."""
    os.makedirs(outdir, exist_ok=True)
    curve0 = generate(scenario)
    fld0 = geometry(curve0, scenario.n)
    topo0 = topology(curve0, fld0, scenario.n)

    record, report, final = run(curve0, config)
    monitor = invariant_monitor(record, topo0,
                                T_est=report.T_est if report is not None else None)

    violations = []
    if monitor["area_law_residual"] is not None and abs(topo0.area) > 0:
        tol = AREA_LAW_REL_TOL * abs(topo0.area)
        if monitor["area_law_residual"] > tol:
            violations.append({"check": "area_law", "value": monitor["area_law_residual"],
                               "tol": tol})
    for v in monitor["preservation_violations"]:
        if v["property"] == "embedded" and embed_loss == "flag":
            v = dict(v, severity="flagged")
            monitor.setdefault("flagged", []).append(v)
            continue
        violations.append({"check": f"preserve_{v['property']}", "value": v["t"], "tol": 0.0})

    files = []

    def emit(name, text):
        path = os.path.join(outdir, name)
        atomic_write_text(path, text)
        files.append(path)

    emit("trajectory.csv", trajectory_csv_text(record))
    if report is not None:
        emit("report.json", json.dumps(report.as_dict()) + "\n")
    emit("monitor.json", json.dumps(_jsonable(monitor), sort_keys=True) + "\n")
    emit("violations.json", json.dumps(_jsonable(violations)) + "\n")
    emit("seed.json", curve_json_text(curve0))

    keep = _snapshot_indices(len(record), snapshots)
    for idx in keep:
        _, curve = record.snapshots[idx]
        emit(f"snap_{idx}.json", curve_json_text(curve))

    if make_plots:
        from .plots import emit_svg
        files.extend(emit_svg(record, topo0, report, keep, outdir))

    return RunArtifacts(outdir=str(outdir), files=files, violations=violations,
                        record=record, report=report, monitor=monitor, topo0=topo0)


def _snapshot_indices(n_samples: int, max_snaps: int):
    if n_samples <= 0 or max_snaps <= 0:
        return []
    if n_samples <= max_snaps:
        return list(range(n_samples))
    pick = np.unique(np.linspace(0, n_samples - 1, max_snaps).round().astype(int))
    return [int(i) for i in pick]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# ---------------------------------------------------------------------------
# parameter sweeps


def _sweep_row(args):
    i, scenario, config, outdir, make_plots = args
    row = {"scenario": scenario.kind,
           "params": ";".join(f"{k}={v}" for k, v in sorted(scenario.params.items())),
           "n": scenario.n, "T_est": None, "class": "", "type1": "",
           "area_law_residual": None, "eps_law_residual": None, "violations": ""}
    try:
        art = experiment(scenario, config, os.path.join(outdir, f"row_{i:03d}"),
                         make_plots=make_plots)
        if art.report is not None:
            row["T_est"] = art.report.T_est
            row["class"] = art.report.sing_class
            row["type1"] = int(art.report.type1)
        row["area_law_residual"] = art.monitor["area_law_residual"]
        row["eps_law_residual"] = art.monitor["eps_law_residual"]
        row["violations"] = "|".join(v["check"] for v in art.violations)
    except LagflowError as exc:
        row["violations"] = f"ERROR:{type(exc).__name__}"
    return i, row


def sweep(grid, outdir, workers: int | None = None, make_plots: bool = False) -> str:
    """Run every (ScenarioSpec, FlowConfig) pair; returns the summary CSV text.

    Rows run on a small process pool (capped by LAGFLOW_THREADS); each row
    owns its own subdirectory, failures are recorded per row and the sweep
    continues.
    """
    grid = list(grid)
    if not grid:
        raise ExitEmptyGrid("sweep grid is empty")
    os.makedirs(outdir, exist_ok=True)
    if workers is None:
        workers = int(os.environ.get("LAGFLOW_THREADS", "0")) or min(4, os.cpu_count() or 1)
    jobs = [(i, sc, cf, str(outdir), make_plots) for i, (sc, cf) in enumerate(grid)]
    results = [None] * len(jobs)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, row in pool.map(_sweep_row, jobs):
                results[i] = row
    else:
        for job in jobs:
            i, row = _sweep_row(job)
            results[i] = row
    cols = ["scenario", "params", "n", "T_est", "class", "type1",
            "area_law_residual", "eps_law_residual", "violations"]
    lines = [",".join(cols)]
    for row in results:
        cells = []
        for c in cols:
            v = row[c]
            if isinstance(v, float) or v is None:
                cells.append(_fmt(v))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    atomic_write_text(os.path.join(outdir, "summary.csv"), text)
    return text
