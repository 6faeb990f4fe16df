"""Command line interface.

Subcommands: simulate, shrinker, sweep, validate, plot.
Exit codes: 0 ok, 1 invariant violation, 2 usage error, 3 numeric failure.
Flags override values from --config FILE; --dump-config prints every
default.  LAGFLOW_THREADS caps the sweep worker pool.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .curve import atomic_write_text, read_curve_json, write_curve_json
from .errors import ExitEmptyGrid, LagflowError
from .flow import FlowConfig, FlowState, evolution_residuals, run
from .geometry import geometry, identity_residuals
from .lab import experiment, sweep
from .scenarios import DEFAULT_PARAMS, KINDS, ScenarioSpec, random_fourier_seed
from .shrinker import catalogue_rows, shoot_closed, spec_p_value
from .topology import predicates, topology

_SCENARIO_FLAGS = {
    # flag name -> (param key, kinds it applies to)
    "R": ("R", ("circle", "offset_circle", "perturbed_symmetric", "figure_eight", "dumbbell")),
    "a": ("a", ("perturbed_symmetric",)),
    "l": ("l", ("perturbed_symmetric",)),
    "omega0": ("omega0", ("perturbed_symmetric",)),
    "kappa": ("kappa", ("chekanov",)),
    "cx": ("cx", ("circle", "offset_circle")),
    "cy": ("cy", ("circle", "offset_circle")),
    "separation": ("d", ("dumbbell",)),
    "neck_width": ("w", ("dumbbell",)),
    "tau": ("tau", ("dumbbell",)),
}


def _build_parser():
    ap = argparse.ArgumentParser(prog="lagflow", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="cmd", required=True)

    sim = sub.add_parser("simulate", help="run one scenario end to end")
    sim.add_argument("--scenario", choices=KINDS)
    sim.add_argument("--n", type=int)
    sim.add_argument("--N", type=int)
    sim.add_argument("--R", type=float)
    sim.add_argument("--a", type=float)
    sim.add_argument("--l", type=int)
    sim.add_argument("--omega0", type=int)
    sim.add_argument("--kappa", type=float)
    sim.add_argument("--cx", type=float)
    sim.add_argument("--cy", type=float)
    sim.add_argument("--separation", type=float)
    sim.add_argument("--neck-width", dest="neck_width", type=float)
    sim.add_argument("--tau", type=float)
    sim.add_argument("--cfl", type=float)
    sim.add_argument("--t-max", dest="t_max", type=float)
    sim.add_argument("--stop-min-r", dest="stop_min_r", type=float)
    sim.add_argument("--stop-max-f", dest="stop_max_f", type=float)
    sim.add_argument("--record-every", dest="record_every", type=int)
    sim.add_argument("--resample-every", dest="resample_every", type=int)
    sim.add_argument("--snapshots", type=int)
    sim.add_argument("--embed-loss", dest="embed_loss", choices=("flag", "refute"))
    sim.add_argument("--no-plots", action="store_true")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", default="out")
    sim.add_argument("--config", help="JSON config file; flags override it")
    sim.add_argument("--dump-config", action="store_true")

    shr = sub.add_parser("shrinker", help="shoot for a closed self-similar profile")
    shr.add_argument("--n", type=int, default=2)
    shr.add_argument("--eps", type=float, default=4.0)
    shr.add_argument("--rot", type=int, default=1)
    shr.add_argument("--wind", type=int, default=1)
    shr.add_argument("--bracket", type=float, nargs=2, default=(0.5, 1.5))
    shr.add_argument("--N", type=int, default=512)
    shr.add_argument("--out", default="out")

    sw = sub.add_parser("sweep", help="run a grid of scenarios")
    sw.add_argument("--config", required=True, help="JSON grid file")
    sw.add_argument("--out", default="out")
    sw.add_argument("--workers", type=int)
    sw.add_argument("--plots", action="store_true")

    val = sub.add_parser("validate", help="run identity/evolution residual suites")
    val.add_argument("--N", type=int, default=256)
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--runs", type=int, default=3, help="random preservation runs")
    val.add_argument("--out")

    plo = sub.add_parser("plot", help="re-emit figures for a finished run")
    plo.add_argument("--run", required=True, help="experiment output directory")
    return ap


def _default_config():
    from dataclasses import asdict
    return {
        "scenario": {"kind": "circle", "n": 2, "N": 256,
                     "params_by_kind": DEFAULT_PARAMS},
        "flow": asdict(FlowConfig()),
        "snapshots": 16,
        "embed_loss": "flag",
        "out": "out",
    }


def _cmd_simulate(args) -> int:
    if args.dump_config:
        print(json.dumps(_default_config(), indent=2, sort_keys=True))
        return 0
    filecfg = {}
    if args.config:
        with open(args.config) as fh:
            filecfg = json.load(fh)
    kind = args.scenario or filecfg.get("scenario", {}).get("kind")
    if kind is None:
        print("error: --scenario (or a config file with one) is required", file=sys.stderr)
        return 2
    params = dict(filecfg.get("scenario", {}).get("params", {}))
    for flag, (key, kinds) in _SCENARIO_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None and kind in kinds:
            params[key] = v
    n = args.n if args.n is not None else filecfg.get("scenario", {}).get("n", 2)
    N = args.N if args.N is not None else filecfg.get("scenario", {}).get("N", 256)
    scen = ScenarioSpec(kind=kind, n=n, N=N, params=params)

    flow_kwargs = dict(filecfg.get("flow", {}))
    for key in ("cfl", "t_max", "stop_min_r", "stop_max_f", "record_every", "resample_every"):
        v = getattr(args, key, None)
        if v is not None:
            flow_kwargs[key] = v
    flow_kwargs["n"] = n
    config = FlowConfig(**flow_kwargs)

    snapshots = args.snapshots if args.snapshots is not None else filecfg.get("snapshots", 16)
    embed_loss = args.embed_loss or filecfg.get("embed_loss", "flag")
    art = experiment(scen, config, args.out, snapshots=snapshots,
                     embed_loss=embed_loss, make_plots=not args.no_plots)
    summary = {
        "t_stop": art.record.t_stop,
        "stop_reason": art.record.stop_reason,
        "T_est": art.report.T_est if art.report else None,
        "class": art.report.sing_class if art.report else None,
        "type1": art.report.type1 if art.report else None,
        "violations": len(art.violations),
        "out": art.outdir,
    }
    print(json.dumps(summary))
    return 1 if art.violations else 0


def _cmd_shrinker(args) -> int:
    spec, curve = shoot_closed(args.n, args.eps, (args.rot, args.wind),
                               tuple(args.bracket), N=args.N)
    os.makedirs(args.out, exist_ok=True)
    write_curve_json(curve, os.path.join(args.out, "shrinker.json"),
                     extra={"eps": float(spec.eps)})
    atomic_write_text(os.path.join(args.out, "catalogue.csv"),
                      catalogue_rows([(spec, curve)]))
    preds = predicates(curve, geometry(curve, spec.n))
    print(json.dumps({"r_start": spec.r_start, "p": spec_p_value(spec),
                      "tamed": preds["tamed"], "starshaped": preds["starshaped"],
                      "out": args.out}))
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        doc = json.load(fh)
    base_flow = doc.get("base_flow", {})
    rows = []
    for entry in doc.get("rows", []):
        sc = entry["scenario"]
        scen = ScenarioSpec(kind=sc["kind"], n=sc.get("n", 2), N=sc.get("N", 256),
                            params=sc.get("params", {}))
        fk = dict(base_flow)
        fk.update(entry.get("flow", {}))
        fk["n"] = scen.n
        rows.append((scen, FlowConfig(**fk)))
    text = sweep(rows, args.out, workers=args.workers, make_plots=args.plots)
    sys.stdout.write(text)
    bad = sum(1 for line in text.splitlines()[1:] if line.rsplit(",", 1)[-1] not in ("", "nan"))
    return 1 if bad else 0


def _cmd_validate(args) -> int:
    checks = []
    N = args.N
    phi = 2.0 * np.pi * np.arange(N) / N

    # identity residual convergence on a wavy starshaped curve
    results = {}
    for NN in (N, 2 * N):
        ph = 2.0 * np.pi * np.arange(NN) / NN
        from .curve import from_complex
        c = from_complex((1.0 + 0.1 * np.cos(3 * ph)) * np.exp(1j * ph), 2)
        results[NN] = identity_residuals(c, geometry(c, 2))
    for key in ("res_10a", "res_10b", "res_10c", "res_curveeq11"):
        ratio = results[N][key] / max(results[2 * N][key], 1e-300)
        checks.append((f"identity {key} refinement x{ratio:.1f}", ratio >= 3.5))

    # evolution residuals on the unit circle
    from .curve import from_complex
    circ = from_complex(np.exp(1j * phi), 2)
    res = evolution_residuals(FlowState(curve=circ), FlowConfig(n=2))
    checks.append((f"evolution res_k {res['res_k']:.2e} < 1e-4", res["res_k"] < 1e-4))
    checks.append((f"evolution res_dA {res['res_dA']:.2e} < 1e-6", res["res_dA"] < 1e-6))

    # preservation on random tamed starshaped seeds
    rng = np.random.default_rng(args.seed)
    ok_pres = True
    for _ in range(args.runs):
        seed = random_fourier_seed(rng, N=min(N, 192))
        rec, rep, fin = run(seed, FlowConfig(n=2, record_every=25))
        from .flow import invariant_monitor
        mon = invariant_monitor(rec, topology(seed, geometry(seed, 2), 2))
        if mon["preservation_violations"]:
            ok_pres = False
    checks.append((f"preservation over {args.runs} random seeds", ok_pres))

    failures = 0
    lines = []
    for label, ok in checks:
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {label}")
        failures += 0 if ok else 1
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        atomic_write_text(args.out, text)
    return 1 if failures else 0


def _cmd_plot(args) -> int:
    from .plots import emit_curve_overlay, emit_invariant_panels
    rundir = args.run
    snaps = []
    with open(os.path.join(rundir, "trajectory.csv")) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    times = [float(r[header.index("t")]) for r in rows]
    for name in sorted(os.listdir(rundir)):
        if name.startswith("snap_") and name.endswith(".json"):
            idx = int(name[5:-5])
            curve = read_curve_json(os.path.join(rundir, name))
            snaps.append((times[idx] if idx < len(times) else 0.0, curve))
    snaps.sort(key=lambda p: p[0])
    emit_curve_overlay(snaps, os.path.join(rundir, "curves.svg"))

    report_path = os.path.join(rundir, "report.json")
    rep = None
    if os.path.exists(report_path):
        with open(report_path) as fh:
            doc = json.load(fh)

        class _Rep:
            T_est = doc.get("T_est")
            type1 = bool(doc.get("type1"))
        rep = _Rep() if _Rep.T_est is not None else None

    # rebuild a minimal record view at snapshot resolution
    class _View:
        def __init__(self, snaps):
            self.n = snaps[0][1].n_ambient if snaps else 2
            self._t, self._area, self._a2 = [], [], []
            for t, c in snaps:
                fld = geometry(c, self.n)
                topo = topology(c, fld, self.n)
                a2 = fld.k ** 2
                if self.n > 1:
                    a2 = a2 + (self.n - 1) * (fld.nu_dot_er / fld.r) ** 2
                self._t.append(t)
                self._area.append(topo.area)
                self._a2.append(float(a2.max()))
            self._d = {"times": self._t, "area": self._area, "a_proxy_sq": self._a2}

        def asarray(self, key):
            return np.asarray(self._d[key], dtype=float)

    if snaps:
        view = _View(snaps)
        c0 = snaps[0][1]
        topo0 = topology(c0, geometry(c0, c0.n_ambient), c0.n_ambient)
        emit_invariant_panels(view, topo0, rep, os.path.join(rundir, "invariants.svg"))
    print(json.dumps({"out": rundir, "snapshots": len(snaps)}))
    return 0


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        if args.cmd == "simulate":
            return _cmd_simulate(args)
        if args.cmd == "shrinker":
            return _cmd_shrinker(args)
        if args.cmd == "sweep":
            return _cmd_sweep(args)
        if args.cmd == "validate":
            return _cmd_validate(args)
        if args.cmd == "plot":
            return _cmd_plot(args)
        return 2
    except ExitEmptyGrid as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except LagflowError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
