"""Command-line entry point: ``debrissim run | derive | validate``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import SCENARIOS, ScenarioConfig, default_config, load_config, with_overrides
from .dynamics import CompiledEom
from .engine import EVENT_COLUMNS, SimulationTrace, make_model, simulate, symbolic_model
from .errors import ConfigError
from .kinematics import L1, L2, D, OMEGA0, R, THETA1, THETA2
from .symexpr import TIME, evaluate_tree, free_variables, node_count, simplify
from .symexpr.plan import lower

log = logging.getLogger("debrissim")

OUT_ENV = "DEBRISSIM_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _fmt(v) -> str:
    return v if isinstance(v, str) else repr(float(v))


def write_trace_csv(trace: SimulationTrace, path: Path) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace.columns)
        for row in trace.rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_events_csv(trace: SimulationTrace, path: Path) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVENT_COLUMNS)
        for ev in trace.events:
            w.writerow([_fmt(v) for v in ev.row()])
    return path


def _resolve_configs(args) -> list[ScenarioConfig]:
    configs = [load_config(p) for p in args.config or []]
    for name in args.scenario or []:
        configs.append(default_config(name))
    if not configs:
        configs.append(default_config("spacecraft_debris"))
    return [with_overrides(c, dt=args.dt) for c in configs]


def run_one(config: ScenarioConfig, out_dir: Path, plots=None) -> dict:
    """Simulate, then write trace.csv, events.csv, SVG plots and manifest.json."""
    from .plotting import available_plots, write_plots

    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    model = make_model(config)
    trace = simulate(model, config)
    duration = time.perf_counter() - started

    artifacts = [write_trace_csv(trace, out_dir / "trace.csv"), write_events_csv(trace, out_dir / "events.csv")]
    names = available_plots(config.scenario) if plots is None else [
        p for p in plots if p in available_plots(config.scenario)
    ]
    geometry = config.geometry if config.scenario == "spacecraft_debris" else None
    artifacts += write_plots(trace, out_dir, names, geometry)
    manifest_path = out_dir / "manifest.json"
    manifest = {
        "config": config.source,
        "scenario": config.scenario,
        "output_dir": str(out_dir),
        "artifacts": [p.name for p in artifacts] + [manifest_path.name],
        "metadata": {
            "duration_s": round(duration, 3),
            "steps": trace.steps,
            "rows": len(trace.rows),
            "contact_events": len(trace.events),
            "completed": trace.completed,
            "error": trace.error,
            "tool_version": __version__,
        },
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def _run_job(job):
    config, out_dir, plots = job
    return run_one(config, Path(out_dir), plots)


def cmd_run(args) -> int:
    try:
        configs = _resolve_configs(args)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or os.environ.get(OUT_ENV, "results"))
    plots = None if args.plots is None else [p.strip() for p in args.plots.split(",") if p.strip()]
    jobs = []
    for i, cfg in enumerate(configs):
        target = out if len(configs) == 1 else out / f"{i:02d}_{cfg.scenario}"
        jobs.append((cfg, str(target), plots))
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            manifests = list(pool.map(_run_job, jobs))
    else:
        manifests = [_run_job(j) for j in jobs]
    status = EXIT_OK
    for m in manifests:
        meta = m["metadata"]
        print(f"{m['scenario']}: {meta['steps']} steps, {meta['contact_events']} contact events, "
              f"{meta['duration_s']} s -> {m['output_dir']}")
        if not meta["completed"]:
            print(f"error: {m['scenario']} diverged: {meta['error']}", file=sys.stderr)
            status = EXIT_RUNTIME
    return status


def _load_for_inspection(args) -> ScenarioConfig:
    if args.config:
        return load_config(args.config)
    return default_config(args.scenario or "spacecraft_debris")


def _matrix_text(name, m) -> list[str]:
    return [f"{name}[{i + 1}][{j + 1}] = {simplify(m[i][j]).text}" for i in range(2) for j in range(2)]


def derive_report(config: ScenarioConfig) -> str:
    """Readable dump of the symbolic model and its lowered plan sizes."""
    eom = symbolic_model()
    kin = eom.kinematics
    ee = kin.end_effector()
    lines = ["# Equations of motion  B(q) q'' + c(q, q', t) + g(q) = tau + F_c",
             f"# q = ({THETA1.text}, {THETA2.text}), base angle theta0 = {kin.theta0.text}", ""]
    lines += _matrix_text("B", eom.B)
    lines += [f"c[{i + 1}] = {e.text}" for i, e in enumerate(eom.c)]
    lines += [f"g[{i + 1}] = {e.text}" for i, e in enumerate(eom.g)]
    lines += ["", "# End-effector kinematics (inertial frame)"]
    lines += [f"ee_position[{i + 1}] = {e.text}" for i, e in enumerate(ee.position)]
    lines += [f"ee_velocity[{i + 1}] = {e.text}" for i, e in enumerate(ee.velocity)]
    lines += ["", "# Contact Jacobians d(velocity of point at fraction s)/d(q')"]
    for link, lj in eom.jacobians.items():
        lines += _matrix_text(f"J_link{link}", lj.jacobian)
    lines += ["", "# Lowered plans (parameters substituted)"]
    compiled = CompiledEom(eom, config.geometry, config.inertia)
    plans = {"dynamics": compiled.dynamics_plan, "points": compiled.points_plan,
             "energy": compiled.energy_plan}
    plans.update({f"link{k}": p for k, p in compiled.link_plans.items()})
    for name, plan in plans.items():
        lines.append(f"plan {name}: {len(plan)} instructions, {plan.n_inputs} inputs, "
                     f"{len(plan.constants)} constants")
    sym_outputs = [*eom.B[0], *eom.B[1], *eom.c]
    layout = free_variables(*sym_outputs)
    nodes = sum(node_count(e) for e in sym_outputs)
    no_cse = lower(sym_outputs, layout, cse=False)
    with_cse = lower(sym_outputs, layout, cse=True)
    lines.append(f"symbolic B and c: {nodes} tree nodes, {len(no_cse)} instructions without CSE, "
                 f"{len(with_cse)} with CSE")
    return "\n".join(lines)


def spot_check(config: ScenarioConfig, seed: int, samples: int) -> list[str]:
    """Randomized consistency checks of the dumped model."""
    rng = random.Random(seed)
    eom = symbolic_model()
    ee = eom.kinematics.end_effector().position
    g = config.geometry
    compiled = CompiledEom(eom, g, config.inertia)
    worst_fk = worst_sym = 0.0
    for _ in range(samples):
        t = rng.uniform(0.0, 30.0)
        th1, th2 = rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi)
        env = {TIME: t, THETA1: th1, THETA2: th2, R: g.R, D: g.d, L1: g.l1, L2: g.l2, OMEGA0: g.omega0}
        th0 = g.omega0 * t
        ref = ((g.R - g.d) * math.cos(th0) + g.l1 * math.cos(th0 + th1) + g.l2 * math.cos(th0 + th1 + th2),
               (g.R - g.d) * math.sin(th0) + g.l1 * math.sin(th0 + th1) + g.l2 * math.sin(th0 + th1 + th2))
        got = [evaluate_tree(e, env) for e in ee]
        worst_fk = max(worst_fk, abs(got[0] - ref[0]), abs(got[1] - ref[1]))
        B, _, _ = compiled.mass_matrix_and_bias(t, th1, th2, rng.uniform(-1, 1), rng.uniform(-1, 1))
        worst_sym = max(worst_sym, abs(B[1] - B[2]))
    sym_text = eom.B[0][1].text == eom.B[1][0].text
    return [
        f"seed {seed}, {samples} random configurations",
        f"end-effector vs closed form: max abs error {worst_fk:.3e}",
        f"B[1][2] text equals B[2][1] text: {sym_text}",
        f"max |B12 - B21| over samples: {worst_sym:.1e}",
    ]


def cmd_derive(args) -> int:
    try:
        config = _load_for_inspection(args)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_CONFIG
    if config.scenario != "spacecraft_debris":
        print("error: derive needs a spacecraft_debris config (the ball has no symbolic arm model)",
              file=sys.stderr)
        return EXIT_CONFIG
    print(derive_report(config))
    if args.listing:
        compiled = CompiledEom(symbolic_model(), config.geometry, config.inertia)
        print("\n# dynamics plan listing")
        print(compiled.dynamics_plan.listing())
    if args.check:
        print()
        for line in spot_check(config, args.seed, args.samples):
            print(f"check: {line}")
    return EXIT_OK


def cmd_validate(args) -> int:
    sources = list(args.config or []) + [None] * (0 if args.config else 1)
    status = EXIT_OK
    for src in sources:
        label = src or f"<default:{args.scenario or 'spacecraft_debris'}>"
        try:
            if src is None:
                default_config(args.scenario or "spacecraft_debris")
            else:
                load_config(src)
        except ConfigError as exc:
            status = EXIT_CONFIG
            print(f"{label}: {len(exc.violations)} violation(s)")
            for v in exc.violations:
                print(f"  {v}")
        else:
            print(f"{label}: ok")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="debrissim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate and write trace/events CSV, SVG plots, manifest")
    run.add_argument("--scenario", action="append", choices=SCENARIOS,
                     help="built-in scenario with default parameters (repeatable)")
    run.add_argument("--config", action="append", help="JSON config file (repeatable)")
    run.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./results)")
    run.add_argument("--dt", type=float, help="override the integrator step [s]")
    run.add_argument("--plots", help="comma-separated subset of plots to write")
    run.add_argument("--jobs", type=int, default=1, help="parallel runs when several are given")
    run.add_argument("--seed", type=int, default=0, help="unused by deterministic runs; accepted for symmetry")
    run.set_defaults(func=cmd_run)

    derive = sub.add_parser("derive", help="print the symbolic model and plan sizes")
    derive.add_argument("--config")
    derive.add_argument("--scenario", choices=SCENARIOS)
    derive.add_argument("--listing", action="store_true", help="also print the dynamics plan")
    derive.add_argument("--check", action="store_true", help="run randomized spot checks")
    derive.add_argument("--seed", type=int, default=0)
    derive.add_argument("--samples", type=int, default=100)
    derive.set_defaults(func=cmd_derive)

    validate = sub.add_parser("validate", help="check configs without simulating")
    validate.add_argument("--config", action="append")
    validate.add_argument("--scenario", choices=SCENARIOS)
    validate.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
