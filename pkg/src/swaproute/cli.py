"""Command-line interface: single-instance solving, benchmark sweeps, and
solver-vs-oracle spot checks.

Exit codes: 0 success, 2 usage error, 3 timed out, 4 infeasible up to the
depth cap, 5 oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bilp, graph, instance as inst_mod, noise, oracle, route, solver, texpand

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TIMED_OUT = 3
EXIT_INFEASIBLE = 4
EXIT_MISMATCH = 5

_MODE_NAMES = {"optimal": "optimal", "near-optimal": "near_optimal", "feasible": "feasible_first"}

BENCH_COLUMNS = [
    "layout", "n_qubits", "team_mode", "instance_seed", "noise_seed", "solver_mode",
    "error_model", "status", "depth", "swap_count", "cost", "error", "fidelity",
    "idle_ratio", "runtime_ms", "bilp_vars", "bilp_rows", "presolve_bound",
]


class UsageError(Exception):
    pass


def _load_layout(args):
    try:
        g = graph.build_layout(args.layout)
        if getattr(args, "drop_node", None) is not None:
            g = graph.drop_node(g, args.drop_node)
        return g
    except graph.GraphError as exc:
        raise UsageError(str(exc)) from None


def _load_noise(spec: str, g, seed: int):
    if spec in noise.PRESETS:
        return noise.sample_error_map(g, noise.PRESETS[spec], seed)
    path = Path(spec)
    if path.exists():
        return noise.load_error_map(path.read_text(), g)
    raise UsageError(f"--noise must be a preset ({', '.join(noise.PRESETS)}) or a file path")


def _solve_args(sub):
    p = sub.add_parser("solve", help="solve a single routing instance")
    p.add_argument("--layout", required=True,
                   help="named layout or grid:RxC (e.g. grid:8x8)")
    p.add_argument("--drop-node", type=int, default=None,
                   help="remove a physical qubit (e.g. an offline one) before solving")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", help="instance file to solve")
    src.add_argument("--random", type=int, metavar="N",
                     help="sample a random instance with N abstract qubits")
    p.add_argument("--team-mode", choices=inst_mod.TEAM_MODES, default="independent")
    p.add_argument("--seed", type=int, default=0, help="instance sampling seed")
    p.add_argument("--noise", default="heron", help="noise preset name or error-map file")
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--mode", choices=sorted(_MODE_NAMES), default="optimal")
    p.add_argument("--error-model", choices=noise.ERROR_MODELS, default="extended")
    p.add_argument("--depth-slack", type=int, default=0)
    p.add_argument("--presolve", choices=route.PRESOLVES, default="dijkstra")
    p.add_argument("--no-trim", action="store_true", help="disable variable trimming")
    p.add_argument("--timeout", type=float, default=None, help="seconds")
    p.add_argument("--flexible", action="store_true",
                   help="treat destinations as flexible (teams may share)")
    p.add_argument("--export-lp", metavar="PATH",
                   help="write the model at the presolve lower-bound depth in LP "
                        "format and exit without solving")
    p.add_argument("--out", metavar="PATH", help="write the solution JSON here")
    p.set_defaults(func=cmd_solve)


def cmd_solve(args):
    g = _load_layout(args)
    if args.instance is not None:
        inst = inst_mod.load_instance(Path(args.instance).read_text())
    else:
        inst = inst_mod.random_instance(g, args.random, args.team_mode, args.seed)
    if args.flexible and not inst.flexible:
        inst = inst_mod.MqpfInstance(sources=inst.sources,
                                     destinations=inst.destinations, flexible=True)
    violations = inst_mod.validate(g, inst)
    if violations:
        raise UsageError("invalid instance: " + "; ".join(violations))
    emap = _load_noise(args.noise, g, args.noise_seed)
    costs = noise.movement_costs(g, emap, args.error_model)

    if args.export_lp is not None:
        depth = route.lower_bound_dijkstra(inst=inst, g=g)
        teg = texpand.expand(g, inst, depth)
        if not args.no_trim:
            teg = texpand.trim(teg)
        model = bilp.build_model(teg, costs)
        Path(args.export_lp).write_text(solver.export_lp(model))
        print(f"wrote LP model ({model.var_count} vars, {len(model.rows)} rows, "
              f"depth {depth}) to {args.export_lp}")
        return EXIT_OK

    cfg = route.RouteConfig(
        solver=solver.SolverConfig(mode=_MODE_NAMES[args.mode]),
        error_model=args.error_model,
        depth_slack=args.depth_slack,
        presolve=args.presolve,
        timeout=args.timeout,
        trim=not args.no_trim,
    )
    sol = route.solve_mqpf(g, emap, inst, cfg)
    if args.out:
        Path(args.out).write_text(route.solution_to_json(sol))
    if sol.solved:
        print(f"status={sol.status} depth={sol.depth} swaps={sol.swap_count} "
              f"cost={sol.cost:.6g} error={sol.error:.6g} fidelity={sol.fidelity:.6g}")
        return EXIT_OK
    print(f"status={sol.status}", file=sys.stderr)
    return EXIT_TIMED_OUT if sol.status == "timed_out" else EXIT_INFEASIBLE


def _parse_qubits(spec: str):
    if ".." in spec:
        lo, hi = spec.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


def _bench_args(sub):
    p = sub.add_parser("bench", help="run a benchmark sweep, emitting CSV rows")
    p.add_argument("--layout", required=True)
    p.add_argument("--qubits", required=True,
                   help="abstract qubit counts: 'lo..hi' or comma list")
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--team-mode", choices=inst_mod.TEAM_MODES, default="independent")
    p.add_argument("--modes", default="optimal",
                   help="comma list from: " + ", ".join(sorted(_MODE_NAMES)))
    p.add_argument("--error-model", choices=noise.ERROR_MODELS, default="extended")
    p.add_argument("--timeout", type=float, default=3600.0, help="seconds per instance")
    p.add_argument("--noise-preset", choices=sorted(noise.PRESETS), default="heron")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)


def _bench_seeds(base_seed, n_qubits, idx):
    # documented derivation so sweeps are reproducible row by row
    instance_seed = base_seed * 1_000_000 + n_qubits * 1_000 + idx
    noise_seed = instance_seed + 500
    return instance_seed, noise_seed


def _bench_one(task):
    (layout, n_qubits, idx, team_mode, mode_cli, error_model, timeout,
     preset, base_seed) = task
    g = graph.build_layout(layout)
    instance_seed, noise_seed = _bench_seeds(base_seed, n_qubits, idx)
    inst = inst_mod.random_instance(g, n_qubits, team_mode, instance_seed)
    emap = noise.sample_error_map(g, noise.PRESETS[preset], noise_seed)
    cfg = route.RouteConfig(
        solver=solver.SolverConfig(mode=_MODE_NAMES[mode_cli]),
        error_model=error_model, timeout=timeout)
    t0 = time.monotonic()
    sol = route.solve_mqpf(g, emap, inst, cfg)
    runtime_ms = (time.monotonic() - t0) * 1e3
    row = {c: "" for c in BENCH_COLUMNS}
    row.update(layout=layout, n_qubits=n_qubits, team_mode=team_mode,
               instance_seed=instance_seed, noise_seed=noise_seed,
               solver_mode=mode_cli, error_model=error_model, status=sol.status,
               runtime_ms=f"{runtime_ms:.1f}", presolve_bound=sol.presolve_bound)
    if sol.solved:
        row.update(depth=sol.depth, swap_count=sol.swap_count,
                   cost=f"{sol.cost:.12g}", error=f"{sol.error:.12g}",
                   fidelity=f"{sol.fidelity:.12g}",
                   idle_ratio="" if sol.idle_ratio is None else f"{sol.idle_ratio:.12g}",
                   bilp_vars=sol.bilp_vars, bilp_rows=sol.bilp_rows)
    return row


def cmd_bench(args):
    _load_layout(args)  # fail fast on unknown layouts
    modes = [m.strip() for m in args.modes.split(",")]
    for m in modes:
        if m not in _MODE_NAMES:
            raise UsageError(f"unknown mode {m!r}")
    tasks = []
    for n_qubits in _parse_qubits(args.qubits):
        for idx in range(args.instances):
            for mode_cli in modes:
                tasks.append((args.layout, n_qubits, idx, args.team_mode, mode_cli,
                              args.error_model, args.timeout, args.noise_preset,
                              args.seed))
    writer = csv.DictWriter(sys.stdout, fieldnames=BENCH_COLUMNS)
    writer.writeheader()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for row in pool.map(_bench_one, tasks):
                writer.writerow(row)
                sys.stdout.flush()
    else:
        for task in tasks:
            writer.writerow(_bench_one(task))
            sys.stdout.flush()
    return EXIT_OK


def _oracle_args(sub):
    p = sub.add_parser("oracle-check",
                       help="cross-check the solver against brute-force ground truth")
    p.add_argument("--nodes-max", type=int, default=8)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle_check)


def random_connected_graph(n, rng):
    """Random spanning tree plus a few extra edges."""
    edges = set()
    order = list(rng.permutation(n))
    for pos in range(1, n):
        a = order[pos]
        b = order[int(rng.integers(0, pos))]
        edges.add((min(a, b), max(a, b)))
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        a, b = rng.choice(n, size=2, replace=False)
        edges.add((min(a, b), max(a, b)))
    return graph.HardwareGraph(n, sorted(edges))


def cmd_oracle_check(args):
    rng = np.random.default_rng(args.seed)
    mismatches = 0
    for s in range(args.samples):
        n = int(rng.integers(2, args.nodes_max + 1))
        g = random_connected_graph(n, rng)
        n_qubits = int(rng.integers(1, min(n, 4) + 1))
        mode = inst_mod.TEAM_MODES[int(rng.integers(0, 3))]
        inst = inst_mod.random_instance(g, n_qubits, mode, int(rng.integers(0, 2**31)))
        emap = noise.sample_error_map(g, noise.PRESETS["heron"], int(rng.integers(0, 2**31)))
        sol = route.solve_mqpf(g, emap, inst)
        expect = oracle.bfs_optimal_depth(g, inst)
        if not sol.solved or sol.depth != expect:
            mismatches += 1
            got = sol.depth if sol.solved else sol.status
            print(f"MISMATCH sample {s}: solver {got} vs oracle {expect}", file=sys.stderr)
    print(f"{mismatches} mismatches / {args.samples} samples")
    return EXIT_MISMATCH if mismatches else EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="swaproute",
        description="Exact multi-team qubit routing via parallel SWAPs.")
    sub = parser.add_subparsers(dest="command", required=True)
    _solve_args(sub)
    _bench_args(sub)
    _oracle_args(sub)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (inst_mod.InstanceError, noise.NoiseError, route.RouteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
