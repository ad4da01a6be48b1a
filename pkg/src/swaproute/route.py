"""The outer routing algorithm: depth lower bounds, iterative deepening over
the time expansion, path extraction, validation, and error metrics."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace

from . import bilp, texpand
from .graph import distances_from_set
from .instance import merge_teams, validate as validate_instance
from .noise import movement_costs
from .solver import SolverConfig, solve

PRESOLVES = ("none", "dijkstra", "single_team")


class RouteError(ValueError):
    pass


@dataclass(frozen=True)
class RouteConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    error_model: str = "simple"
    depth_slack: int = 0
    presolve: str = "dijkstra"
    timeout: float | None = None  # whole-instance wall-clock budget, seconds
    trim: bool = True             # reachability trimming of expansion variables

    def __post_init__(self):
        if self.presolve not in PRESOLVES:
            raise RouteError(f"unknown presolve {self.presolve!r}; expected one of {PRESOLVES}")
        if self.depth_slack < 0:
            raise RouteError("depth_slack must be >= 0")


@dataclass(frozen=True)
class RoutingSolution:
    """A solved routing instance.

    ``paths[a][t]`` is abstract qubit a's node at timestep t; qubits are
    numbered by team order, then by source node within each team.
    ``schedule[t-1]`` is the matching of hardware edges swapped at step t.
    """

    status: str                   # optimal | feasible | timed_out | infeasible_up_to_cap
    depth: int | None = None
    teams: tuple = ()             # team id per abstract qubit
    paths: tuple | None = None
    schedule: tuple | None = None
    cost: float | None = None
    error: float | None = None
    fidelity: float | None = None
    swap_count: int | None = None
    swap_cost: float | None = None
    idle_cost: float | None = None
    idle_ratio: float | None = None
    arrival_time_sum: int | None = None
    solver_status: str | None = None
    solver_gap: float | None = None
    presolve_bound: int | None = None
    bilp_vars: int | None = None
    bilp_rows: int | None = None
    nodes: int = 0
    timings: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status in ("optimal", "feasible")


def lower_bound_dijkstra(g, inst) -> int:
    """Admissible depth bound: each qubit needs at least its hop distance to
    the nearest destination of its own team; take the max over qubits."""
    bound = 0
    for k in range(inst.team_count):
        dist = distances_from_set(g, inst.destinations[k])
        for s in inst.sources[k]:
            bound = max(bound, dist[s])
    return bound


def lower_bound_single_team(g, inst, cfg: RouteConfig | None = None) -> int:
    """Admissible depth bound from the single-team relaxation.

    Merging all teams can only shorten the optimal schedule, and the merged
    instance solves orders of magnitude faster.
    """
    cfg = cfg or RouteConfig()
    relaxed = merge_teams(inst)
    sub = replace(cfg, presolve="dijkstra", depth_slack=0,
                  solver=replace(cfg.solver, mode="feasible_first"))
    sol = _deepen(g, None, relaxed, sub, costs=_zero_costs(g))
    if not sol.solved:
        raise RouteError(f"single-team presolve did not complete: {sol.status}")
    return sol.depth


@dataclass(frozen=True)
class _ZeroCosts:
    # feasibility-only solves: every movement is free
    model: str = "simple"

    def movement_cost(self, i, j):
        return 0.0


def _zero_costs(g):
    return _ZeroCosts()


def solve_mqpf(g, emap, inst, cfg: RouteConfig | None = None) -> RoutingSolution:
    """Route an instance: find the optimal depth by iterative deepening, then
    return the cost-minimizing schedule at that depth (plus any depth slack)."""
    cfg = cfg or RouteConfig()
    violations = validate_instance(g, inst)
    if violations:
        raise RouteError("invalid instance: " + "; ".join(violations))
    costs = movement_costs(g, emap, cfg.error_model)
    return _deepen(g, emap, inst, cfg, costs)


def _deepen(g, emap, inst, cfg, costs):
    start = time.monotonic()
    timings = {"presolve_s": 0.0, "expand_s": 0.0, "build_s": 0.0, "solve_s": 0.0}

    def remaining():
        if cfg.timeout is None:
            return None
        return cfg.timeout - (time.monotonic() - start)

    def out_of_time():
        rem = remaining()
        return rem is not None and rem <= 0

    t0 = time.monotonic()
    if cfg.presolve == "none":
        bound = 0
    elif cfg.presolve == "dijkstra":
        bound = lower_bound_dijkstra(g, inst)
    else:
        bound = lower_bound_single_team(g, inst, cfg)
    timings["presolve_s"] = time.monotonic() - t0

    def attempt(depth):
        t1 = time.monotonic()
        teg = texpand.expand(g, inst, depth)
        if cfg.trim:
            teg = texpand.trim(teg)
        t2 = time.monotonic()
        model = bilp.build_model(teg, costs)
        t3 = time.monotonic()
        scfg = replace(cfg.solver, deadline=remaining())
        res = solve(model, scfg)
        t4 = time.monotonic()
        timings["expand_s"] += t2 - t1
        timings["build_s"] += t3 - t2
        timings["solve_s"] += t4 - t3
        return teg, model, res

    cap = g.node_count ** 2
    found = None
    for depth in range(bound, cap + 1):
        if out_of_time():
            return _aborted("timed_out", bound, timings, start)
        teg, model, res = attempt(depth)
        if res.status == "deadline_exceeded":
            return _aborted("timed_out", bound, timings, start)
        if res.status == "infeasible":
            continue
        found = (depth, teg, model, res)
        break
    if found is None:
        return _aborted("infeasible_up_to_cap", bound, timings, start)

    best_depth, teg, model, res = found
    if cfg.depth_slack > 0:
        slack_depth = best_depth + cfg.depth_slack
        teg2, model2, res2 = attempt(slack_depth)
        if res2.status in ("optimal", "feasible"):
            teg, model, res = teg2, model2, res2
        elif res2.status == "deadline_exceeded":
            return _aborted("timed_out", bound, timings, start)
        else:
            raise RouteError("deeper expansion unexpectedly infeasible")

    teams, paths = extract_paths(res.assignment, teg, model)
    schedule = schedule_from_paths(paths)
    stats = bilp.count_stats(model)
    m = metrics(paths, costs)
    timings["total_s"] = time.monotonic() - start
    return RoutingSolution(
        status=res.status if res.status in ("optimal", "feasible") else "feasible",
        depth=teg.depth,
        teams=teams,
        paths=paths,
        schedule=schedule,
        cost=m["cost"],
        error=m["error"],
        fidelity=m["fidelity"],
        swap_count=m["swap_count"],
        swap_cost=m["swap_cost"],
        idle_cost=m["idle_cost"],
        idle_ratio=m["idle_ratio"],
        arrival_time_sum=m["arrival_time_sum"],
        solver_status=res.status,
        solver_gap=res.gap,
        presolve_bound=bound,
        bilp_vars=stats["vars"],
        bilp_rows=stats["rows"],
        nodes=res.nodes,
        timings=timings,
    )


def _aborted(status, bound, timings, start):
    timings["total_s"] = time.monotonic() - start
    return RoutingSolution(status=status, presolve_bound=bound, timings=timings)


def extract_paths(assignment, teg, model):
    """Decode a feasible assignment into per-qubit node paths.

    Follows the unit flow of each team from its source attachments through
    the movement variables.  Qubit identity within a team is positional
    (sorted by source node), matching the instance convention.
    """
    inst, depth = teg.instance, teg.depth
    chosen = {}  # (team, t, origin) -> target
    for ordinal, vid in enumerate(model.var_ids):
        if vid[0] == "move" and assignment[ordinal] == 1:
            _, k, t, i, j = vid
            key = (k, t, i)
            if key in chosen:
                raise RouteError(f"flow decode failure: two movements out of {key}")
            chosen[key] = j
    teams = []
    paths = []
    for k in range(inst.team_count):
        for s in inst.sources[k]:
            path = [s]
            for t in range(1, depth + 1):
                key = (k, t, path[-1])
                if key not in chosen:
                    raise RouteError(f"flow decode failure: no movement out of {key}")
                path.append(chosen[key])
            teams.append(k)
            paths.append(tuple(path))
    return tuple(teams), tuple(paths)


def schedule_from_paths(paths):
    """Per-timestep sets of swapped hardware edges, as sorted (i, j) pairs."""
    if not paths:
        return ()
    depth = len(paths[0]) - 1
    schedule = []
    for t in range(1, depth + 1):
        edges = set()
        for p in paths:
            if p[t] != p[t - 1]:
                edges.add((min(p[t - 1], p[t]), max(p[t - 1], p[t])))
        schedule.append(tuple(sorted(edges)))
    return tuple(schedule)


def validate(g, inst, sol: RoutingSolution) -> list[str]:
    """Exhaustively check a solution against all problem conditions."""
    violations = []
    if sol.paths is None or sol.depth is None:
        return ["solution carries no paths"]
    paths, depth = sol.paths, sol.depth
    expected = sum(len(s) for s in inst.sources)
    if len(paths) != expected:
        violations.append(f"expected {expected} paths, got {len(paths)}")
        return violations
    edge_set = set(g.edges)
    for a, p in enumerate(paths):
        if len(p) != depth + 1:
            violations.append(f"qubit {a}: path length {len(p)} != depth+1 {depth + 1}")
            return violations
        for t in range(1, depth + 1):
            i, j = p[t - 1], p[t]
            if i != j and (min(i, j), max(i, j)) not in edge_set:
                violations.append(f"qubit {a}, step {t}: {i} -> {j} is not a hardware edge")
    # exclusivity of location
    for t in range(depth + 1):
        occupied = {}
        for a, p in enumerate(paths):
            if p[t] in occupied:
                violations.append(
                    f"step {t}: qubits {occupied[p[t]]} and {a} both at node {p[t]}")
            occupied[p[t]] = a
    # swap-based movement
    for t in range(1, depth + 1):
        prev_at = {p[t - 1]: a for a, p in enumerate(paths)}
        for a, p in enumerate(paths):
            if p[t] != p[t - 1] and p[t] in prev_at:
                b = prev_at[p[t]]
                if paths[b][t] != p[t - 1]:
                    violations.append(
                        f"step {t}: qubit {a} moved onto qubit {b} without swapping")
    # starting and ending conditions
    pos = 0
    for k in range(inst.team_count):
        size = len(inst.sources[k])
        starts = sorted(p[0] for p in paths[pos:pos + size])
        ends = set(p[depth] for p in paths[pos:pos + size])
        if tuple(starts) != inst.sources[k]:
            violations.append(f"team {k}: starts {starts} != sources {inst.sources[k]}")
        dests = set(inst.destinations[k])
        if inst.flexible:
            if not ends <= dests:
                violations.append(f"team {k}: ends {sorted(ends)} not within {sorted(dests)}")
        elif ends != dests:
            violations.append(f"team {k}: ends {sorted(ends)} != destinations {sorted(dests)}")
        pos += size
    return violations


def metrics(paths, costs) -> dict:
    """Recompute error metrics from paths, independently of the solver objective."""
    swap_cost = 0.0
    idle_cost = 0.0
    swap_count = 0
    arrival_sum = 0
    depth = len(paths[0]) - 1 if paths else 0
    for p in paths:
        last_move = 0
        for t in range(1, depth + 1):
            if p[t] != p[t - 1]:
                swap_cost += costs.movement_cost(p[t - 1], p[t])
                last_move = t
            else:
                idle_cost += costs.movement_cost(p[t], p[t])
        arrival_sum += last_move
    for step in schedule_from_paths(paths):
        swap_count += len(step)
    total = swap_cost + idle_cost
    e_swap = 1.0 - math.exp(-swap_cost)
    e_idle = 1.0 - math.exp(-idle_cost)
    ratio = None
    if costs.model != "simple" and e_swap > 0.0:
        ratio = e_idle / e_swap
    return {
        "cost": total,
        "error": 1.0 - math.exp(-total),
        "fidelity": math.exp(-total),
        "swap_count": swap_count,
        "swap_cost": swap_cost,
        "idle_cost": 0.0 if costs.model == "simple" else idle_cost,
        "idle_ratio": ratio,
        "arrival_time_sum": arrival_sum,
    }


def solution_to_json(sol: RoutingSolution) -> str:
    """Serialize a routing solution to the JSON solution-file format."""
    doc = {
        "status": sol.status,
        "depth": sol.depth,
        "teams": list(sol.teams),
        "paths": [list(p) for p in sol.paths] if sol.paths is not None else None,
        "swaps": [[list(e) for e in step] for step in sol.schedule]
                 if sol.schedule is not None else None,
        "cost": sol.cost,
        "error": sol.error,
        "fidelity": sol.fidelity,
        "swap_count": sol.swap_count,
        "swap_cost": sol.swap_cost,
        "idle_cost": sol.idle_cost,
        "idle_ratio": sol.idle_ratio,
        "arrival_time_sum": sol.arrival_time_sum,
        "solver_status": sol.solver_status,
        "solver_gap": sol.solver_gap,
        "presolve_bound": sol.presolve_bound,
        "bilp_vars": sol.bilp_vars,
        "bilp_rows": sol.bilp_rows,
        "timings": sol.timings,
    }
    return json.dumps(doc, indent=2) + "\n"
