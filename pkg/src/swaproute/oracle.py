"""Brute-force ground truth for small instances.

Searches the space of team-colored occupancy configurations directly: one
transition per matching of the hardware graph, applied as simultaneous
swaps.  Shares only the graph, instance, and cost tables with the main
algorithm, so it is an independent witness for depth and cost.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

_BFS_NODE_CAP = 14
_COST_NODE_CAP = 12
_COST_DEPTH_CAP = 8

EMPTY = -1


class OracleGuardError(RuntimeError):
    """State-space guard exceeded; the oracle only scales to toy sizes."""


def _initial_occupancy(g, inst):
    occ = [EMPTY] * g.node_count
    for k, srcs in enumerate(inst.sources):
        for v in srcs:
            occ[v] = k
    return tuple(occ)


def _goal_test(inst):
    strict_goals = [frozenset(d) for d in inst.destinations]
    sizes = [len(s) for s in inst.sources]

    def is_goal(occ):
        for k, dests in enumerate(strict_goals):
            spots = frozenset(v for v, t in enumerate(occ) if t == k)
            if inst.flexible:
                if len(spots) != sizes[k] or not spots <= dests:
                    return False
            elif spots != dests:
                return False
        return True

    return is_goal


def _matchings(edges):
    """All matchings (as edge tuples) of an edge list, including the empty one."""
    results = []

    def rec(idx, used, chosen):
        if idx == len(edges):
            results.append(tuple(chosen))
            return
        rec(idx + 1, used, chosen)
        i, j = edges[idx]
        if i not in used and j not in used:
            chosen.append((i, j))
            rec(idx + 1, used | {i, j}, chosen)
            chosen.pop()

    rec(0, frozenset(), [])
    return results


def _apply(occ, matching):
    nxt = list(occ)
    for i, j in matching:
        nxt[i], nxt[j] = nxt[j], nxt[i]
    return tuple(nxt)


def _step_cost(occ, matching, costs):
    """Movement plus idle cost of applying one parallel-swap step."""
    cost = 0.0
    moved = set()
    for i, j in matching:
        a, b = occ[i], occ[j]
        if a != EMPTY:
            cost += costs.movement_cost(i, j)
            moved.add(i)
        if b != EMPTY:
            cost += costs.movement_cost(j, i)
            moved.add(j)
    for v, t in enumerate(occ):
        if t != EMPTY and v not in moved:
            cost += costs.movement_cost(v, v)
    return cost


def bfs_optimal_depth(g, inst) -> int:
    """Minimum number of parallel-swap steps, by BFS over occupancy configurations."""
    if g.node_count > _BFS_NODE_CAP:
        raise OracleGuardError(
            f"bfs_optimal_depth guard: {g.node_count} nodes > cap {_BFS_NODE_CAP}")
    is_goal = _goal_test(inst)
    start = _initial_occupancy(g, inst)
    if is_goal(start):
        return 0
    matchings = [m for m in _matchings(g.edges) if m]
    cap = g.node_count ** 2
    seen = {start}
    frontier = deque([start])
    depth = 0
    while frontier and depth < cap:
        depth += 1
        for _ in range(len(frontier)):
            occ = frontier.popleft()
            for m in matchings:
                if all(occ[i] != EMPTY or occ[j] != EMPTY for i, j in m):
                    nxt = _apply(occ, m)
                    if nxt in seen:
                        continue
                    if is_goal(nxt):
                        return depth
                    seen.add(nxt)
                    frontier.append(nxt)
    raise OracleGuardError(f"no goal configuration within {cap} steps")


def exhaustive_min_cost(g, costs, inst, depth: int):
    """Minimum accumulated cost over all depth-step schedules, or None if infeasible.

    Exhaustive enumeration of matching sequences with memoization on
    (configuration, steps remaining).  The empty matching (all idle) counts
    as a step.
    """
    if g.node_count > _COST_NODE_CAP:
        raise OracleGuardError(
            f"exhaustive_min_cost guard: {g.node_count} nodes > cap {_COST_NODE_CAP}")
    if depth > _COST_DEPTH_CAP:
        raise OracleGuardError(
            f"exhaustive_min_cost guard: depth {depth} > cap {_COST_DEPTH_CAP}")
    is_goal = _goal_test(inst)
    matchings = _matchings(g.edges)
    inf = float("inf")

    @lru_cache(maxsize=None)
    def best(occ, remaining):
        if remaining == 0:
            return 0.0 if is_goal(occ) else inf
        out = inf
        for m in matchings:
            if any(occ[i] == EMPTY and occ[j] == EMPTY for i, j in m):
                continue  # swapping two empty nodes changes nothing
            tail = best(_apply(occ, m), remaining - 1)
            if tail < inf:
                out = min(out, _step_cost(occ, m, costs) + tail)
        return out

    result = best(_initial_occupancy(g, inst), depth)
    best.cache_clear()
    return None if result == inf else result
