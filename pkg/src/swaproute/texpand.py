"""Time expansion of the hardware graph and reachability trimming.

A depth-T expansion has T movement layers (timesteps 1..T).  Each layer holds
one directed movement edge per direction of every hardware edge plus one idle
self-loop per node, for ``2|E| + |V|`` movements per timestep.  Per-team
boolean masks select the movements that survive trimming.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import distances_from_set


@dataclass(frozen=True)
class TimeExpandedGraph:
    """T-layer movement graph with per-team reachability masks.

    ``moves[m]`` is the movement edge with index m (idle edges have i == j);
    ``mask[k, t-1, m]`` says whether movement m at timestep t is usable by
    team k.  Special per-team source/destination attachment nodes live
    outside the movement layers and are handled by the model builder.
    """

    graph: object
    instance: object
    depth: int
    moves: tuple            # ((i, j), ...) of length 2|E| + |V|
    mask: np.ndarray        # bool, shape (K, T, len(moves))
    move_index: dict        # (i, j) -> movement index
    moves_from: tuple       # per node, movement indices with origin there
    moves_into: tuple       # per node, movement indices with target there

    def masked_in_count(self) -> int:
        return int(self.mask.sum())


def _movement_edges(g):
    moves = []
    for i, j in g.edges:
        moves.append((i, j))
        moves.append((j, i))
    for v in range(g.node_count):
        moves.append((v, v))
    return tuple(moves)


def expand(g, inst, depth: int) -> TimeExpandedGraph:
    """Build the depth-T expansion with all movements enabled.

    ``depth == 0`` yields a single layer with no movement edges; only the
    source/destination attachments remain.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    moves = _movement_edges(g)
    move_index = {mv: m for m, mv in enumerate(moves)}
    moves_from = [[] for _ in range(g.node_count)]
    moves_into = [[] for _ in range(g.node_count)]
    for m, (i, j) in enumerate(moves):
        moves_from[i].append(m)
        if j != i:
            moves_into[j].append(m)
        else:
            moves_into[i].append(m)
    mask = np.ones((inst.team_count, depth, len(moves)), dtype=bool)
    return TimeExpandedGraph(
        graph=g, instance=inst, depth=depth, moves=moves, mask=mask,
        move_index=move_index,
        moves_from=tuple(tuple(ms) for ms in moves_from),
        moves_into=tuple(tuple(ms) for ms in moves_into),
    )


def trim(teg: TimeExpandedGraph) -> TimeExpandedGraph:
    """Remove per-team movements that no feasible solution can use.

    A movement i -> j at timestep t survives for team k only when i lies
    within t-1 hops of the team's sources (forward sweep) and j within
    T-t hops of its destinations (backward sweep).  Reachability is a BFS
    ball on the hardware graph, ignoring occupancy, so trimming is a sound
    over-approximation and never cuts a feasible solution.
    """
    g, inst, depth = teg.graph, teg.instance, teg.depth
    mask = np.zeros_like(teg.mask)
    origins = np.array([mv[0] for mv in teg.moves])
    targets = np.array([mv[1] for mv in teg.moves])
    for k in range(inst.team_count):
        d_src = np.array(distances_from_set(g, inst.sources[k]))
        d_dst = np.array(distances_from_set(g, inst.destinations[k]))
        for t in range(1, depth + 1):
            mask[k, t - 1] = (d_src[origins] <= t - 1) & (d_dst[targets] <= depth - t)
    return TimeExpandedGraph(
        graph=g, instance=inst, depth=depth, moves=teg.moves, mask=mask,
        move_index=teg.move_index, moves_from=teg.moves_from, moves_into=teg.moves_into,
    )


def to_dot(teg: TimeExpandedGraph, team: int = 0) -> str:
    """DOT-format dump of one team's expansion; masked-out edges are grayed.

    Debugging aid only, not a stability contract.
    """
    lines = ["digraph time_expansion {", "  rankdir=LR;"]
    for t in range(teg.depth + 1):
        lines.append(f"  subgraph cluster_t{t} {{ label=\"t{t}\";")
        for v in range(teg.graph.node_count):
            lines.append(f"    n{t}_{v} [label=\"{v}\"];")
        lines.append("  }")
    for t in range(1, teg.depth + 1):
        for m, (i, j) in enumerate(teg.moves):
            style = "" if teg.mask[team, t - 1, m] else " [color=gray, style=dashed]"
            lines.append(f"  n{t - 1}_{i} -> n{t}_{j}{style};")
    inst = teg.instance
    for k in range(inst.team_count):
        lines.append(f"  src_{k} [shape=box];")
        lines.append(f"  dst_{k} [shape=box];")
        for v in inst.sources[k]:
            lines.append(f"  src_{k} -> n0_{v};")
        for v in inst.destinations[k]:
            lines.append(f"  n{teg.depth}_{v} -> dst_{k};")
    lines.append("}")
    return "\n".join(lines) + "\n"
