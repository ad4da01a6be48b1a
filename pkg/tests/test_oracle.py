import math

import pytest

from swaproute import oracle
from swaproute.graph import HardwareGraph, build_grid
from swaproute.instance import MqpfInstance
from swaproute.noise import movement_costs
from swaproute.oracle import OracleGuardError, bfs_optimal_depth, exhaustive_min_cost

from conftest import uniform_error_map


def test_already_solved_depth_zero():
    g = build_grid(1, 3)
    inst = MqpfInstance(sources=((0,),), destinations=((0,),))
    assert bfs_optimal_depth(g, inst) == 0


def test_swap_pair_depth_one():
    g = build_grid(1, 2)
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((1,), (0,)))
    assert bfs_optimal_depth(g, inst) == 1


def test_two_team_relabeled_path_depth_three():
    # 4-node path in node order 1-0-2-3; team 0: {0}->{3}, team 1: {2,3}->{0,1}
    g = HardwareGraph(4, [(0, 1), (0, 2), (2, 3)])
    inst = MqpfInstance(sources=((0,), (2, 3)), destinations=((3,), (0, 1)))
    assert bfs_optimal_depth(g, inst) == 3


def test_flexible_goal_is_subset():
    g = build_grid(1, 3)
    strict = MqpfInstance(sources=((0,),), destinations=((2,),))
    flex = MqpfInstance(sources=((0,),), destinations=((0, 2),), flexible=True)
    assert bfs_optimal_depth(g, strict) == 2
    assert bfs_optimal_depth(g, flex) == 0


def test_bfs_guard():
    g = build_grid(4, 4)
    inst = MqpfInstance(sources=((0,),), destinations=((15,),))
    with pytest.raises(OracleGuardError):
        bfs_optimal_depth(g, inst)


def test_depth_within_global_bound():
    for rows, cols in ((1, 4), (2, 3)):
        g = build_grid(rows, cols)
        n = g.node_count
        inst = MqpfInstance(sources=(tuple(range(n)),),
                            destinations=(tuple(range(n)),))
        assert bfs_optimal_depth(g, inst) <= n * n


def test_single_team_linear_bound():
    # single team: depth never exceeds N + |V| - 1
    g = build_grid(2, 3)
    for seed_src, seed_dst in (((0, 1), (4, 5)), ((0, 5), (2, 3))):
        inst = MqpfInstance(sources=(seed_src,), destinations=(seed_dst,))
        d = bfs_optimal_depth(g, inst)
        assert d <= len(seed_src) + g.node_count - 1


def test_min_cost_below_optimal_depth_infeasible():
    g = build_grid(1, 3)
    inst = MqpfInstance(sources=((0,),), destinations=((2,),))
    costs = movement_costs(g, uniform_error_map(g), "simple")
    assert exhaustive_min_cost(g, costs, inst, 1) is None


def test_min_cost_one_swap_simple():
    g = build_grid(1, 2)
    inst = MqpfInstance(sources=((0,),), destinations=((1,),))
    costs = movement_costs(g, uniform_error_map(g, eps=0.001), "simple")
    c = exhaustive_min_cost(g, costs, inst, 1)
    assert c == pytest.approx(-3.0 * math.log(0.999), abs=1e-15)


def test_min_cost_monotone_in_depth():
    # extra depth can only keep or reduce the minimum cost (idle is free here)
    g = build_grid(1, 3)
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((1,), (0,)))
    costs = movement_costs(g, uniform_error_map(g), "simple")
    c1 = exhaustive_min_cost(g, costs, inst, 1)
    c2 = exhaustive_min_cost(g, costs, inst, 2)
    assert c1 is not None and c2 is not None
    assert c2 <= c1 + 1e-12


def test_min_cost_guards():
    g = build_grid(4, 4)
    inst = MqpfInstance(sources=((0,),), destinations=((15,),))
    costs = movement_costs(g, uniform_error_map(g), "simple")
    with pytest.raises(OracleGuardError):
        exhaustive_min_cost(g, costs, inst, 2)
    g2 = build_grid(1, 3)
    inst2 = MqpfInstance(sources=((0,),), destinations=((2,),))
    costs2 = movement_costs(g2, uniform_error_map(g2), "simple")
    with pytest.raises(OracleGuardError):
        exhaustive_min_cost(g2, costs2, inst2, 9)


def test_feasible_at_t_implies_feasible_at_t_plus_one():
    g = build_grid(2, 2)
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((3,), (2,)))
    costs = movement_costs(g, uniform_error_map(g), "simple")
    d = bfs_optimal_depth(g, inst)
    assert exhaustive_min_cost(g, costs, inst, d) is not None
    assert exhaustive_min_cost(g, costs, inst, d + 1) is not None
