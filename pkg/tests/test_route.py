import json
import math

import pytest

from swaproute import route
from swaproute.graph import HardwareGraph, build_grid
from swaproute.instance import MqpfInstance, random_instance
from swaproute.noise import movement_costs
from swaproute.route import (RouteConfig, RouteError, lower_bound_dijkstra,
                             lower_bound_single_team, metrics,
                             schedule_from_paths, solution_to_json, solve_mqpf,
                             validate)
from swaproute.solver import SolverConfig

from conftest import uniform_error_map


def relabeled_path4():
    # 4-node path in node order 1-0-2-3
    return HardwareGraph(4, [(0, 1), (0, 2), (2, 3)])


def two_team_instance():
    return MqpfInstance(sources=((0,), (2, 3)), destinations=((3,), (0, 1)))


def test_dijkstra_bound_zero_when_solved():
    g = build_grid(2, 2)
    inst = MqpfInstance(sources=((0, 1),), destinations=((0, 1),))
    assert lower_bound_dijkstra(g, inst) == 0


def test_dijkstra_bound_path_distance():
    g = build_grid(1, 4)
    inst = MqpfInstance(sources=((0,),), destinations=((3,),))
    assert lower_bound_dijkstra(g, inst) == 3


def test_dijkstra_bound_two_teams():
    g = build_grid(1, 4)
    inst = MqpfInstance(sources=((0,), (3,)), destinations=((3,), (0,)))
    assert lower_bound_dijkstra(g, inst) == 3


def test_single_team_bound_identity_on_single_team():
    g = build_grid(1, 3)
    inst = MqpfInstance(sources=((0,),), destinations=((2,),))
    assert lower_bound_single_team(g, inst) == 2


def test_single_team_bound_swap_pair_is_zero():
    g = build_grid(1, 2)
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((1,), (0,)))
    assert lower_bound_single_team(g, inst) == 0


def test_solve_already_solved():
    g = build_grid(2, 2)
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((0,), (1,)))
    sol = solve_mqpf(g, uniform_error_map(g), inst)
    assert sol.status == "optimal"
    assert sol.depth == 0
    assert sol.cost == 0.0
    assert sol.fidelity == 1.0


def test_solve_swap_pair_simple_model():
    g = build_grid(1, 2)
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((1,), (0,)))
    sol = solve_mqpf(g, uniform_error_map(g, eps=0.001), inst)
    assert sol.depth == 1
    assert sol.swap_count == 1
    assert sol.error == pytest.approx(1.0 - 0.999**3, abs=1e-12)
    assert sol.fidelity == pytest.approx(0.999**3, abs=1e-12)


def test_solve_two_team_example_depth_three():
    g = relabeled_path4()
    sol = solve_mqpf(g, uniform_error_map(g), two_team_instance())
    assert sol.status == "optimal"
    assert sol.depth == 3
    assert len(sol.paths) == 3
    assert all(len(p) == 4 for p in sol.paths)
    assert validate(g, two_team_instance(), sol) == []


def test_extract_paths_positional_identity():
    g = relabeled_path4()
    sol = solve_mqpf(g, uniform_error_map(g), two_team_instance())
    assert sol.teams == (0, 1, 1)
    assert sol.paths[0][0] == 0       # team 0 qubit starts at its source
    assert sol.paths[1][0] == 2       # team 1 qubits sorted by source node
    assert sol.paths[2][0] == 3


def test_validate_accepts_swap_crossing():
    g = build_grid(1, 2)
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((1,), (0,)))
    sol = route.RoutingSolution(status="optimal", depth=1, teams=(0, 1),
                                paths=((0, 1), (1, 0)))
    assert validate(g, inst, sol) == []


def test_validate_rejects_collision():
    g = build_grid(1, 3)
    inst = MqpfInstance(sources=((0,), (2,)), destinations=((1,), (1,)))
    sol = route.RoutingSolution(status="optimal", depth=1, teams=(0, 1),
                                paths=((0, 1), (2, 1)))
    assert any("both at node" in v for v in validate(g, inst, sol))


def test_validate_rejects_non_swap_movement():
    g = build_grid(1, 3)
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((1,), (2,)))
    sol = route.RoutingSolution(status="optimal", depth=1, teams=(0, 1),
                                paths=((0, 1), (1, 2)))
    assert any("without swapping" in v for v in validate(g, inst, sol))


def test_validate_rejects_non_edge_step():
    g = build_grid(1, 3)
    inst = MqpfInstance(sources=((0,),), destinations=((2,),))
    sol = route.RoutingSolution(status="optimal", depth=1, teams=(0,),
                                paths=((0, 2),))
    assert any("not a hardware edge" in v for v in validate(g, inst, sol))


def test_depth_slack_never_costlier_simple_model():
    # With free idling, any depth-T schedule pads to depth T+1 at equal cost,
    # so the optimum can only improve.  (Not true for the extended model,
    # where every extra timestep charges idle error.)
    g = build_grid(2, 3)
    emap = uniform_error_map(g)
    for seed in range(10):
        inst = random_instance(g, 3, "mixed", seed)
        base = solve_mqpf(g, emap, inst, RouteConfig(error_model="simple"))
        slack = solve_mqpf(g, emap, inst,
                           RouteConfig(error_model="simple", depth_slack=1))
        assert slack.depth == base.depth + 1
        assert slack.cost <= base.cost + 1e-9


def test_flexible_no_deeper_than_best_strict():
    g = build_grid(1, 3)
    emap = uniform_error_map(g)
    flex = MqpfInstance(sources=((0,),), destinations=((1, 2),), flexible=True)
    best_strict = min(
        solve_mqpf(g, emap, MqpfInstance(sources=((0,),), destinations=((d,),))).depth
        for d in (1, 2))
    assert solve_mqpf(g, emap, flex).depth <= best_strict


def test_timeout_reports_timed_out():
    g = build_grid(4, 4)
    inst = random_instance(g, 6, "independent", 0)
    sol = solve_mqpf(g, uniform_error_map(g), inst, RouteConfig(timeout=0.0))
    assert sol.status == "timed_out"
    assert not sol.solved


def test_invalid_instance_rejected():
    g = build_grid(1, 2)
    inst = MqpfInstance(sources=((0,), (0,)), destinations=((0,), (1,)))
    with pytest.raises(RouteError):
        solve_mqpf(g, uniform_error_map(g), inst)


def test_metrics_one_swap_one_idle_extended():
    g = build_grid(1, 3)
    emap = uniform_error_map(g, eps=0.004)
    costs = movement_costs(g, emap, "extended")
    paths = ((0, 1), (1, 0), (2, 2))  # one swap plus one idling qubit
    m = metrics(paths, costs)
    expect_swap = costs.movement_cost(0, 1) + costs.movement_cost(1, 0)
    expect_idle = costs.movement_cost(2, 2)
    assert m["swap_cost"] == pytest.approx(expect_swap, abs=1e-12)
    assert m["idle_cost"] == pytest.approx(expect_idle, abs=1e-12)
    assert m["cost"] == pytest.approx(expect_swap + expect_idle, abs=1e-12)
    assert m["fidelity"] == pytest.approx(math.exp(-m["cost"]), abs=1e-12)
    assert m["swap_count"] == 1
    assert m["idle_ratio"] == pytest.approx(
        (1 - math.exp(-expect_idle)) / (1 - math.exp(-expect_swap)), abs=1e-12)


def test_metrics_zero_swap_ratio_absent():
    g = build_grid(1, 2)
    costs = movement_costs(g, uniform_error_map(g), "extended")
    m = metrics(((0, 0), (1, 1)), costs)
    assert m["swap_cost"] == 0.0
    assert m["idle_ratio"] is None


def test_metrics_match_solver_objective():
    g = build_grid(2, 3)
    emap = uniform_error_map(g, eps=0.005)
    for seed in range(30):
        inst = random_instance(g, 3, ("independent", "mixed", "single")[seed % 3], seed)
        for model in ("simple", "extended"):
            sol = solve_mqpf(g, emap, inst, RouteConfig(error_model=model))
            costs = movement_costs(g, emap, model)
            m = metrics(sol.paths, costs)
            assert m["cost"] == pytest.approx(sol.cost, abs=1e-9)


def test_schedule_from_paths():
    sched = schedule_from_paths(((0, 1, 1), (1, 0, 0), (2, 2, 3)))
    assert sched == (((0, 1),), ((2, 3),))


def test_solution_json_round_trip_fields():
    g = build_grid(1, 2)
    inst = MqpfInstance(sources=((0,), (1,)), destinations=((1,), (0,)))
    sol = solve_mqpf(g, uniform_error_map(g), inst)
    doc = json.loads(solution_to_json(sol))
    assert doc["status"] == "optimal"
    assert doc["depth"] == 1
    assert doc["paths"] == [[0, 1], [1, 0]]
    assert doc["swaps"] == [[[0, 1]]]
    assert doc["fidelity"] == pytest.approx(math.exp(-doc["cost"]))


def test_infeasible_up_to_cap_unreachable_in_connected_graphs():
    # connected graphs always admit a schedule, so a tiny cap is never hit
    g = build_grid(1, 4)
    inst = MqpfInstance(sources=((0,), (3,)), destinations=((3,), (0,)))
    sol = solve_mqpf(g, uniform_error_map(g), inst)
    assert sol.solved
    assert sol.depth <= g.node_count**2
