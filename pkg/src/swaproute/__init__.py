"""swaproute: exact multi-team qubit routing via parallel SWAPs.

Routes teams of abstract qubits on a hardware graph, minimizing SWAP depth
first and accumulated gate/idle error second, by iterative deepening over a
time-expanded graph solved as a binary integer linear program.
"""

from .graph import HardwareGraph, build_grid, build_layout, load_graph, save_graph
from .instance import MqpfInstance, random_instance
from .noise import ErrorMap, NoiseParams, movement_costs, sample_error_map
from .route import RouteConfig, RoutingSolution, solve_mqpf
from .solver import SolverConfig, SolveResult

__all__ = [
    "HardwareGraph", "build_grid", "build_layout", "load_graph", "save_graph",
    "MqpfInstance", "random_instance",
    "ErrorMap", "NoiseParams", "movement_costs", "sample_error_map",
    "RouteConfig", "RoutingSolution", "solve_mqpf",
    "SolverConfig", "SolveResult",
]

__version__ = "0.1.0"
