"""Shared helpers for the test suite."""

import numpy as np
import pytest

from swaproute import graph, instance, noise


def build_cycle(n):
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    return graph.HardwareGraph(n, edges)


def uniform_error_map(g, eps=0.001, t1=176.0, t2=140.0):
    """Deterministic error map with identical values everywhere."""
    return noise.ErrorMap(
        cnot_error={e: eps for e in g.edges},
        t1=(t1,) * g.node_count,
        t2=(t2,) * g.node_count,
    )


def random_maybe_flexible_instance(g, n_qubits, mode, seed, flexible):
    """A strict random instance, optionally relaxed to flexible destinations.

    The flexible variant keeps the sampled destinations and enlarges each
    team's destination set with extra random nodes (duplicates across teams
    allowed), which is exactly the relaxation the flexible mode permits.
    """
    inst = instance.random_instance(g, n_qubits, mode, seed)
    if not flexible:
        return inst
    rng = np.random.default_rng(seed + 10**9)
    dests = []
    for d in inst.destinations:
        extra = int(rng.integers(0, 2))
        pool = [v for v in range(g.node_count) if v not in d]
        if extra and pool:
            picks = rng.choice(len(pool), size=min(extra, len(pool)), replace=False)
            d = tuple(d) + tuple(pool[i] for i in picks)
        dests.append(tuple(d))
    return instance.MqpfInstance(sources=inst.sources, destinations=tuple(dests),
                                 flexible=True)


@pytest.fixture
def grid12():
    return graph.build_grid(1, 2)


@pytest.fixture
def grid23():
    return graph.build_grid(2, 3)
