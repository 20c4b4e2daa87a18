import numpy as np
import pytest

from graphdpp import (
    SbmConfig,
    complete_graph,
    cycle_graph,
    disjoint_cliques,
    generate_sbm,
    path_graph,
    random_geometric_graph,
    star_graph,
)


def small_corpus():
    """Named small graphs (N <= 50) reused across dense-oracle checks."""
    rng = np.random.default_rng(20240917)
    return [
        ("path-2", path_graph(2)),
        ("path-10", path_graph(10)),
        ("cycle-6", cycle_graph(6)),
        ("complete-5", complete_graph(5)),
        ("star-10", star_graph(10)),
        ("two-cliques-5-5", disjoint_cliques([5, 5])),
        ("geometric-30", random_geometric_graph(30, 0.35, rng)),
        ("sbm-50", generate_sbm(SbmConfig(50, 5, 0.25, average_degree=8.0, seed=3))),
    ]


@pytest.fixture(scope="session")
def corpus():
    return small_corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(0xBADC0DE)
