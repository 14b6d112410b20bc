import numpy as np
import pytest

from polygossip.graphgen import Graph, GraphSpec, build_gossip_matrix, generate


def make_cycle_matrix(n: int, lazy: bool = False):
    """W = A/2 on the n-cycle, or the lazy variant I/2 + A/4."""
    g = generate(GraphSpec(family="cycle", n=n))
    if lazy:
        return g, build_gossip_matrix(g, "uniform_degree", d_max=4)
    return g, build_gossip_matrix(g, "adjacency_over_d")


def make_circulant3(n: int) -> Graph:
    """3-regular circulant: ring edges plus antipodal chords (n even)."""
    assert n % 2 == 0
    adj = [sorted({(i - 1) % n, (i + 1) % n, (i + n // 2) % n}) for i in range(n)]
    g = Graph(n=n, adjacency=adj, edge_count=sum(len(a) for a in adj) // 2)
    g.validate()
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
