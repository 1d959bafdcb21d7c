import random

import networkx as nx
from hypothesis import settings, strategies as st

from semirandom.multigraph import MultiGraph

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@st.composite
def edge_lists(draw, max_n=8, max_edges=30, loops=True):
    """(n, edges) with arbitrary repeats and (optionally) loops."""
    n = draw(st.integers(1, max_n))
    vert = st.integers(0, n - 1)
    edges = draw(st.lists(st.tuples(vert, vert), max_size=max_edges))
    if not loops:
        edges = [(u, v) for u, v in edges if u != v]
    return n, edges


@st.composite
def simple_graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return n, [p for p, keep in zip(pairs, mask) if keep]


def to_nx(n, edges):
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from((u, v) for u, v in edges if u != v)
    return g


def random_multigraph(n, m, seed):
    rng = random.Random(seed)
    return MultiGraph.from_edges(n, [(rng.randrange(n), rng.randrange(n)) for _ in range(m)])
