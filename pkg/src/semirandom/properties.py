"""Graph properties used as stop conditions and verifiers.

Everything except the degree thresholds is evaluated on the simple
projection (loops dropped, parallel edges collapsed).
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from collections import deque
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .grammar import SpecError, parse_spec, reject_extra, take_int
from .multigraph import DegreeMode, MultiGraph, read_edge_list

MAX_PATTERN_ORDER = 10
MAX_HAMILTON_ORDER = 24
MAX_ORIENTATION_EDGES = 20


class BudgetExceeded(ValueError):
    """Input is larger than an exact routine is allowed to handle."""


class OddOrderError(ValueError):
    """Perfect matchings are only asked about for an even number of vertices."""


# -- small pattern graphs --------------------------------------------------


@dataclass(frozen=True)
class SmallGraph:
    """Simple graph on ``0 .. order-1`` given by an edge list."""

    order: int
    edges: tuple[tuple[int, int], ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValueError("order must be non-negative")
        clean = set()
        for u, v in self.edges:
            if not (0 <= u < self.order and 0 <= v < self.order):
                raise ValueError(f"edge ({u}, {v}) outside [0, {self.order})")
            if u == v:
                raise ValueError("pattern graphs have no loops")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    def __str__(self) -> str:
        return self.name or f"SmallGraph({self.order}, {len(self.edges)} edges)"

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.order)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency()]

    def induced(self, vertices: Iterable[int]) -> "SmallGraph":
        """Subgraph induced on ``vertices``, relabelled in the given order."""
        vs = list(vertices)
        index = {v: i for i, v in enumerate(vs)}
        return SmallGraph(len(vs), tuple((index[u], index[v]) for u, v in self.edges if u in index and v in index))

    @classmethod
    def complete(cls, k: int) -> "SmallGraph":
        return cls(k, tuple(itertools.combinations(range(k), 2)), f"K{k}")

    @classmethod
    def cycle(cls, k: int) -> "SmallGraph":
        if k < 3:
            raise ValueError("a cycle needs at least 3 vertices")
        return cls(k, tuple((i, (i + 1) % k) for i in range(k)), f"C{k}")

    @classmethod
    def path(cls, k: int) -> "SmallGraph":
        """Path on ``k`` vertices."""
        return cls(k, tuple((i, i + 1) for i in range(k - 1)), f"P{k}")

    @classmethod
    def perfect_matching(cls, k: int) -> "SmallGraph":
        if k % 2:
            raise ValueError("a perfect matching needs an even number of vertices")
        return cls(k, tuple((2 * i, 2 * i + 1) for i in range(k // 2)), f"matching:{k}")

    @classmethod
    def empty(cls, k: int) -> "SmallGraph":
        return cls(k, (), f"E{k}")

    @classmethod
    def from_file(cls, path: str | Path) -> "SmallGraph":
        """1-based edge list; the order is the largest vertex id mentioned."""
        with open(path) as fh:
            edges = read_edge_list(fh)
        order = max((max(e) for e in edges), default=-1) + 1
        return cls(order, tuple(edges), Path(path).name)

    @classmethod
    def parse(cls, text: str) -> "SmallGraph":
        """Built-in names ``K<k>``, ``C<k>``, ``P<k>``, ``E<k>``, ``matching:<k>``, or an edge-list file."""
        m = re.fullmatch(r"([KCPE])(\d+)", text.strip())
        if m:
            kind, k = m.group(1), int(m.group(2))
            return {"K": cls.complete, "C": cls.cycle, "P": cls.path, "E": cls.empty}[kind](k)
        m = re.fullmatch(r"matching:(\d+)", text.strip())
        if m:
            return cls.perfect_matching(int(m.group(1)))
        if Path(text).is_file():
            return cls.from_file(text)
        raise ValueError(f"unknown graph {text!r}: use K<k>, C<k>, P<k>, E<k>, matching:<k> or an edge-list file")


GraphLike = MultiGraph | SmallGraph | Sequence[Iterable[int]]


def simple_adjacency(g: GraphLike) -> list[set[int]]:
    """Simple-projection adjacency of any supported graph representation."""
    if isinstance(g, MultiGraph):
        return g.simple_adjacency()
    if isinstance(g, SmallGraph):
        return g.adjacency()
    return [set(a) - {i} for i, a in enumerate(g)]


def _csr(adj: Sequence[Iterable[int]]) -> tuple[np.ndarray, np.ndarray]:
    n = len(adj)
    indptr = np.zeros(n + 1, np.int64)
    lists = [sorted(a) for a in adj]
    for i, a in enumerate(lists):
        indptr[i + 1] = indptr[i] + len(a)
    indices = np.fromiter(itertools.chain.from_iterable(lists), np.int64, count=int(indptr[-1]))
    return indptr, indices


# -- predicates ----------------------------------------------------------------


def has_min_degree(g: MultiGraph, k: int, mode: DegreeMode = DegreeMode.FULL) -> bool:
    return g.min_degree(mode) >= k


def is_k_connected(g: GraphLike, k: int) -> bool:
    """Exact k-vertex-connectivity of the simple projection.

    Needs more than ``k`` vertices and no separating set of fewer than
    ``k`` vertices; uses max-flow on the vertex-split graph between the
    pairs of the Even/Esfahanian-Hakimi reduction.
    """
    adj = simple_adjacency(g)
    n = len(adj)
    if n > 100_000 or k > 10:
        raise BudgetExceeded("k-connectivity is limited to n <= 1e5 and k <= 10")
    if n <= k:
        return False
    if k <= 0:
        return True
    if min(len(a) for a in adj) < k:
        return False
    indptr, indices = _csr(adj)
    return bool(_kernels.k_connected_csr(indptr, indices, n, k))


def contains_subgraph(g: GraphLike, h: SmallGraph) -> bool:
    """Whether the simple projection of ``g`` has a (not necessarily induced) copy of ``h``."""
    return find_subgraph(g, h) is not None


def find_subgraph(g: GraphLike, h: SmallGraph) -> list[int] | None:
    """An injective map ``V(h) -> V(g)`` preserving edges, or None.

    Backtracking over pattern vertices in a connectivity-first order;
    host candidates come from the neighbourhood of an already-mapped
    neighbour and must have enough degree.
    """
    if h.order > MAX_PATTERN_ORDER:
        raise BudgetExceeded(f"pattern graphs are limited to {MAX_PATTERN_ORDER} vertices")
    adj = simple_adjacency(g)
    n = len(adj)
    if h.order == 0:
        return []
    if h.order > n:
        return None
    hadj = h.adjacency()
    hdeg = [len(a) for a in hadj]

    # order: next vertex has the most already-placed neighbours, then highest degree
    order: list[int] = []
    placed: set[int] = set()
    while len(order) < h.order:
        best = max(
            (p for p in range(h.order) if p not in placed),
            key=lambda p: (len(hadj[p] & placed), hdeg[p], -p),
        )
        order.append(best)
        placed.add(best)
    earlier = [[q for q in order[:i] if q in hadj[p]] for i, p in enumerate(order)]
    deg = [len(a) for a in adj]
    by_degree: dict[int, list[int]] = {}

    def free_candidates(need: int) -> list[int]:
        if need not in by_degree:
            by_degree[need] = [x for x in range(n) if deg[x] >= need]
        return by_degree[need]

    phi = [-1] * h.order
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == h.order:
            return True
        p = order[i]
        back = earlier[i]
        if back:
            anchor = min((phi[q] for q in back), key=deg.__getitem__)
            cands: Iterable[int] = adj[anchor]
        else:
            cands = free_candidates(hdeg[p])
        need = hdeg[p]
        for x in cands:
            if x in used or deg[x] < need:
                continue
            if any(phi[q] not in adj[x] for q in back):
                continue
            phi[p] = x
            used.add(x)
            if extend(i + 1):
                return True
            used.discard(x)
        phi[p] = -1
        return False

    return list(phi) if extend(0) else None


def maximum_matching(g: GraphLike) -> list[int]:
    """Maximum matching of the simple projection (Edmonds' blossom algorithm).

    Returns ``mate`` with ``mate[v] = -1`` for unmatched vertices.
    """
    adj = [sorted(a) for a in simple_adjacency(g)]
    mate, _ = _blossom(adj, stop_on_exposed=False)
    return mate


def has_perfect_matching(g: GraphLike) -> bool:
    adj = [sorted(a) for a in simple_adjacency(g)]
    n = len(adj)
    if n % 2:
        raise OddOrderError(f"perfect matching asked for odd n = {n}")
    if n > 100_000:
        raise BudgetExceeded("perfect matching is limited to n <= 1e5")
    if any(not a for a in adj):
        return False
    _, perfect = _blossom(adj, stop_on_exposed=True)
    return perfect


def _blossom(adj: list[list[int]], stop_on_exposed: bool) -> tuple[list[int], bool]:
    n = len(adj)
    mate = [-1] * n
    # greedy start, low-degree vertices first
    for v in sorted(range(n), key=lambda x: len(adj[x])):
        if mate[v] == -1:
            for u in adj[v]:
                if mate[u] == -1:
                    mate[u], mate[v] = v, u
                    break

    parent = [-1] * n
    base = list(range(n))
    used = [False] * n

    def lca(a: int, b: int) -> int:
        seen = set()
        while True:
            a = base[a]
            seen.add(a)
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if b in seen:
                return b
            b = parent[mate[b]]

    def mark_path(v: int, b: int, child: int, blossom: set[int]) -> None:
        while base[v] != b:
            blossom.add(base[v])
            blossom.add(base[mate[v]])
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    def find_path(root: int) -> int:
        for i in range(n):
            parent[i] = -1
            base[i] = i
            used[i] = False
        used[root] = True
        q = deque([root])
        while q:
            v = q.popleft()
            for to in adj[v]:
                if base[v] == base[to] or mate[v] == to:
                    continue
                if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                    cur = lca(v, to)
                    blossom: set[int] = set()
                    mark_path(v, cur, to, blossom)
                    mark_path(to, cur, v, blossom)
                    for i in range(n):
                        if base[i] in blossom:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                q.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if mate[to] == -1:
                        return to
                    used[mate[to]] = True
                    q.append(mate[to])
        return -1

    perfect = True
    for root in range(n):
        if mate[root] != -1:
            continue
        end = find_path(root)
        if end == -1:
            perfect = False
            if stop_on_exposed:
                return mate, False
            continue
        v = end
        while v != -1:
            pv = parent[v]
            nxt = mate[pv]
            mate[v] = pv
            mate[pv] = v
            v = nxt
    return mate, perfect and all(m != -1 for m in mate)


def has_hamilton_cycle(g: GraphLike) -> bool:
    """Exact Hamiltonicity of the simple projection by subset DP (n <= 24)."""
    adj = simple_adjacency(g)
    n = len(adj)
    if n > MAX_HAMILTON_ORDER:
        raise BudgetExceeded(f"Hamiltonicity is limited to n <= {MAX_HAMILTON_ORDER}")
    if n < 3 or any(len(a) < 2 for a in adj):
        return False
    bits = np.array([sum(1 << u for u in a) for a in adj], dtype=np.int64)
    return bool(_kernels.hamilton_dp(bits, n))


def is_hamilton_cycle(g: GraphLike, cycle: Sequence[int]) -> bool:
    """Whether ``cycle`` visits every vertex once along edges of ``g``."""
    adj = simple_adjacency(g)
    n = len(adj)
    if n < 3 or len(cycle) != n or set(cycle) != set(range(n)):
        return False
    return all(cycle[i - 1] in adj[cycle[i]] for i in range(n))


def degeneracy(h: GraphLike) -> tuple[int, list[int]]:
    """Degeneracy ``d`` and an ordering in which each vertex has at most ``d``
    neighbours before it (reverse of a min-degree peeling order)."""
    adj = simple_adjacency(h)
    n = len(adj)
    deg = [len(a) for a in adj]
    buckets: list[set[int]] = [set() for _ in range(max(deg, default=0) + 1)]
    for v, d in enumerate(deg):
        buckets[d].add(v)
    removed = [False] * n
    peel: list[int] = []
    d_max = 0
    lo = 0
    for _ in range(n):
        lo = max(lo - 1, 0)
        while not buckets[lo]:
            lo += 1
        v = buckets[lo].pop()  # int hashing is not salted, so this is deterministic
        removed[v] = True
        d_max = max(d_max, lo)
        peel.append(v)
        for u in adj[v]:
            if not removed[u]:
                buckets[deg[u]].discard(u)
                deg[u] -= 1
                buckets[deg[u]].add(u)
    return d_max, peel[::-1]


def min_max_outdegree(h: SmallGraph | GraphLike) -> int:
    """``min over orientations D of max out-degree``, by exhaustive search with pruning."""
    adj = simple_adjacency(h)
    edges = [(u, v) for u in range(len(adj)) for v in adj[u] if u < v]
    if len(edges) > MAX_ORIENTATION_EDGES:
        raise BudgetExceeded(f"orientation search is limited to {MAX_ORIENTATION_EDGES} edges")
    if not edges:
        return 0
    n = len(adj)
    lo = math.ceil(len(edges) / n)
    for cap in range(lo, len(edges) + 1):
        if _orientable(edges, n, cap):
            return cap
    raise AssertionError("unreachable: cap = |E| always works")


def _orientable(edges: list[tuple[int, int]], n: int, cap: int) -> bool:
    out = [0] * n

    def go(i: int) -> bool:
        if i == len(edges):
            return True
        u, v = edges[i]
        for a in (u, v):
            if out[a] < cap:
                out[a] += 1
                if go(i + 1):
                    return True
                out[a] -= 1
        return False

    return go(0)


# -- predicate objects for the engine --------------------------------------------


def _min_degree_check(g: MultiGraph, k: int, mode: DegreeMode) -> bool:
    return g.min_degree(mode) >= k


@dataclass(frozen=True)
class PropertyPredicate:
    """A named monotone graph property.

    ``expensive`` predicates are only probed every :meth:`stride` rounds
    once ``witness`` (a cheap necessary condition) holds; the engine then
    bisects the edge log for the exact hitting round.
    """

    name: str
    check: Callable[[MultiGraph], bool]
    modes: tuple[DegreeMode, ...] = ()
    expensive: bool = False
    witness: "PropertyPredicate | None" = None
    degree_goal: int | None = None
    monotone: bool = True
    threshold: tuple[DegreeMode, int] | None = None  # set for "min degree >= k" predicates

    def __call__(self, g: MultiGraph) -> bool:
        return self.check(g)

    def stride(self, n: int) -> int:
        return max(1, math.ceil(n / 100))


def min_degree_property(k: int, mode: DegreeMode = DegreeMode.FULL) -> PropertyPredicate:
    mode = DegreeMode(mode)
    return PropertyPredicate(
        name=f"min_degree:k={k},mode={mode.name.lower()}",
        check=functools.partial(_min_degree_check, k=k, mode=mode),
        modes=(mode,),
        degree_goal=max(k, 1),
        threshold=(mode, k),
    )


def k_connected_property(k: int) -> PropertyPredicate:
    return PropertyPredicate(
        name=f"k_connected:k={k}",
        check=functools.partial(_k_connected_check, k=k),
        expensive=True,
        witness=min_degree_property(k, DegreeMode.SIMPLE),
        degree_goal=max(k, 1),
    )


def _k_connected_check(g: MultiGraph, k: int) -> bool:
    return is_k_connected(g, k)


def _subgraph_check(g: MultiGraph, h: SmallGraph) -> bool:
    return contains_subgraph(g, h)


def subgraph_property(h: SmallGraph) -> PropertyPredicate:
    return PropertyPredicate(
        name=f"subgraph:graph={h}",
        check=functools.partial(_subgraph_check, h=h),
        expensive=True,
    )


def perfect_matching_property() -> PropertyPredicate:
    return PropertyPredicate(
        name="perfect_matching",
        check=has_perfect_matching,
        expensive=True,
        witness=min_degree_property(1, DegreeMode.SIMPLE),
        degree_goal=1,
    )


def hamilton_property() -> PropertyPredicate:
    return PropertyPredicate(
        name="hamilton",
        check=has_hamilton_cycle,
        expensive=True,
        witness=min_degree_property(2, DegreeMode.SIMPLE),
        degree_goal=2,
    )


def predicate_from_spec(text: str) -> PropertyPredicate:
    """Build a predicate from ``min_degree:k=K,mode=M``, ``k_connected:k=K``,
    ``subgraph:file=H.edges`` (or ``subgraph:graph=K3``), ``perfect_matching``
    or ``hamilton``."""
    name, params = parse_spec(text)
    if name == "min_degree":
        k = take_int(params, "k")
        try:
            mode = DegreeMode.parse(params.pop("mode", "full"))
        except ValueError as e:
            raise SpecError(str(e)) from None
        reject_extra(name, params)
        if k < 0:
            raise SpecError("k must be non-negative")
        return min_degree_property(k, mode)
    if name == "k_connected":
        k = take_int(params, "k")
        reject_extra(name, params)
        if not 1 <= k <= 10:
            raise SpecError("k_connected needs 1 <= k <= 10")
        return k_connected_property(k)
    if name == "subgraph":
        source = params.pop("file", None) or params.pop("graph", None)
        reject_extra(name, params)
        if source is None:
            raise SpecError("subgraph needs file=PATH or graph=NAME")
        try:
            h = SmallGraph.parse(source)
        except (ValueError, OSError) as e:
            raise SpecError(str(e)) from None
        return subgraph_property(h)
    if name == "perfect_matching":
        reject_extra(name, params)
        return perfect_matching_property()
    if name == "hamilton":
        reject_extra(name, params)
        return hamilton_property()
    raise SpecError(f"unknown predicate {name!r}")
