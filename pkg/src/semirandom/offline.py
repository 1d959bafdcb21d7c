"""Offline solvers: Builder sees the whole offer sequence in advance.

For fixed graphs the answer only depends on offer counts of distinct
host vertices; for minimum degree ``k``, perfect matchings and Hamilton
cycles it reduces to the occupancy histogram of the offer prefix.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

from .engine import OfferSequence, run_offline
from .multigraph import DegreeMode, MultiGraph
from .properties import MAX_ORIENTATION_EDGES, BudgetExceeded, OddOrderError, SmallGraph


class NotReachedError(ValueError):
    """The target was not reached within the available offers."""


SequenceLike = OfferSequence | Sequence[int]


def _offers(sequence: SequenceLike, limit: int | None = None) -> Iterator[int]:
    """0-based offers; a seeded sequence is extended lazily up to ``limit``."""
    if isinstance(sequence, OfferSequence) and sequence.seed is not None:
        cap = limit if limit is not None else max(10, math.ceil(10 * sequence.n * math.log(max(sequence.n, 2))))
        return itertools.islice(iter(sequence), cap)
    verts = sequence.vertices if isinstance(sequence, OfferSequence) else sequence
    return iter(verts if limit is None else verts[:limit])


def _order(sequence: SequenceLike, n: int | None) -> int:
    if isinstance(sequence, OfferSequence):
        return sequence.n
    if n is None:
        raise ValueError("n is required for a bare vertex list")
    return n


def _materialize(sequence: SequenceLike, m: int) -> list[int]:
    if isinstance(sequence, OfferSequence):
        return sequence.extend_to(m)[:m] if sequence.seed is not None else sequence.vertices[:m]
    return list(sequence[:m])


# -- offer tallies -----------------------------------------------------------------


def off_k(count: int, k: int) -> int:
    """``min(2 off(v), k + off(v))``: the most a vertex offered ``count`` times
    can contribute to ``sum_v min(d(v), k)``."""
    return min(2 * count, k + count)


def deficiency(counts: Iterable[int], k: int) -> int:
    """``Y_k = sum_{i<k} (k-i) X_i`` computed from per-vertex counts."""
    return sum(k - c for c in counts if c < k)


@dataclass
class OfferTally:
    """Counts, occupancy histogram and ``Y_k`` of a growing offer prefix."""

    n: int
    k: int = 1
    rounds: int = 0
    counts: list[int] = field(default_factory=list)
    hist: list[int] = field(default_factory=list)
    y: int = 0

    def __post_init__(self) -> None:
        self.counts = [0] * self.n
        self.hist = [self.n]
        self.y = self.k * self.n

    def add(self, v: int) -> None:
        c = self.counts[v]
        self.counts[v] = c + 1
        self.hist[c] -= 1
        if c + 1 == len(self.hist):
            self.hist.append(0)
        self.hist[c + 1] += 1
        if c < self.k:
            self.y -= 1
        self.rounds += 1

    def x(self, i: int) -> int:
        return self.hist[i] if i < len(self.hist) else 0


# -- fixed graphs ----------------------------------------------------------------


def m_of_demand(demand: Sequence[int], sequence: SequenceLike, n: int | None = None, limit: int | None = None) -> int | None:
    """First prefix length ``j`` at which ``len(demand)`` distinct vertices have
    offer counts dominating ``demand``; None if never within the sequence.

    Pointwise dominance of the sorted lists is the same as: for each
    threshold ``c``, at least as many vertices offered ``>= c`` times as
    demands ``>= c``.
    """
    n = _order(sequence, n)
    if len(demand) > n:
        raise ValueError(f"{len(demand)} hosts needed but n = {n}")
    if any(d < 0 for d in demand):
        raise ValueError("demands must be non-negative")
    top = max(demand, default=0)
    need = [0] * (top + 1)
    for d in demand:
        for c in range(1, d + 1):
            need[c] += 1
    have = [0] * (top + 2)
    missing = sum(1 for c in range(1, top + 1) if need[c] > 0)
    if missing == 0:
        return 0
    counts = [0] * n
    for j, v in enumerate(_offers(sequence, limit), start=1):
        c = counts[v] + 1
        counts[v] = c
        if c <= top:
            have[c] += 1
            if have[c] == need[c]:
                missing -= 1
                if missing == 0:
                    return j
    return None


def _outdegree_orientations(h: SmallGraph) -> dict[tuple[int, ...], list[tuple[int, int]]]:
    """One orientation (as ``(tail, head)`` arcs) per out-degree multiset that is
    minimal under pointwise dominance of the descending sorted lists."""
    edges = list(h.edges)
    if len(edges) > MAX_ORIENTATION_EDGES:
        raise BudgetExceeded(f"orientation search is limited to {MAX_ORIENTATION_EDGES} edges")
    found: dict[tuple[int, ...], list[tuple[int, int]]] = {}
    seen: set[tuple[int, tuple[int, ...]]] = set()
    out = [0] * h.order
    arcs: list[tuple[int, int]] = []

    def go(i: int) -> None:
        key = (i, tuple(out))
        if key in seen:
            return
        seen.add(key)
        if i == len(edges):
            ms = tuple(sorted(out, reverse=True))
            found.setdefault(ms, list(arcs))
            return
        u, v = edges[i]
        for a, b in ((u, v), (v, u)):
            out[a] += 1
            arcs.append((a, b))
            go(i + 1)
            arcs.pop()
            out[a] -= 1

    go(0)

    def dominated(p: tuple[int, ...], q: tuple[int, ...]) -> bool:
        return p != q and all(x >= y for x, y in zip(p, q))

    return {p: arcs_ for p, arcs_ in found.items() if not any(dominated(p, q) for q in found)}


@dataclass
class GraphWitness:
    """Result of :func:`m_of_graph`: the hitting index, an orientation of H
    attaining it, and the host vertex of every vertex of H."""

    rounds: int
    arcs: list[tuple[int, int]]
    hosts: list[int]


def m_of_graph(h: SmallGraph, sequence: SequenceLike, n: int | None = None, limit: int | None = None) -> GraphWitness | None:
    """``m(H)``: minimum over orientations of ``m_of_demand(out-degrees)``."""
    n = _order(sequence, n)
    if h.order > n:
        raise ValueError(f"H has {h.order} vertices but n = {n}")
    best: tuple[int, list[tuple[int, int]]] | None = None
    for ms, arcs in sorted(_outdegree_orientations(h).items()):
        j = m_of_demand(ms, sequence, n, limit=limit if best is None else best[0])
        if j is not None and (best is None or j < best[0]):
            best = (j, arcs)
    if best is None:
        return None
    j, arcs = best
    counts = [0] * n
    for v in _materialize(sequence, j):
        counts[v] += 1
    outdeg = [0] * h.order
    for a, _ in arcs:
        outdeg[a] += 1
    host_order = sorted(range(n), key=lambda v: (-counts[v], v))
    h_order = sorted(range(h.order), key=lambda a: (-outdeg[a], a))
    hosts = [0] * h.order
    for a, x in zip(h_order, host_order):
        hosts[a] = x
    return GraphWitness(j, arcs, hosts)


def offline_embed_plan(h: SmallGraph, sequence: SequenceLike, witness: GraphWitness, n: int | None = None, default: int = 0) -> list[int]:
    """Per-round endpoints of length ``witness.rounds`` that build a copy of ``H``.

    The ``j``-th offer of ``host(a)`` is joined to the host of ``a``'s
    ``j``-th out-neighbour; every other round goes to ``default``.
    """
    n = _order(sequence, n)
    if len(witness.hosts) != h.order or len(set(witness.hosts)) != h.order:
        raise ValueError("witness hosts must be distinct, one per vertex of H")
    outs: dict[int, list[int]] = {x: [] for x in witness.hosts}
    for a, b in witness.arcs:
        outs[witness.hosts[a]].append(witness.hosts[b])
    if sorted(tuple(sorted(e)) for e in witness.arcs) != sorted(h.edges):
        raise ValueError("witness arcs are not an orientation of H")
    seq = _materialize(sequence, witness.rounds)
    used: dict[int, int] = {}
    plan = []
    for v in seq:
        targets = outs.get(v)
        i = used.get(v, 0)
        if targets is not None and i < len(targets):
            plan.append(targets[i])
            used[v] = i + 1
        else:
            plan.append(default)
    for x, targets in outs.items():
        if used.get(x, 0) < len(targets):
            raise ValueError("inconsistent witness: a host is not offered often enough")
    return plan


# -- minimum degree ----------------------------------------------------------------


def tau_offline_mindeg(k: int, sequence: SequenceLike, n: int | None = None, limit: int | None = None) -> int:
    """Smallest ``r`` with ``Y_k^r <= r``."""
    n = _order(sequence, n)
    if k <= 0:
        return 0
    y = k * n
    counts = [0] * n
    r = 0
    for v in _offers(sequence, limit):
        r += 1
        c = counts[v]
        counts[v] = c + 1
        if c < k:
            y -= 1
        if y <= r:
            return r
    raise NotReachedError(f"Y_{k} <= r not reached within {r} offers")


@dataclass
class MindegResult:
    """Outcome of :func:`build_mindeg_graph`.  ``ok`` is False when a Hall
    matching could not be found; ``failure`` then says where."""

    ok: bool
    k: int
    rounds: int
    plan: list[int] | None = None
    graph: MultiGraph | None = None
    matchings: list[dict[int, int]] = field(default_factory=list)
    failure: str | None = None

    @property
    def min_simple_degree(self) -> int | None:
        return None if self.graph is None else self.graph.min_degree(DegreeMode.SIMPLE)


def _pair(a: int, b: int, n: int) -> int:
    return a * n + b if a < b else b * n + a


class _SlotMatcher:
    """Saturate ``B`` by offer slots; a slot ``s`` (vertex ``u[s]``) may take
    ``v`` iff ``u[s] != v`` and the pair ``{u[s], v}`` is not reserved."""

    def __init__(self, u: list[int], free: list[int], reserved: dict[int, int], n: int, rng: random.Random):
        self.u = u
        self.n = n
        self.reserved = reserved
        self.rng = rng
        self.free = list(free)
        self.where = {s: i for i, s in enumerate(self.free)}
        self.slot_of: dict[int, int] = {}
        self.owner: dict[int, int] = {}

    def allowed(self, s: int, v: int) -> bool:
        x = self.u[s]
        return x != v and self.reserved.get(_pair(x, v, self.n), 0) == 0

    def _take(self, s: int) -> None:
        i = self.where.pop(s)
        last = self.free.pop()
        if last != s:
            self.free[i] = last
            self.where[last] = i

    def _release(self, s: int) -> None:
        self.where[s] = len(self.free)
        self.free.append(s)

    def _assign(self, s: int, v: int) -> None:
        self.slot_of[v] = s
        self.owner[s] = v
        key = _pair(self.u[s], v, self.n)
        self.reserved[key] = self.reserved.get(key, 0) + 1

    def _unassign(self, v: int) -> int:
        s = self.slot_of.pop(v)
        del self.owner[s]
        key = _pair(self.u[s], v, self.n)
        self.reserved[key] -= 1
        return s

    def greedy(self, v: int, tries: int = 32) -> bool:
        for _ in range(min(tries, len(self.free))):
            s = self.free[int(self.rng.random() * len(self.free))]
            if self.allowed(s, v):
                self._take(s)
                self._assign(s, v)
                return True
        for s in self.free:
            if self.allowed(s, v):
                self._take(s)
                self._assign(s, v)
                return True
        return False

    def augment(self, v: int) -> bool:
        """Alternating-path search from ``v`` over all slots."""
        parent: dict[int, tuple[int, int] | None] = {v: None}
        queue = deque([v])
        slots = list(self.owner) + self.free
        while queue:
            x = queue.popleft()
            for s in slots:
                if not self.allowed(s, x):
                    continue
                y = self.owner.get(s)
                if y is None:
                    # flip the path ending with x -> s
                    self._take(s)
                    while True:
                        prev = parent[x]
                        if prev is not None:
                            self._unassign(x)
                        self._assign(s, x)
                        if prev is None:
                            return True
                        x, s = prev
                if y not in parent:
                    parent[y] = (x, s)
                    queue.append(y)
        return False


def build_mindeg_graph(
    k: int,
    sequence: SequenceLike,
    r: int | None = None,
    n: int | None = None,
    seed: int = 0,
) -> MindegResult:
    """Offline plan giving simple minimum degree ``>= k`` after ``r`` rounds.

    ``L_j`` are the vertices offered exactly ``j < k`` times.  Matching
    ``M_i`` saturates ``B_i = L_0 + ... + L_{k-i}`` with offer slots not
    used by ``M_1..M_{i-1}``; a slot of ``u`` may not take ``v`` if ``u = v``
    or a copy of ``u`` was already matched to ``v``.  Additionally a pair
    already reserved in the other direction is excluded, so that every
    matched edge is a distinct simple edge.  Matched slots claim their
    edge; every other slot claims a fresh edge avoiding reserved pairs.
    """
    n = _order(sequence, n)
    if r is None:
        r = tau_offline_mindeg(k, sequence, n)
    u = _materialize(sequence, r)
    if len(u) < r:
        raise ValueError(f"sequence has only {len(u)} offers, r = {r}")
    counts = [0] * n
    for v in u:
        counts[v] += 1
    if deficiency(counts, k) > r:
        raise ValueError(f"Y_{k}^{r} > r: minimum degree {k} is not achievable after {r} rounds")
    rng = random.Random(seed)
    layers = [[v for v in range(n) if counts[v] == j] for j in range(k)]
    reserved: dict[int, int] = {}
    free = list(range(r))
    matchings: list[dict[int, int]] = []
    for i in range(1, k + 1):
        b = [v for j in range(k - i + 1) for v in layers[j]]
        rng.shuffle(b)
        matcher = _SlotMatcher(u, free, reserved, n, rng)
        stuck = [v for v in b if not matcher.greedy(v)]
        for v in stuck:
            if not matcher.augment(v):
                return MindegResult(False, k, r, matchings=matchings, failure=f"no matching saturating B_{i} (|B_{i}| = {len(b)})")
        if any(c > 1 for c in reserved.values()):
            return MindegResult(False, k, r, matchings=matchings, failure=f"matching M_{i} repeats a pair")
        matchings.append({s: v for v, s in matcher.slot_of.items()})
        free = matcher.free

    plan = [-1] * r
    for m in matchings:
        for s, v in m.items():
            plan[s] = v
    claimed = {key for key, c in reserved.items() if c}
    for s in range(r):
        if plan[s] != -1:
            continue
        x = u[s]
        plan[s] = _fresh_partner(x, n, claimed, rng)
        if plan[s] != x:
            claimed.add(_pair(x, plan[s], n))
    g = run_offline(u, plan, n)
    ok = g.min_degree(DegreeMode.SIMPLE) >= k
    return MindegResult(ok, k, r, plan, g, matchings, None if ok else "fresh edges ran out")


def _fresh_partner(x: int, n: int, claimed: set[int], rng: random.Random) -> int:
    if n == 1:
        return x
    for _ in range(32):
        w = rng.randrange(n - 1)
        w = w + 1 if w >= x else w
        if _pair(x, w, n) not in claimed:
            return w
    for w in range(n):
        if w != x and _pair(x, w, n) not in claimed:
            return w
    return (x + 1) % n


# -- perfect matchings and Hamilton cycles -----------------------------------------------


def tau_offline_pm(sequence: SequenceLike, n: int | None = None, limit: int | None = None) -> int:
    """Smallest ``m`` with ``X_0^m <= n/2``."""
    n = _order(sequence, n)
    if n % 2:
        raise OddOrderError(f"perfect matchings need even n, got {n}")
    x0 = n
    if 2 * x0 <= n:
        return 0
    counts = [0] * n
    m = 0
    for v in _offers(sequence, limit):
        m += 1
        if counts[v] == 0:
            x0 -= 1
            if 2 * x0 <= n:
                return m
        counts[v] += 1
    raise NotReachedError(f"X_0 <= n/2 not reached within {m} offers")


def tau_offline_ham(sequence: SequenceLike, n: int | None = None, limit: int | None = None) -> int:
    """Smallest ``m`` with ``n - 2 X_0^m - X_1^m >= 0``."""
    n = _order(sequence, n)
    x0, x1 = n, 0
    if n - 2 * x0 - x1 >= 0:
        return 0
    counts = [0] * n
    m = 0
    for v in _offers(sequence, limit):
        m += 1
        c = counts[v]
        counts[v] = c + 1
        if c == 0:
            x0 -= 1
            x1 += 1
        elif c == 1:
            x1 -= 1
        if n - 2 * x0 - x1 >= 0:
            return m
    raise NotReachedError(f"n - 2 X_0 - X_1 >= 0 not reached within {m} offers")


def _first_offer_rounds(seq: Sequence[int]) -> dict[int, list[int]]:
    rounds: dict[int, list[int]] = {}
    for i, v in enumerate(seq):
        rounds.setdefault(v, []).append(i)
    return rounds


def offline_pm_plan(sequence: SequenceLike, m: int, n: int | None = None) -> tuple[list[int], list[tuple[int, int]]]:
    """Plan of length ``m`` whose graph contains a perfect matching (returned too).

    Each never-offered vertex is paired with a distinct offered vertex
    (using that vertex's first offer); leftover offered vertices pair up.
    """
    n = _order(sequence, n)
    seq = _materialize(sequence, m)
    rounds = _first_offer_rounds(seq)
    offered = sorted(rounds)
    unoffered = [v for v in range(n) if v not in rounds]
    if len(unoffered) > len(offered) or n % 2:
        raise ValueError("no perfect matching can be built from this prefix")
    plan = [0] * m
    pairs = []
    for z, o in zip(unoffered, offered):
        plan[rounds[o][0]] = z
        pairs.append((o, z))
    rest = offered[len(unoffered):]
    for a, b in zip(rest[0::2], rest[1::2]):
        plan[rounds[a][0]] = b
        pairs.append((a, b))
    return plan, pairs


def offline_ham_plan(sequence: SequenceLike, m: int, n: int | None = None) -> tuple[list[int], list[int]]:
    """Plan of length ``m`` whose graph contains a Hamilton cycle (returned too).

    With ``Z`` the never-offered vertices, ``T`` as many vertices offered
    twice or more, and ``P`` the rest, the cycle is
    ``P_1 .. P_q Z_1 T_1 Z_2 T_2 .. Z_s T_s``: each ``P_i`` claims the edge
    to its successor, each ``T_i`` claims its two cycle edges.
    """
    n = _order(sequence, n)
    seq = _materialize(sequence, m)
    rounds = _first_offer_rounds(seq)
    z = [v for v in range(n) if v not in rounds]
    multi = [v for v in sorted(rounds) if len(rounds[v]) >= 2]
    if n < 3 or len(multi) < len(z):
        raise ValueError("no Hamilton cycle can be built from this prefix")
    t = multi[: len(z)]
    tset = set(t)
    p = [v for v in sorted(rounds) if v not in tset]
    cycle = list(p)
    for zi, ti in zip(z, t):
        cycle += [zi, ti]
    plan = [0] * m
    for i, v in enumerate(cycle):
        nxt = cycle[(i + 1) % n]
        if v in tset:
            prev = cycle[i - 1]
            plan[rounds[v][0]] = prev
            plan[rounds[v][1]] = nxt
        elif v in rounds:
            plan[rounds[v][0]] = nxt
    return plan, cycle
