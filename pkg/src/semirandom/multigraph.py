"""Multigraph on ``[n]`` with loops, multiplicities and per-mode degree buckets.

Vertices are ``0 .. n-1`` internally; text formats are 1-based.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator
from typing import Protocol, TextIO


class DegreeMode(enum.IntEnum):
    """How a vertex degree is counted.

    SIMPLE counts distinct non-self neighbours, NO_LOOPS counts edge
    multiplicities but ignores loops, FULL counts everything with each
    loop contributing two.
    """

    SIMPLE = 0
    NO_LOOPS = 1
    FULL = 2

    @classmethod
    def parse(cls, text: str) -> "DegreeMode":
        key = text.strip().lower().replace("-", "_")
        aliases = {"simple": cls.SIMPLE, "no_loops": cls.NO_LOOPS, "noloops": cls.NO_LOOPS, "full": cls.FULL}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown degree mode {text!r}") from None


ALL_MODES = (DegreeMode.SIMPLE, DegreeMode.NO_LOOPS, DegreeMode.FULL)


class EdgeKind(enum.IntEnum):
    FRESH = 0
    DUPLICATE = 1
    LOOP = 2


class UniformSource(Protocol):
    def random(self) -> float: ...


class DegreeBuckets:
    """Vertices grouped by degree, with swap-remove moves and a lazy min pointer.

    Degrees never decrease, so the minimum pointer only moves up.
    """

    __slots__ = ("buckets", "pos", "lo")

    def __init__(self, n: int):
        self.buckets: list[list[int]] = [list(range(n))]
        self.pos: list[int] = list(range(n))
        self.lo = 0

    def move(self, v: int, old: int, new: int) -> None:
        buckets = self.buckets
        b = buckets[old]
        p = self.pos[v]
        last = b.pop()
        if last != v:
            b[p] = last
            self.pos[last] = p
        while new >= len(buckets):
            buckets.append([])
        nb = buckets[new]
        self.pos[v] = len(nb)
        nb.append(v)

    def min_key(self) -> int:
        buckets = self.buckets
        lo = self.lo
        while not buckets[lo]:
            lo += 1
        self.lo = lo
        return lo

    def next_nonempty(self, key: int) -> int | None:
        buckets = self.buckets
        for d in range(key + 1, len(buckets)):
            if buckets[d]:
                return d
        return None


class MultiGraph:
    """Mutable multigraph on ``n`` vertices; edges can only be added.

    Degree counters are kept for all three :class:`DegreeMode` values.
    Bucket indices (needed for O(1) minimum-degree sampling) are kept for
    the modes listed in ``track``.
    """

    def __init__(self, n: int, track: Iterable[DegreeMode] = ALL_MODES):
        if n < 1:
            raise ValueError("a graph needs at least one vertex")
        self.n = n
        self._adj: list[dict[int, int]] = [{} for _ in range(n)]
        self._loops = [0] * n
        self._full = [0] * n
        # SIMPLE and NO_LOOPS counters are only materialized for tracked modes;
        # otherwise they are derived (len of the neighbour map, FULL - 2 * loops)
        self._deg: list[list[int] | None] = [None, None, self._full]
        self._buckets: list[DegreeBuckets | None] = [None, None, None]
        for mode in track:
            self._buckets[int(mode)] = DegreeBuckets(n)
            if self._deg[int(mode)] is None:
                self._deg[int(mode)] = [0] * n
        self.edges: list[tuple[int, int]] = []

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, edges={len(self.edges)})"

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} outside [0, {self.n})")

    def add_edge(self, u: int, v: int) -> EdgeKind:
        n = self.n
        if not (0 <= u < n and 0 <= v < n):
            raise IndexError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        self.edges.append((u, v))
        full = self._full
        fb = self._buckets[2]
        if u == v:
            self._loops[u] += 1
            d = full[u]
            full[u] = d + 2
            if fb is not None:
                fb.move(u, d, d + 2)
            return EdgeKind.LOOP

        au = self._adj[u]
        mult = au.get(v, 0)
        au[v] = mult + 1
        self._adj[v][u] = mult + 1
        du, dv = full[u], full[v]
        full[u] = du + 1
        full[v] = dv + 1
        if fb is not None:
            fb.move(u, du, du + 1)
            fb.move(v, dv, dv + 1)
        noloops = self._deg[1]
        if noloops is not None:
            nb = self._buckets[1]
            du, dv = noloops[u], noloops[v]
            noloops[u] = du + 1
            noloops[v] = dv + 1
            if nb is not None:
                nb.move(u, du, du + 1)
                nb.move(v, dv, dv + 1)
        if mult:
            return EdgeKind.DUPLICATE
        simple = self._deg[0]
        if simple is not None:
            sb = self._buckets[0]
            du, dv = simple[u], simple[v]
            simple[u] = du + 1
            simple[v] = dv + 1
            if sb is not None:
                sb.move(u, du, du + 1)
                sb.move(v, dv, dv + 1)
        return EdgeKind.FRESH

    def degree(self, v: int, mode: DegreeMode = DegreeMode.FULL) -> int:
        self._check(v)
        arr = self._deg[mode]
        if arr is not None:
            return arr[v]
        if mode == DegreeMode.NO_LOOPS:
            return self._full[v] - 2 * self._loops[v]
        return len(self._adj[v])

    def degrees(self, mode: DegreeMode = DegreeMode.FULL) -> list[int]:
        arr = self._deg[mode]
        if arr is not None:
            return list(arr)
        if mode == DegreeMode.NO_LOOPS:
            return [f - 2 * c for f, c in zip(self._full, self._loops)]
        return [len(a) for a in self._adj]

    def multiplicity(self, u: int, v: int) -> int:
        self._check(u)
        self._check(v)
        if u == v:
            return self._loops[u]
        return self._adj[u].get(v, 0)

    def loops(self, v: int) -> int:
        self._check(v)
        return self._loops[v]

    def distinct_neighbors(self, v: int) -> set[int]:
        self._check(v)
        return set(self._adj[v])

    def neighbor_multiplicities(self, v: int) -> dict[int, int]:
        """Read-only view of ``v``'s non-loop neighbours and multiplicities."""
        return self._adj[v]

    def min_degree(self, mode: DegreeMode = DegreeMode.FULL) -> int:
        b = self._buckets[mode]
        if b is not None:
            return b.min_key()
        return min(self.degrees(mode))

    def max_degree(self, mode: DegreeMode = DegreeMode.FULL) -> int:
        return max(self.degrees(mode))

    def vertices_of_degree(self, d: int, mode: DegreeMode = DegreeMode.FULL) -> list[int]:
        b = self._buckets[int(mode)]
        if b is not None:
            return list(b.buckets[d]) if d < len(b.buckets) else []
        return [v for v, x in enumerate(self.degrees(mode)) if x == d]

    def bucket(self, d: int, mode: DegreeMode = DegreeMode.FULL) -> list[int]:
        """Live (do not mutate) list of vertices of degree ``d``; needs ``mode`` tracked."""
        b = self._buckets[int(mode)]
        if b is None:
            raise ValueError(f"degree buckets for {mode.name} are not tracked")
        return b.buckets[d] if d < len(b.buckets) else []

    def sample_min_degree_vertex(
        self, mode: DegreeMode, rng: UniformSource, exclude: int | None = None
    ) -> int:
        """Uniform vertex among those of minimum degree under ``mode``.

        With ``exclude`` set, the minimum is taken over ``[n] \\ {exclude}``:
        rejection inside the lowest bucket, and if that bucket is exactly
        ``{exclude}`` the next non-empty bucket is used.
        """
        key = int(mode)
        b = self._buckets[key]
        if b is None:
            raise ValueError(f"degree buckets for {mode.name} are not tracked")
        if exclude is not None and self.n < 2:
            raise ValueError("no candidate vertex besides the excluded one")
        lo = b.min_key()
        bucket = b.buckets[lo]
        if exclude is not None and len(bucket) == 1 and bucket[0] == exclude:
            nxt = b.next_nonempty(lo)
            if nxt is None:
                raise ValueError("no candidate vertex besides the excluded one")
            bucket = b.buckets[nxt]
            exclude = None
        size = len(bucket)
        while True:
            v = bucket[int(rng.random() * size)]
            if v != exclude:
                return v

    # -- views -------------------------------------------------------------

    def simple_adjacency(self) -> list[set[int]]:
        """Adjacency of the simple projection (loops dropped, multiplicities collapsed)."""
        return [set(a) for a in self._adj]

    def simple_edges(self) -> Iterator[tuple[int, int]]:
        for u, a in enumerate(self._adj):
            for v in a:
                if u < v:
                    yield u, v

    def copy_prefix(self, m: int, track: Iterable[DegreeMode] = ()) -> "MultiGraph":
        """Graph made of the first ``m`` logged edges."""
        g = MultiGraph(self.n, track=track)
        for u, v in self.edges[:m]:
            g.add_edge(u, v)
        return g

    def check_invariants(self) -> None:
        """Recompute everything from the edge log and compare; raises AssertionError."""
        n = self.n
        simple, noloops, full = [0] * n, [0] * n, [0] * n
        mult: dict[tuple[int, int], int] = {}
        for u, v in self.edges:
            if u == v:
                full[u] += 2
                continue
            key = (min(u, v), max(u, v))
            mult[key] = mult.get(key, 0) + 1
            full[u] += 1
            full[v] += 1
            noloops[u] += 1
            noloops[v] += 1
        for (u, v), c in mult.items():
            simple[u] += 1
            simple[v] += 1
            assert self._adj[u][v] == c == self._adj[v][u]
        assert sum(full) == 2 * len(self.edges)
        assert [self.degrees(m) for m in ALL_MODES] == [simple, noloops, full]
        for mode, b in enumerate(self._buckets):
            if b is None:
                continue
            seen = 0
            for d, bucket in enumerate(b.buckets):
                for i, v in enumerate(bucket):
                    assert self.degree(v, DegreeMode(mode)) == d
                    assert b.pos[v] == i
                    seen += 1
            assert seen == n

    def write_edge_list(self, fh: TextIO) -> None:
        """One ``u v`` line per logged edge, 1-based, duplicates repeated."""
        for u, v in self.edges:
            fh.write(f"{u + 1} {v + 1}\n")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], track: Iterable[DegreeMode] = ALL_MODES) -> "MultiGraph":
        g = cls(n, track=track)
        for u, v in edges:
            g.add_edge(u, v)
        return g


def read_edge_list(fh: TextIO) -> list[tuple[int, int]]:
    """Parse 1-based ``u v`` lines into 0-based pairs; blank and ``#`` lines skipped."""
    edges = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b = line.split()[:2]
        edges.append((int(a) - 1, int(b) - 1))
    return edges
