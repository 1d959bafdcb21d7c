"""Driving the semi-random process: offer streams, the round loop, run records.

Randomness
----------
Every run is driven by one 64-bit seed.  ``numpy.random.SeedSequence(seed)``
is split into two PCG64 streams: one for the offered vertices and one handed
to the strategy.  Since the offer stream does not depend on the strategy,
runs of different strategies with the same seed see the same offers.

Per-trial seeds for replicated experiments come from :func:`trial_seed`,
which hashes ``(base_seed, trial_index)`` through ``SeedSequence``.
"""

from __future__ import annotations

import json
import math
import struct
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from .multigraph import DegreeMode, EdgeKind, MultiGraph

if TYPE_CHECKING:
    from .properties import PropertyPredicate
    from .strategies import Strategy

_CHUNK = 1 << 14
_MASK64 = (1 << 64) - 1


class StrategyError(ValueError):
    """A strategy returned something that is not a vertex of the graph."""


def derive_seed(base_seed: int, *key: int) -> int:
    """64-bit seed hashed from ``base_seed`` and an integer key path."""
    ss = np.random.SeedSequence(base_seed & _MASK64, spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])


def trial_seed(base_seed: int, trial: int) -> int:
    """64-bit seed for trial ``trial`` of an experiment seeded with ``base_seed``."""
    return derive_seed(base_seed, trial)


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    offers, strategy = np.random.SeedSequence(seed & _MASK64).spawn(2)
    return np.random.Generator(np.random.PCG64(offers)), np.random.Generator(np.random.PCG64(strategy))


class ChunkedRandom:
    """Buffered uniform doubles from a numpy Generator.

    Per-call numpy overhead dominates a Python round loop, so draws are
    taken in chunks and handed out one at a time.
    """

    __slots__ = ("_gen", "_buf", "_i")

    def __init__(self, gen: np.random.Generator | int):
        if not isinstance(gen, np.random.Generator):
            gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(gen & _MASK64)))
        self._gen = gen
        self._buf: list[float] = []
        self._i = 0

    def random(self) -> float:
        i = self._i
        if i == len(self._buf):
            self._buf = self._gen.random(_CHUNK).tolist()
            i = 0
        self._i = i + 1
        return self._buf[i]

    def below(self, m: int) -> int:
        """Uniform integer in ``[0, m)``."""
        return int(self.random() * m)

    def other_than(self, v: int, n: int) -> int:
        """Uniform vertex of ``[n] \\ {v}``; needs ``n >= 2``."""
        u = int(self.random() * (n - 1))
        return u + 1 if u >= v else u

    def choice(self, seq: Sequence[Any]) -> Any:
        return seq[int(self.random() * len(seq))]

    def shuffle(self, items: list[Any]) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = int(self.random() * (i + 1))
            items[i], items[j] = items[j], items[i]


class OfferStream:
    """Lazy i.i.d. uniform vertices of ``[n]``, drawn in fixed-size chunks."""

    __slots__ = ("n", "_gen", "_buf", "_i")

    def __init__(self, n: int, gen: np.random.Generator):
        self.n = n
        self._gen = gen
        self._buf: list[int] = []
        self._i = 0

    def __iter__(self) -> "OfferStream":
        return self

    def __next__(self) -> int:
        i = self._i
        if i == len(self._buf):
            self._buf = self._gen.integers(0, self.n, size=_CHUNK).tolist()
            i = 0
        self._i = i + 1
        return self._buf[i]

    def take(self, m: int) -> list[int]:
        return [next(self) for _ in range(m)]


@dataclass
class OfferSequence:
    """The offered vertices of a run, either seeded-lazy or materialized.

    ``vertices`` holds a materialized prefix (0-based).  A seeded sequence
    can always be extended with :meth:`extend_to`.
    """

    n: int
    seed: int | None = None
    vertices: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        for v in self.vertices:
            if not 0 <= v < self.n:
                raise ValueError(f"offered vertex {v + 1} outside [1, {self.n}]")
        self._stream: OfferStream | None = None
        if self.seed is not None:
            self._stream = OfferStream(self.n, _streams(self.seed)[0])
            # keep the lazy stream aligned with any supplied prefix
            for _ in range(len(self.vertices)):
                next(self._stream)

    @classmethod
    def from_seed(cls, n: int, seed: int, length: int = 0) -> "OfferSequence":
        seq = cls(n, seed=seed)
        seq.extend_to(length)
        return seq

    def extend_to(self, length: int) -> list[int]:
        if length > len(self.vertices):
            if self._stream is None:
                raise ValueError("materialized sequence cannot be extended")
            self.vertices.extend(self._stream.take(length - len(self.vertices)))
        return self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        yield from self.vertices
        if self._stream is not None:
            while True:
                v = next(self._stream)
                self.vertices.append(v)
                yield v

    # -- file formats ------------------------------------------------------

    def write_text(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            fh.write(f"{self.n} {len(self.vertices)}\n")
            fh.writelines(f"{v + 1}\n" for v in self.vertices)

    def write_binary(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            fh.write(struct.pack("<IQ", self.n, len(self.vertices)))
            fh.write((np.asarray(self.vertices, dtype="<u4") + 1).tobytes())

    @classmethod
    def read(cls, path: str | Path) -> "OfferSequence":
        """Read either the text or the binary format (detected from content)."""
        raw = Path(path).read_bytes()
        head = raw[:64]
        try:
            first = head.split(b"\n", 1)[0].decode("ascii").split()
            if len(first) == 2 and all(tok.isdigit() for tok in first):
                return cls._parse_text(raw.decode("ascii"))
        except UnicodeDecodeError:
            pass
        return cls._parse_binary(raw)

    @classmethod
    def _parse_text(cls, text: str) -> "OfferSequence":
        lines = text.split()
        n, m = int(lines[0]), int(lines[1])
        body = lines[2:]
        if len(body) != m:
            raise ValueError(f"header announces {m} offers, file has {len(body)}")
        return cls(n, vertices=[int(x) - 1 for x in body])

    @classmethod
    def _parse_binary(cls, raw: bytes) -> "OfferSequence":
        if len(raw) < 12:
            raise ValueError("binary offer file too short")
        n, m = struct.unpack_from("<IQ", raw, 0)
        body = np.frombuffer(raw, dtype="<u4", offset=12)
        if len(body) != m:
            raise ValueError(f"header announces {m} offers, file has {len(body)}")
        return cls(n, vertices=(body.astype(np.int64) - 1).tolist())


def offer_counts(sequence: Iterable[int], n: int) -> list[int]:
    counts = [0] * n
    for v in sequence:
        counts[v] += 1
    return counts


def occupancy(counts: Sequence[int]) -> list[int]:
    """``X[k]`` = number of vertices offered exactly ``k`` times."""
    hist = [0] * (max(counts, default=0) + 1)
    for c in counts:
        hist[c] += 1
    return hist


@dataclass
class StopCondition:
    """Stop after ``budget`` rounds, when ``predicate`` first holds, or when
    the strategy reports completion (``until_done``), whichever comes first.

    ``cap`` bounds runs that have no budget; ``None`` picks the default
    (10·k·n for degree goals, 10·n·ln n otherwise).
    """

    budget: int | None = None
    predicate: PropertyPredicate | None = None
    until_done: bool = True
    cap: int | None = None

    def hard_cap(self, n: int) -> int:
        if self.cap is not None:
            return self.cap
        goal = getattr(self.predicate, "degree_goal", None)
        if goal:
            return 10 * goal * n
        return max(10, math.ceil(10 * n * math.log(n)))


@dataclass
class RunRecord:
    n: int
    seed: int
    rounds: int
    failures: int
    loops: int
    duplicates: int
    hits: dict[str, int | None]
    censored: bool = False
    extras: dict[str, Any] = field(default_factory=dict)
    edges: list[tuple[int, int]] | None = None

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "seed": self.seed, "rounds": self.rounds, "failures": self.failures, "hits": self.hits},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        d = json.loads(text)
        return cls(d["n"], d["seed"], d["rounds"], d["failures"], 0, 0, d["hits"])


class ProcessState:
    """What a strategy may look at: the graph, the round number, offer counts
    and a private random source.  Strategies must not mutate the graph."""

    __slots__ = ("n", "graph", "round", "offers", "rng")

    def __init__(self, graph: MultiGraph, rng: ChunkedRandom):
        self.n = graph.n
        self.graph = graph
        self.round = 0
        self.offers = [0] * graph.n
        self.rng = rng


class _Tracker:
    """Exact hitting round of one predicate along a run."""

    __slots__ = ("pred", "hit", "witness_at", "last_false", "stride")

    def __init__(self, pred: PropertyPredicate, n: int):
        self.pred = pred
        self.hit: int | None = None
        self.witness_at: int | None = None
        self.last_false = -1
        self.stride = pred.stride(n) if pred.expensive else 1

    def observe(self, g: MultiGraph, t: int) -> bool:
        pred = self.pred
        if not pred.expensive:
            if pred.check(g):
                self.hit = t
                return True
            return False
        if self.witness_at is None:
            if pred.witness is not None and not pred.witness.check(g):
                return False
            self.witness_at = t
        if (t - self.witness_at) % self.stride == 0:
            return self._probe(g, t)
        return False

    def finish(self, g: MultiGraph, t: int) -> None:
        if self.hit is None and self.witness_at is not None and self.last_false < t:
            self._probe(g, t)

    def _probe(self, g: MultiGraph, t: int) -> bool:
        if not self.pred.check(g):
            self.last_false = t
            return False
        lo, hi = max(self.last_false, self.witness_at - 1), t
        # invariant: predicate false at lo (or lo < witness round), true at hi
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.pred.check(g.copy_prefix(mid)):
                hi = mid
            else:
                lo = mid
        self.hit = hi
        return True


def run(
    n: int,
    strategy: Strategy,
    stop: StopCondition | None = None,
    seed: int = 0,
    track: Sequence[PropertyPredicate] = (),
    keep_edges: bool = False,
) -> RunRecord:
    """Play the semi-random process with ``strategy`` until ``stop``.

    Each round a uniform vertex ``v`` is offered, the strategy names ``u``
    and the edge ``vu`` is added.  Tracked predicates (and the stop
    predicate) get their exact hitting rounds recorded.
    """
    if n < 1:
        raise ValueError("n must be positive")
    stop = stop or StopCondition()
    preds = list(track)
    if stop.predicate is not None and all(p.name != stop.predicate.name for p in preds):
        preds.append(stop.predicate)
    modes: set[DegreeMode] = set(getattr(strategy, "modes", ()))
    for p in preds:
        modes.update(p.modes)
        if p.witness is not None:
            modes.update(p.witness.modes)

    offer_gen, strat_gen = _streams(seed)
    offers = OfferStream(n, offer_gen)
    g = MultiGraph(n, track=sorted(modes))
    state = ProcessState(g, ChunkedRandom(strat_gen))
    strategy.start(state)

    trackers = [_Tracker(p, n) for p in preds]
    stop_name = stop.predicate.name if stop.predicate is not None else None
    pending = []
    fast = []  # min-degree thresholds read straight off the bucket index
    for tr in trackers:
        if tr.observe(g, 0):
            continue
        threshold = getattr(tr.pred, "threshold", None)
        if threshold is not None and g._buckets[threshold[0]] is not None:
            fast.append((g._buckets[threshold[0]], threshold[1], tr))
        else:
            pending.append(tr)
    stop_hit = stop_name is not None and any(tr.pred.name == stop_name and tr.hit is not None for tr in trackers)

    budget = stop.budget
    cap = stop.hard_cap(n)
    limit = cap if budget is None else min(budget, cap)
    until_done = stop.until_done
    choose = strategy.choose
    add_edge = g.add_edge
    counts = state.offers
    loops = dups = 0
    t = 0
    while not stop_hit and t < limit and not (until_done and strategy.done):
        t += 1
        v = next(offers)
        counts[v] += 1
        state.round = t
        u = choose(state, v)
        if u.__class__ is not int or not 0 <= u < n:
            raise StrategyError(f"{strategy!r} returned {u!r} in round {t}; expected a vertex in [0, {n})")
        kind = add_edge(v, u)
        if kind:
            if kind is EdgeKind.LOOP:
                loops += 1
            else:
                dups += 1
        if fast:
            for item in fast:
                b = item[0]
                lo = b.lo
                if lo < item[1] and b.buckets[lo]:
                    continue
                if b.min_key() >= item[1]:
                    item[2].hit = t
                    if item[2].pred.name == stop_name:
                        stop_hit = True
            if any(item[2].hit is not None for item in fast):
                fast = [item for item in fast if item[2].hit is None]
        if pending:
            still = []
            for tr in pending:
                if tr.observe(g, t):
                    if tr.pred.name == stop_name:
                        stop_hit = True
                else:
                    still.append(tr)
            pending = still

    for tr in pending:
        tr.finish(g, t)
    hits = {tr.pred.name: tr.hit for tr in trackers}
    censored = (
        not stop_hit
        and not (until_done and strategy.done)
        and (budget is None or t < budget)
        and t >= cap
    )
    extras = dict(strategy.stats())
    return RunRecord(
        n=n,
        seed=seed,
        rounds=t,
        failures=loops + dups,
        loops=loops,
        duplicates=dups,
        hits=hits,
        censored=censored,
        extras=extras,
        edges=list(g.edges) if keep_edges else None,
    )


def run_graph(
    n: int,
    strategy: Strategy,
    rounds: int,
    seed: int = 0,
) -> tuple[MultiGraph, RunRecord]:
    """Play exactly ``rounds`` rounds (or until the strategy is done) and return the graph."""
    rec = run(n, strategy, StopCondition(budget=rounds, cap=rounds), seed=seed, keep_edges=True)
    return MultiGraph.from_edges(n, rec.edges or ()), rec


def run_offline(sequence: Sequence[int] | OfferSequence, plan: Sequence[int], n: int | None = None) -> MultiGraph:
    """Apply edge ``(sequence[i], plan[i])`` for every planned round."""
    if isinstance(sequence, OfferSequence):
        n = sequence.n if n is None else n
        if len(plan) > len(sequence) and sequence.seed is not None:
            sequence.extend_to(len(plan))
        seq = sequence.vertices
    else:
        seq = sequence
        if n is None:
            raise ValueError("n is required for a bare vertex list")
    if len(plan) > len(seq):
        raise ValueError(f"plan has {len(plan)} rounds but the sequence only {len(seq)}")
    g = MultiGraph(n)
    for v, u in zip(seq, plan):
        if not 0 <= u < n:
            raise ValueError(f"plan endpoint {u + 1} outside [1, {n}]")
        g.add_edge(v, u)
    return g


def write_plan(path: str | Path, plan: Sequence[int], n: int) -> None:
    """Plan file: same layout as the text offer format, one endpoint per line."""
    with open(path, "w") as fh:
        fh.write(f"{n} {len(plan)}\n")
        fh.writelines(f"{u + 1}\n" for u in plan)
