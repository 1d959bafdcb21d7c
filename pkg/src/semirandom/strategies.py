"""Builder strategies.

A strategy sees the process state (graph, round, offer counts, a private
random source) and the offered vertex, and returns the second endpoint.
One instance plays one run; use a factory for repeated trials.
"""

from __future__ import annotations

import functools
from collections.abc import Callable
from typing import Any

from .engine import ProcessState
from .grammar import SpecError, parse_spec, reject_extra, take_int
from .multigraph import DegreeMode
from .properties import SmallGraph, degeneracy


class Strategy:
    """Base class; subclasses override :meth:`choose` and optionally the rest."""

    name = "strategy"
    modes: tuple[DegreeMode, ...] = ()

    def start(self, state: ProcessState) -> None:
        """Called once before round 1."""

    def choose(self, state: ProcessState, v: int) -> int:
        raise NotImplementedError

    @property
    def done(self) -> bool:
        return False

    def stats(self) -> dict[str, Any]:
        return {}

    def __repr__(self) -> str:
        return f"<{self.name}>"


class OfferedStrategy(Strategy):
    """Always connects the offered vertex to itself (a loop every round)."""

    name = "offered"

    def choose(self, state: ProcessState, v: int) -> int:
        return v


class UniformStrategy(Strategy):
    """Uniform random partner from ``[n] \\ {v}``.

    ``simple_retry=False`` is the multigraph version; with ``True`` the
    choice rule is identical, but duplicate edges are what a simple-graph
    coupling discards, so the record's ``failures`` are the retries.
    """

    def __init__(self, simple_retry: bool = False):
        self.simple_retry = simple_retry
        self.name = "uniform:mode=simple" if simple_retry else "uniform:mode=multigraph"

    def start(self, state: ProcessState) -> None:
        if state.n < 2:
            raise ValueError("the uniform strategy needs n >= 2")

    def choose(self, state: ProcessState, v: int) -> int:
        return state.rng.other_than(v, state.n)


class KOutStrategy(Strategy):
    """Target vertices 0, 1, ..., n-1 in turn, each for a block of rounds.

    Every offer during block ``t`` is joined to ``t``.  After the first
    ``k`` rounds the block is extended by ``r`` rounds iff ``t`` was among
    its own offers or an offer repeated; so each block has ``k`` or
    ``k + r`` rounds and the run lasts ``k n + r n'`` rounds, ``n'`` being
    the number of extended blocks.
    """

    def __init__(self, k: int, r: int = 0, record_blocks: bool = False):
        if k < 1 or r < 0:
            raise ValueError("need k >= 1 and r >= 0")
        self.k, self.r = k, r
        self.name = f"kout:k={k},r={r}"
        self.record_blocks = record_blocks
        self.blocks: list[list[int]] = []

    def start(self, state: ProcessState) -> None:
        self.n = state.n
        self.target = 0
        self.block: list[int] = []
        self.size = self.k
        self.big = 0

    def choose(self, state: ProcessState, v: int) -> int:
        t = self.target
        block = self.block
        block.append(v)
        if len(block) == self.k and self.r:
            if t in block or len(set(block)) < len(block):
                self.size = self.k + self.r
                self.big += 1
        if len(block) == self.size:
            if self.record_blocks:
                self.blocks.append(block)
            self.target = t + 1
            self.block = []
            self.size = self.k
        return t

    @property
    def done(self) -> bool:
        return self.target >= self.n

    def stats(self) -> dict[str, Any]:
        return {"big_blocks": self.big}


class BipartiteTwoChance(Strategy):
    """Two-phase strategy on ``X0 = {0..n/2-1}``, ``X1 = {n/2..n-1}``.

    Phase I: the ``j``-th offer landing in part ``i`` is joined to the
    ``j``-th vertex of the other part while ``j <= n/2``; later offers to a
    part that is already through go to the other part's first vertex
    (a filler edge).  Phase I ends once both parts received ``n/2`` offers.

    Phase II repeats this with ``Y_i``, the vertices of ``X_i`` offered at
    most once in Phase I, and ``y = max(|Y0|, |Y1|)`` in place of ``n/2``.
    When the ``j``-th Phase II offer in part ``i`` has ``j <= y`` but
    ``Y_{1-i}`` has fewer than ``j`` vertices, a filler edge goes to the
    first vertex of ``Y_{1-i}`` (or of ``X_{1-i}`` if ``Y_{1-i}`` is empty).
    """

    name = "bipartite"

    def __init__(self, record_tags: bool = False):
        self.record_tags = record_tags
        self.tags: list[bool] = []  # True for real edges

    def start(self, state: ProcessState) -> None:
        n = state.n
        if n % 2:
            raise ValueError("the bipartite two-chance strategy needs even n")
        self.n = n
        self.half = n // 2
        self.phase = 1 if n else 0
        self.x = [0, 0]
        self.y_count = [0, 0]
        self.offers_one = [0] * n
        self.Y: list[list[int]] = [[], []]
        self.y = 0
        self.f = [0, 0]
        self.fillers = 0
        self._done = n == 0

    def _tag(self, real: bool) -> None:
        if not real:
            self.fillers += 1
        if self.record_tags:
            self.tags.append(real)

    def choose(self, state: ProcessState, v: int) -> int:
        half = self.half
        i = 1 if v >= half else 0
        other = (1 - i) * half
        if self.phase == 1:
            self.f[0] += 1
            self.offers_one[v] += 1
            self.x[i] += 1
            xi = self.x[i]
            if xi <= half:
                u = other + xi - 1
                self._tag(True)
            else:
                u = other
                self._tag(False)
            if min(self.x) >= half:
                self._end_phase_one()
            return u
        self.f[1] += 1
        self.y_count[i] += 1
        yi = self.y_count[i]
        target = self.Y[1 - i]
        if yi <= len(target):
            u = target[yi - 1]
            self._tag(True)
        else:
            u = target[0] if target else other
            self._tag(False)
        if min(self.y_count) >= self.y:
            self.phase = 0
            self._done = True
        return u

    def _end_phase_one(self) -> None:
        half = self.half
        cnt = self.offers_one
        self.Y = [
            [w for w in range(0, half) if cnt[w] <= 1],
            [w for w in range(half, self.n) if cnt[w] <= 1],
        ]
        self.y = max(len(self.Y[0]), len(self.Y[1]))
        self.phase = 2
        if self.y == 0:
            self.phase = 0
            self._done = True

    @property
    def done(self) -> bool:
        return self._done

    def stats(self) -> dict[str, Any]:
        return {
            "phase1_rounds": self.f[0],
            "phase2_rounds": self.f[1],
            "y0": len(self.Y[0]),
            "y1": len(self.Y[1]),
            "fillers": self.fillers,
        }


class MinDegreeStrategy(Strategy):
    """Join the offered vertex to a uniformly random vertex of minimum degree.

    ``timing="before"`` uses the degrees as they are when ``v`` is offered;
    ``timing="after"`` first counts the new edge's endpoint at ``v`` (its
    degree goes up by one) and then picks the minimum.  With
    ``exclude_offered`` the minimum is over ``[n] \\ {v}``.

    (FULL, before, no exclusion) joins ``v`` to itself when it is itself
    picked; the loop is kept and counted as a failure round.
    """

    def __init__(self, mode: DegreeMode = DegreeMode.FULL, exclude_offered: bool = False, timing: str = "before"):
        if timing not in ("before", "after"):
            raise ValueError("timing must be 'before' or 'after'")
        self.mode = DegreeMode(mode)
        self.exclude_offered = exclude_offered
        self.timing = timing
        self.modes = (self.mode,)
        self.name = f"min_degree:mode={self.mode.name.lower()},timing={timing},exclude={str(exclude_offered).lower()}"

    def start(self, state: ProcessState) -> None:
        if self.exclude_offered and state.n < 2:
            raise ValueError("excluding the offered vertex needs n >= 2")

    def choose(self, state: ProcessState, v: int) -> int:
        g = state.graph
        mode = self.mode
        if self.timing == "before":
            return g.sample_min_degree_vertex(mode, state.rng, v if self.exclude_offered else None)
        lo = g.min_degree(mode)
        dv = g.degree(v, mode)
        if dv > lo or self.exclude_offered:
            return g.sample_min_degree_vertex(mode, state.rng, v if self.exclude_offered else None)
        bucket = g.bucket(lo, mode)
        if len(bucket) > 1:
            return g.sample_min_degree_vertex(mode, state.rng, exclude=v)
        # v was the only vertex of minimum degree; after the bump it ties with bucket lo+1
        nxt = g.bucket(lo + 1, mode)
        i = int(state.rng.random() * (len(nxt) + 1))
        return v if i == len(nxt) else nxt[i]


def s_min() -> MinDegreeStrategy:
    return MinDegreeStrategy(DegreeMode.FULL, False, "before")


def s_dagger_min() -> MinDegreeStrategy:
    return MinDegreeStrategy(DegreeMode.FULL, False, "after")


def s_star_min() -> MinDegreeStrategy:
    return MinDegreeStrategy(DegreeMode.SIMPLE, True, "before")


class DegeneracyEmbed(Strategy):
    """Online embedding of a fixed graph ``H`` along a degeneracy ordering.

    ``v_1`` is mapped to the first offered vertex.  With ``v_1..v_k``
    embedded (milestone ``m_k``), let ``v_{i_1}, .., v_{i_l}`` be the
    earlier neighbours of ``v_{k+1}``.  A vertex ``u`` outside the image on
    its ``t``-th offer since ``m_k`` is joined to ``phi(v_{i_t})``; when
    ``t = l`` it becomes ``phi(v_{k+1})``.  Offers of image vertices (and
    round 1) are answered with a uniform random other vertex.  The strategy
    is done at milestone ``m_r``.
    """

    def __init__(self, h: SmallGraph):
        self.h = h
        self.name = f"embed:graph={h}"
        d, order = degeneracy(h)
        self.d = d
        self.order = order
        pos = {v: i for i, v in enumerate(order)}
        hadj = h.adjacency()
        self.back = [sorted((pos[u] for u in hadj[v] if pos[u] < i)) for i, v in enumerate(order)]

    def start(self, state: ProcessState) -> None:
        if self.h.order > state.n:
            raise ValueError(f"H has {self.h.order} vertices but n = {state.n}")
        self.phi: list[int] = []
        self.image: set[int] = set()
        self.milestones: list[int] = []
        self.since: dict[int, int] = {}

    def _arbitrary(self, state: ProcessState, v: int) -> int:
        return state.rng.other_than(v, state.n) if state.n > 1 else v

    def _embed(self, u: int, t: int) -> None:
        self.phi.append(u)
        self.image.add(u)
        self.milestones.append(t)
        self.since = {}

    def choose(self, state: ProcessState, v: int) -> int:
        k = len(self.phi)
        if k == 0:
            self._embed(v, state.round)
            return self._arbitrary(state, v)
        if k == self.h.order or v in self.image:
            return self._arbitrary(state, v)
        back = self.back[k]
        if not back:
            self._embed(v, state.round)
            return self._arbitrary(state, v)
        t = self.since.get(v, 0) + 1
        self.since[v] = t
        target = self.phi[back[t - 1]]
        if t == len(back):
            self._embed(v, state.round)
        return target

    @property
    def done(self) -> bool:
        return len(self.phi) == self.h.order

    def embedding(self) -> dict[int, int]:
        """Map from vertices of ``H`` to host vertices for the embedded prefix."""
        return {self.order[i]: x for i, x in enumerate(self.phi)}

    def stats(self) -> dict[str, Any]:
        return {"milestones": list(self.milestones)}


class SpanningEmbed(Strategy):
    """Build a spanning graph ``H`` on ``[n]``: on the ``r``-th offer of ``i``
    with ``r <= deg_H(i)`` claim ``i j_r`` (neighbours in increasing order);
    other offers get a uniform random partner.  Done once every ``i`` was
    offered ``deg_H(i)`` times.

    ``h`` may be a graph or a callable ``n -> graph`` evaluated at start.
    """

    def __init__(self, h: SmallGraph | Callable[[int], SmallGraph]):
        self._h = h
        self.name = f"spanning:graph={getattr(h, 'name', None) or h}"

    def start(self, state: ProcessState) -> None:
        h = self._h(state.n) if callable(self._h) else self._h
        if h.order != state.n:
            raise ValueError(f"spanning graph has {h.order} vertices, process has n = {state.n}")
        self.h = h
        self.nbrs = [sorted(a) for a in h.adjacency()]
        self.pending = sum(1 for a in self.nbrs if a)

    def choose(self, state: ProcessState, v: int) -> int:
        r = state.offers[v]
        nb = self.nbrs[v]
        if r <= len(nb):
            if r == len(nb):
                self.pending -= 1
            return nb[r - 1]
        return state.rng.other_than(v, state.n) if state.n > 1 else v

    @property
    def done(self) -> bool:
        return self.pending == 0


class GreedyCliqueBuilder(Strategy):
    """Heuristic that tries to close cliques quickly.

    Joins ``v`` to the non-neighbour with the most common neighbours among
    vertices two steps away; with no such vertex, joins ``v`` to the
    current highest-degree vertex (a hub), or a random vertex if ``v`` is
    the hub or already adjacent to it.
    """

    name = "greedy_clique"

    def start(self, state: ProcessState) -> None:
        if state.n < 2:
            raise ValueError("needs n >= 2")
        self.hub = 0
        self._last: tuple[int, int] | None = None

    def choose(self, state: ProcessState, v: int) -> int:
        g = state.graph
        if self._last is not None:
            for x in self._last:
                if g.degree(x, DegreeMode.SIMPLE) > g.degree(self.hub, DegreeMode.SIMPLE):
                    self.hub = x
        nv = g.neighbor_multiplicities(v)
        score: dict[int, int] = {}
        for w in nv:
            for x in g.neighbor_multiplicities(w):
                if x != v and x not in nv:
                    score[x] = score.get(x, 0) + 1
        if score:
            u = max(score, key=lambda x: (score[x], -x))
        elif self.hub != v and self.hub not in nv:
            u = self.hub
        else:
            u = state.rng.other_than(v, state.n)
        self._last = (v, u)
        return u


# -- construction from the command-line grammar -------------------------------------


def _spanning_factory(kind: str) -> Callable[[int], SmallGraph]:
    builders = {
        "matching": SmallGraph.perfect_matching,
        "cycle": SmallGraph.cycle,
        "path": SmallGraph.path,
        "empty": SmallGraph.empty,
    }
    if kind not in builders:
        raise SpecError(f"spanning graph must be one of {', '.join(builders)} or file=PATH")
    return builders[kind]


def _flag(params: dict[str, str], key: str, default: bool) -> bool:
    if key not in params:
        return default
    value = params.pop(key).lower()
    if value in ("1", "true", "yes"):
        return True
    if value in ("0", "false", "no"):
        return False
    raise SpecError(f"parameter {key!r} must be true or false")


def strategy_from_spec(text: str) -> Strategy:
    """Strategy from ``name:key=value,...``.

    Names: ``offered``, ``uniform:mode=multigraph|simple`` (``s_m``,
    ``s_g``), ``kout:k=K,r=R``, ``bipartite``,
    ``min_degree:mode=M,timing=before|after,exclude=BOOL`` (``s_min``,
    ``s_dagger``, ``s_star``), ``embed:graph=H``,
    ``spanning:graph=matching|cycle|path|empty`` or ``spanning:file=PATH``,
    ``greedy_clique``.
    """
    name, params = parse_spec(text)
    aliases = {
        "s_min": lambda: s_min(),
        "s_dagger": lambda: s_dagger_min(),
        "s_star": lambda: s_star_min(),
        "s_m": lambda: UniformStrategy(False),
        "s_g": lambda: UniformStrategy(True),
        "offered": OfferedStrategy,
        "bipartite": BipartiteTwoChance,
        "greedy_clique": GreedyCliqueBuilder,
    }
    if name in aliases:
        reject_extra(name, params)
        return aliases[name]()
    if name == "uniform":
        mode = params.pop("mode", "multigraph")
        reject_extra(name, params)
        if mode not in ("multigraph", "simple"):
            raise SpecError("uniform mode must be multigraph or simple")
        return UniformStrategy(mode == "simple")
    if name == "kout":
        k = take_int(params, "k")
        r = take_int(params, "r", 0)
        reject_extra(name, params)
        if k < 1 or r < 0:
            raise SpecError("kout needs k >= 1 and r >= 0")
        return KOutStrategy(k, r)
    if name == "min_degree":
        try:
            mode = DegreeMode.parse(params.pop("mode", "full"))
        except ValueError as e:
            raise SpecError(str(e)) from None
        timing = params.pop("timing", "before")
        exclude = _flag(params, "exclude", False)
        reject_extra(name, params)
        if timing not in ("before", "after"):
            raise SpecError("timing must be before or after")
        return MinDegreeStrategy(mode, exclude, timing)
    if name == "embed":
        source = params.pop("graph", None) or params.pop("file", None)
        reject_extra(name, params)
        if source is None:
            raise SpecError("embed needs graph=NAME or file=PATH")
        try:
            return DegeneracyEmbed(SmallGraph.parse(source))
        except (ValueError, OSError) as e:
            raise SpecError(str(e)) from None
    if name == "spanning":
        if "file" in params:
            path = params.pop("file")
            reject_extra(name, params)
            try:
                return SpanningEmbed(SmallGraph.from_file(path))
            except (ValueError, OSError) as e:
                raise SpecError(str(e)) from None
        kind = params.pop("graph", "matching")
        reject_extra(name, params)
        return SpanningEmbed(_spanning_factory(kind))
    raise SpecError(f"unknown strategy {name!r}")


def strategy_factory(text: str) -> Callable[[], Strategy]:
    """Picklable zero-argument factory; validates ``text`` eagerly."""
    strategy_from_spec(text)
    return functools.partial(strategy_from_spec, text)
