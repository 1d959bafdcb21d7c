"""Standard measurements shared by the CLI, the scripts and the acceptance tests.

Each ``*Measure`` class is a picklable ``(n, seed) -> value`` callable so it
can be farmed out to worker processes.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from .analysis import ALPHA_KOUT, alpha_ham, alpha_k, h_closed
from .engine import OfferSequence, StopCondition, run, trial_seed
from .montecarlo import HittingStats, collect, map_trials
from .multigraph import DegreeMode
from .offline import m_of_graph, tau_offline_ham, tau_offline_mindeg, tau_offline_pm
from .properties import SmallGraph, min_degree_property
from .strategies import BipartiteTwoChance, DegeneracyEmbed, KOutStrategy, s_min


class _MinDegreeLadder:
    """One S_min run per seed, recording the hitting rounds of min FULL degree 1..k."""

    def __init__(self, n: int, ks: Sequence[int]):
        self.n, self.ks = n, tuple(ks)

    def __call__(self, seed: int) -> list[int | None]:
        preds = [min_degree_property(k, DegreeMode.FULL) for k in self.ks]
        rec = run(self.n, s_min(), StopCondition(predicate=preds[-1]), seed=seed, track=preds)
        return [rec.hits[p.name] for p in preds]


def online_mindeg(n: int, trials: int, seed: int = 0, ks: Sequence[int] = (1, 2, 3), threads: int = 1) -> dict[int, HittingStats]:
    """Hitting rounds of min FULL degree ``k`` under S_min, for every ``k`` in ``ks`` at once."""
    ks = sorted(ks)
    seeds = [trial_seed(seed, i) for i in range(trials)]
    rows = map_trials(_MinDegreeLadder(n, ks), seeds, threads)
    return {k: HittingStats(n, seed, seeds, [r[i] for r in rows], f"min_degree:k={k},mode=full") for i, k in enumerate(ks)}


@dataclass(frozen=True)
class OfflineMeasure:
    """Offline hitting index on a fresh seeded offer sequence."""

    solver: str  # mindeg | pm | ham | subgraph
    k: int = 1
    graph: str = "K3"

    def __call__(self, n: int, seed: int) -> int | None:
        seq = OfferSequence(n, seed=seed)
        if self.solver == "mindeg":
            return tau_offline_mindeg(self.k, seq)
        if self.solver == "pm":
            return tau_offline_pm(seq)
        if self.solver == "ham":
            return tau_offline_ham(seq)
        if self.solver == "subgraph":
            w = m_of_graph(SmallGraph.parse(self.graph), seq)
            return None if w is None else w.rounds
        raise ValueError(f"unknown solver {self.solver!r}")


@dataclass(frozen=True)
class EmbedMeasure:
    """Completion round of the online degeneracy embedding of ``graph``."""

    graph: str

    def __call__(self, n: int, seed: int) -> int | None:
        rec = run(n, DegeneracyEmbed(SmallGraph.parse(self.graph)), seed=seed)
        return None if rec.censored else rec.rounds


@dataclass(frozen=True)
class StrategyRounds:
    """Total rounds (and strategy statistics) of a self-terminating strategy."""

    kind: str  # bipartite | kout
    k: int = 3
    r: int = 2

    def __call__(self, n: int, seed: int) -> tuple[int | None, dict[str, Any]]:
        strat = BipartiteTwoChance() if self.kind == "bipartite" else KOutStrategy(self.k, self.r)
        rec = run(n, strat, seed=seed)
        return (None if rec.censored else rec.rounds), {"rounds": rec.rounds, **rec.extras}


class _AtN:
    def __init__(self, measure, n):
        self.measure, self.n = measure, n

    def __call__(self, seed):
        return self.measure(self.n, seed)


def measure_at(n: int, measure, trials: int, seed: int = 0, threads: int = 1, label: str = "") -> HittingStats:
    return collect(n, _AtN(measure, n), trials, seed, threads, label)


# -- the summary table ------------------------------------------------------------


@dataclass
class TableRow:
    name: str
    regime: str  # online | offline
    analytic: float
    tolerance: float
    measured: float | None = None

    @property
    def passed(self) -> bool | None:
        if self.measured is None:
            return None
        return abs(self.measured - self.analytic) <= self.tolerance


def table1_rows() -> list[TableRow]:
    """Constants of the results table, with the tolerance each measured value must meet
    at desk scale (n = 2e4, 20 trials)."""
    rows = [TableRow(f"min_degree_{k} (S_min)", "online", h_closed(k), tol) for k, tol in ((1, 0.02), (2, 0.03), (3, 0.04))]
    rows += [TableRow(f"min_degree_{k}", "offline", alpha_k(k), 0.02) for k in (1, 2, 3)]
    rows.append(TableRow("perfect_matching", "offline", math.log(2), 0.02))
    rows.append(TableRow("hamilton_cycle", "offline", alpha_ham(), 0.02))
    rows.append(TableRow("bipartite_two_chance rounds", "online", ALPHA_KOUT, 0.03))
    return rows


def measure_table1(n: int, trials: int, seed: int = 0, threads: int = 1) -> list[TableRow]:
    rows = table1_rows()
    online = online_mindeg(n, trials, seed, (1, 2, 3), threads)
    for k, row in zip((1, 2, 3), rows[:3]):
        row.measured = online[k].mean_over_n
    offline = [OfflineMeasure("mindeg", 1), OfflineMeasure("mindeg", 2), OfflineMeasure("mindeg", 3), OfflineMeasure("pm"), OfflineMeasure("ham")]
    for i, (meas, row) in enumerate(zip(offline, rows[3:8])):
        row.measured = measure_at(n, meas, trials, seed + 1 + i, threads).mean_over_n
    rows[8].measured = measure_at(n, StrategyRounds("bipartite"), trials, seed + 7, threads).mean_over_n
    return rows
