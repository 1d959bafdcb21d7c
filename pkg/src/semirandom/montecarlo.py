"""Replicated experiments: hitting-time statistics, scaling fits, dominance.

Trial ``i`` of an experiment with base seed ``s`` always uses
``trial_seed(s, i)``; results are collected in trial order, so the
statistics do not depend on the number of worker processes.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .engine import StopCondition, derive_seed, run, trial_seed
from .properties import PropertyPredicate
from .strategies import Strategy

Measure = Callable[[int], "float | None"]


def map_trials(fn: Callable[[int], Any], seeds: Sequence[int], threads: int = 1) -> list[Any]:
    """``[fn(s) for s in seeds]``, optionally across processes; order is kept."""
    if threads <= 1 or len(seeds) <= 1:
        return [fn(s) for s in seeds]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, seeds, chunksize=max(1, len(seeds) // (4 * threads))))


@dataclass
class HittingStats:
    """Per-trial hitting rounds (``None`` = censored) and summaries.

    The mean and standard error use uncensored trials only; quantiles and
    the empirical CDF treat censored trials as ``+inf``.
    """

    n: int
    base_seed: int
    seeds: list[int]
    hits: list[float | None]
    label: str = ""
    extras: list[dict[str, Any]] = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.hits)

    @property
    def censored(self) -> int:
        return sum(h is None for h in self.hits)

    def finite(self) -> np.ndarray:
        return np.array([h for h in self.hits if h is not None], dtype=float)

    def values(self) -> np.ndarray:
        return np.array([math.inf if h is None else h for h in self.hits], dtype=float)

    @property
    def mean(self) -> float:
        f = self.finite()
        return float(f.mean()) if len(f) else math.nan

    @property
    def mean_over_n(self) -> float:
        return self.mean / self.n

    @property
    def stderr_over_n(self) -> float:
        f = self.finite()
        if len(f) < 2:
            return math.nan
        return float(f.std(ddof=1) / math.sqrt(len(f)) / self.n)

    def ci95_over_n(self) -> tuple[float, float]:
        half = 1.96 * self.stderr_over_n
        return self.mean_over_n - half, self.mean_over_n + half

    def quantiles(self, qs: Sequence[float] = (0.05, 0.5, 0.95)) -> list[float]:
        vals = np.sort(self.values())
        return [float(np.quantile(vals, q, method="lower")) if len(vals) else math.nan for q in qs]

    @property
    def median(self) -> float:
        return self.quantiles((0.5,))[0]

    def cdf(self, t: float) -> float:
        """Fraction of trials that hit by round ``t`` (censored never do)."""
        vals = self.values()
        return float(np.count_nonzero(vals <= t)) / len(vals) if len(vals) else math.nan

    def summary(self) -> dict[str, Any]:
        q5, q50, q95 = self.quantiles()
        lo, hi = self.ci95_over_n()
        return {
            "label": self.label,
            "n": self.n,
            "trials": self.trials,
            "censored": self.censored,
            "base_seed": self.base_seed,
            "mean": self.mean,
            "mean_over_n": self.mean_over_n,
            "stderr_over_n": self.stderr_over_n,
            "ci95_over_n": [lo, hi],
            "q05": q5,
            "median": q50,
            "q95": q95,
        }

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["trial", "seed", "n", "rounds", "hit_round", "censored"])
            for i, (s, h) in enumerate(zip(self.seeds, self.hits)):
                rounds = self.extras[i].get("rounds", h) if i < len(self.extras) else h
                w.writerow([i, s, self.n, "" if rounds is None else rounds, "" if h is None else h, int(h is None)])

    def write_summary(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(_jsonable(self.summary()), indent=2, sort_keys=True) + "\n")


def _jsonable(d: dict[str, Any]) -> dict[str, Any]:
    def fix(x: Any) -> Any:
        if isinstance(x, float) and not math.isfinite(x):
            return None
        if isinstance(x, list):
            return [fix(y) for y in x]
        return x

    return {k: fix(v) for k, v in d.items()}


def collect(
    n: int,
    measure: Measure,
    trials: int,
    base_seed: int = 0,
    threads: int = 1,
    label: str = "",
) -> HittingStats:
    """Run ``measure(seed)`` for ``trials`` derived seeds; ``None`` means censored."""
    if trials < 1:
        raise ValueError("need at least one trial")
    seeds = [trial_seed(base_seed, i) for i in range(trials)]
    out = map_trials(measure, seeds, threads)
    hits, extras = [], []
    for o in out:
        if isinstance(o, tuple):
            hits.append(o[0])
            extras.append(o[1])
        else:
            hits.append(o)
            extras.append({})
    return HittingStats(n, base_seed, seeds, hits, label, extras)


def _hit_trial(
    seed: int,
    n: int,
    factory: Callable[[], Strategy],
    predicate: PropertyPredicate | None,
    cap: int | None,
) -> tuple[int | None, dict[str, Any]]:
    rec = run(n, factory(), StopCondition(predicate=predicate, cap=cap), seed=seed)
    if predicate is None:
        hit = None if rec.censored else rec.rounds
    else:
        hit = rec.hits.get(predicate.name)
    return hit, {"rounds": rec.rounds, "failures": rec.failures, **rec.extras}


class _HitMeasure:
    """Picklable ``seed -> (hit, extras)`` for :func:`estimate_hitting`."""

    def __init__(self, n, factory, predicate, cap):
        self.args = (n, factory, predicate, cap)

    def __call__(self, seed: int):
        return _hit_trial(seed, *self.args)


def estimate_hitting(
    n: int,
    strategy: Callable[[], Strategy],
    predicate: PropertyPredicate | None,
    trials: int,
    base_seed: int = 0,
    threads: int = 1,
    cap: int | None = None,
) -> HittingStats:
    """Hitting round of ``predicate`` (or the strategy's completion round when
    ``predicate`` is None) over independent seeded trials."""
    label = getattr(predicate, "name", "completion")
    return collect(n, _HitMeasure(n, strategy, predicate, cap), trials, base_seed, threads, label)


@dataclass
class ScalingFit:
    """Least-squares fit ``log(median) = slope * log(n) + intercept``."""

    grid: list[int]
    medians: list[float]
    slope: float
    intercept: float
    residuals: list[float]
    censored: int

    @property
    def valid(self) -> bool:
        return self.censored == 0 and all(m > 0 and math.isfinite(m) for m in self.medians)


class _GridMeasure:
    def __init__(self, measure: Callable[[int, int], float | None], n: int):
        self.measure, self.n = measure, n

    def __call__(self, seed: int):
        return self.measure(self.n, seed)


def scaling_exponent(
    measure: Callable[[int, int], float | None],
    grid: Sequence[int],
    trials: int,
    base_seed: int = 0,
    threads: int = 1,
) -> ScalingFit:
    """Fit the growth exponent of the median of ``measure(n, seed)`` over ``grid``."""
    if len(grid) < 3:
        raise ValueError("need at least three grid points")
    medians, censored = [], 0
    for gi, n in enumerate(grid):
        stats = collect(n, _GridMeasure(measure, n), trials, derive_seed(base_seed, gi), threads)
        censored += stats.censored
        medians.append(stats.median)
    if censored or any(not (m > 0 and math.isfinite(m)) for m in medians):
        return ScalingFit(list(grid), medians, math.nan, math.nan, [], censored)
    x, y = np.log(np.asarray(grid, float)), np.log(np.asarray(medians, float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ScalingFit(list(grid), medians, float(slope), float(intercept), resid.tolist(), 0)


@dataclass
class DominanceReport:
    """Empirical (shift, eps) comparison: ``eps`` is the smallest value with
    ``CDF_A(t + shift) >= CDF_B(t) - eps`` at every observed ``t``.

    ``noise`` is the two-sample Kolmogorov-Smirnov critical value at level
    0.05: an ``eps`` below it is indistinguishable from zero.  The
    comparison is only against the baseline ``B`` named here.
    """

    label_a: str
    label_b: str
    shift: float
    eps: float
    noise: float
    censored_a: int
    censored_b: int


def dominance_eps(a: HittingStats, b: HittingStats, shift: float) -> float:
    va, vb = np.sort(a.values()), np.sort(b.values())
    if not len(va) or not len(vb):
        raise ValueError("both samples need trials")
    worst = 0.0
    for t in vb[np.isfinite(vb)]:
        cdf_b = np.searchsorted(vb, t, side="right") / len(vb)
        cdf_a = np.searchsorted(va, t + shift, side="right") / len(va)
        worst = max(worst, cdf_b - cdf_a)
    return float(min(max(worst, 0.0), 1.0))


def ks_critical(na: int, nb: int, level: float = 0.05) -> float:
    return math.sqrt(-math.log(level / 2) * (na + nb) / (2 * na * nb))


def compare(a: HittingStats, b: HittingStats, shift: float) -> DominanceReport:
    return DominanceReport(
        a.label, b.label, shift, dominance_eps(a, b, shift), ks_critical(a.trials, b.trials), a.censored, b.censored
    )


def dominance(
    n: int,
    strategy_a: Callable[[], Strategy],
    strategy_b: Callable[[], Strategy],
    predicate: PropertyPredicate,
    trials: int,
    shift: float,
    base_seed: int = 0,
    threads: int = 1,
) -> DominanceReport:
    """Run both strategies on independent seeds and compare hitting-time CDFs."""
    a = estimate_hitting(n, strategy_a, predicate, trials, derive_seed(base_seed, 0), threads)
    b = estimate_hitting(n, strategy_b, predicate, trials, derive_seed(base_seed, 1), threads)
    a.label = getattr(strategy_a(), "name", "A")
    b.label = getattr(strategy_b(), "name", "B")
    return compare(a, b, shift)
