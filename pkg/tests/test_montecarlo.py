import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from semirandom.engine import trial_seed
from semirandom.montecarlo import (
    HittingStats,
    ScalingFit,
    collect,
    compare,
    dominance,
    dominance_eps,
    estimate_hitting,
    ks_critical,
    scaling_exponent,
)
from semirandom.multigraph import DegreeMode
from semirandom.properties import min_degree_property
from semirandom.strategies import OfferedStrategy, s_min, strategy_factory

hits_lists = st.lists(st.one_of(st.none(), st.integers(0, 1000)), min_size=1, max_size=40)


def stats_of(hits, n=10, label=""):
    return HittingStats(n, 0, list(range(len(hits))), list(hits), label)


def test_offered_single_vertex():
    pred = min_degree_property(2, DegreeMode.FULL)
    st_ = estimate_hitting(1, OfferedStrategy, pred, 3)
    assert st_.hits == [1, 1, 1]


def test_deterministic_and_thread_independent():
    pred = min_degree_property(1, DegreeMode.FULL)
    a = estimate_hitting(300, s_min, pred, 6, base_seed=4)
    b = estimate_hitting(300, s_min, pred, 6, base_seed=4)
    c = estimate_hitting(300, strategy_factory("s_min"), pred, 6, base_seed=4, threads=2)
    assert a.hits == b.hits == c.hits
    assert a.seeds == [trial_seed(4, i) for i in range(6)]
    assert a.summary() == c.summary()


def test_censored_trials():
    pred = min_degree_property(1, DegreeMode.FULL)
    st_ = estimate_hitting(50, OfferedStrategy, pred, 4, cap=10)
    assert st_.censored == 4 and math.isnan(st_.mean)
    assert st_.cdf(1e9) == 0.0
    with pytest.raises(ValueError):
        collect(5, lambda s: 1, 0)


@given(hits_lists)
def test_stats_invariants(hits):
    s = stats_of(hits)
    finite = [h for h in hits if h is not None]
    if finite:
        assert min(finite) <= s.mean <= max(finite)
    grid = sorted(set(finite)) + [2000]
    cdf = [s.cdf(t) for t in grid]
    assert cdf == sorted(cdf)
    assert all(0 <= c <= 1 for c in cdf)
    q = s.quantiles()
    assert q == sorted(q)


def test_trial_order_does_not_matter():
    hits = [5, 3, None, 9, 1, 4]
    a = stats_of(hits)
    b = stats_of(list(reversed(hits)))
    assert a.mean == b.mean and a.quantiles() == b.quantiles() and a.cdf(4) == b.cdf(4)


def test_stderr_scales_with_trials():
    rng = np.random.default_rng(0)
    sample = rng.normal(1000, 50, size=6400).round().tolist()
    big = stats_of(sample, n=1)
    small = stats_of(sample[:400], n=1)
    assert small.stderr_over_n / big.stderr_over_n == pytest.approx(4, rel=0.15)


@given(hits_lists, hits_lists, st.integers(0, 500), st.integers(0, 500))
def test_dominance_eps_range_and_monotone(a, b, l1, l2):
    sa, sb = stats_of(a), stats_of(b)
    lo, hi = sorted((l1, l2))
    e_lo, e_hi = dominance_eps(sa, sb, lo), dominance_eps(sa, sb, hi)
    assert 0 <= e_hi <= e_lo <= 1


def test_dominance_eps_definition():
    a = stats_of([10, 20, 30, 40])
    b = stats_of([5, 15, 25, 35])
    # CDF_B(5) = 1/4, CDF_A(5) = 0  ->  eps = 1/4 at shift 0
    assert dominance_eps(a, b, 0) == 0.25
    assert dominance_eps(a, b, 5) == 0.0
    assert dominance_eps(b, a, 0) == 0.0


def test_same_strategy_indistinguishable():
    pred = min_degree_property(1, DegreeMode.FULL)
    rep = dominance(500, s_min, s_min, pred, 60, shift=0, base_seed=2)
    assert rep.eps <= rep.noise
    assert rep.noise == pytest.approx(ks_critical(60, 60))


def test_compare_labels():
    rep = compare(stats_of([1, 2], label="A"), stats_of([1, 2], label="B"), 0)
    assert (rep.label_a, rep.label_b, rep.eps) == ("A", "B", 0.0)


class PowerLaw:
    def __init__(self, exponent):
        self.exponent = exponent

    def __call__(self, n, seed):
        return 3 * n**self.exponent * (1 + (seed % 7) / 1000)


def test_scaling_exponent_synthetic():
    fit = scaling_exponent(PowerLaw(0.5), [100, 400, 1600, 6400], trials=5)
    assert fit.valid and fit.slope == pytest.approx(0.5, abs=0.01)
    with pytest.raises(ValueError):
        scaling_exponent(PowerLaw(0.5), [1, 2], trials=2)


def test_scaling_exponent_censored():
    fit = scaling_exponent(lambda n, s: None if n > 200 else n, [100, 200, 400], trials=2)
    assert not fit.valid and fit.censored == 2 and math.isnan(fit.slope)


def test_csv_and_summary(tmp_path):
    pred = min_degree_property(1, DegreeMode.FULL)
    s = estimate_hitting(40, s_min, pred, 3, base_seed=1)
    s.write_csv(tmp_path / "t.csv")
    s.write_summary(tmp_path / "s.json")
    rows = list(csv.DictReader(open(tmp_path / "t.csv")))
    assert [r["trial"] for r in rows] == ["0", "1", "2"]
    assert set(rows[0]) == {"trial", "seed", "n", "rounds", "hit_round", "censored"}
    assert json.loads((tmp_path / "s.json").read_text())["trials"] == 3
