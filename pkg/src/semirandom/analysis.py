"""Occupancy formulas, the constants of the min-degree / matching / Hamilton
thresholds, and clique counting."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

from .properties import BudgetExceeded, GraphLike, degeneracy, simple_adjacency

CLIQUE_COUNT_MAX_ORDER = 10_000


def f_exact(n: int, m: int, k: int) -> float:
    """Expected number of bins holding exactly ``k`` of ``m`` balls thrown into ``n`` bins."""
    if n < 1 or m < 0 or k < 0:
        raise ValueError("need n >= 1, m >= 0, k >= 0")
    if k > m:
        raise ValueError(f"k = {k} exceeds m = {m}")
    if n == 1:
        return 1.0 if k == m else 0.0
    try:
        return n * math.comb(m, k) * (1 / n) ** k * (1 - 1 / n) ** (m - k)
    except OverflowError:
        pass
    log = (
        math.log(n)
        + math.lgamma(m + 1)
        - math.lgamma(k + 1)
        - math.lgamma(m - k + 1)
        - k * math.log(n)
        + (m - k) * math.log1p(-1 / n)
    )
    return math.exp(log)


def f_asymptotic(n: int, m: float, k: int) -> float:
    """``e^{-m/n} m^k / (k! n^{k-1})``, the Poisson form of :func:`f_exact`."""
    return math.exp(-m / n) * m**k / (math.factorial(k) * n ** (k - 1))


def bisect_root(f: Callable[[float], float], lo: float, hi: float) -> float:
    """Root of ``f`` in ``[lo, hi]`` given a sign change, bisected to float resolution."""
    flo, fhi = f(lo), f(hi)
    assert flo == 0 or fhi == 0 or (flo > 0) != (fhi > 0), "bracket does not change sign"
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    while True:
        mid = (lo + hi) / 2
        if mid <= lo or mid >= hi:
            return lo if abs(flo) <= abs(fhi) else hi
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm


def f_k(k: int, x: float) -> float:
    """``sum_{i<k} (k-i) x^i / i! - x e^x``."""
    terms = [(k - i) * x**i / math.factorial(i) for i in range(k)]
    return math.fsum(terms) - x * math.exp(x)


def alpha_k(k: int) -> float:
    """Unique positive root of :func:`f_k`; ``f_k(0) = k > 0`` and ``f_k(k+1) < 0``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return bisect_root(lambda x: f_k(k, x), 0.0, k + 1.0)


def h_closed(k: int) -> float:
    """Closed forms of the min-degree-``k`` constants for ``k <= 3``."""
    ln2 = math.log(2)
    if k == 1:
        return ln2
    if k == 2:
        return ln2 + math.log(1 + ln2)
    if k == 3:
        return math.log(ln2**2 + 2 * (1 + ln2) * (1 + math.log(1 + ln2)))
    raise ValueError("closed forms exist only for k in {1, 2, 3}; larger k is Monte Carlo only")


def alpha_ham() -> float:
    """Positive root of ``(2 + a) e^{-a} = 1``."""
    return bisect_root(lambda a: (2 + a) * math.exp(-a) - 1, 0.5, 2.0)


ALPHA_KOUT = 1 + 2 / math.e


@dataclass(frozen=True)
class Constant:
    name: str
    value: float
    method: str  # closed-form | bisection | monte-carlo


def constants_table(alpha_ks: range | list[int] = range(1, 6)) -> list[Constant]:
    rows = [Constant(f"h_{k}", h_closed(k), "closed-form") for k in (1, 2, 3)]
    rows += [Constant(f"alpha_{k}", alpha_k(k), "bisection") for k in alpha_ks]
    rows.append(Constant("alpha_ham", alpha_ham(), "bisection"))
    rows.append(Constant("pm_offline", math.log(2), "closed-form"))
    rows.append(Constant("bipartite_two_chance", ALPHA_KOUT, "closed-form"))
    return rows


def clique_count(g: GraphLike, ell: int) -> int:
    """Number of ``K_ell`` subgraphs of the simple projection.

    Each vertex only extends cliques into its earlier neighbours in a
    degeneracy ordering (at most ``d`` of them), so every clique is
    counted once.
    """
    if ell < 1:
        raise ValueError("ell must be positive")
    adj = simple_adjacency(g)
    n = len(adj)
    if n > CLIQUE_COUNT_MAX_ORDER:
        raise BudgetExceeded(f"clique counting is limited to {CLIQUE_COUNT_MAX_ORDER} vertices")
    if ell == 1:
        return n
    _, order = degeneracy(adj)
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    back = [{u for u in adj[v] if pos[u] < pos[v]} for v in range(n)]

    def extend(cands: set[int], size: int) -> int:
        # ``size`` vertices chosen so far, all adjacent to every vertex of ``cands``
        if size == ell - 1:
            return len(cands)
        total = 0
        for u in cands:
            nxt = cands & back[u]
            if len(nxt) >= ell - size - 1:
                total += extend(nxt, size + 1)
        return total

    return sum(extend(back[v], 1) for v in range(n) if len(back[v]) >= ell - 1)


def clique_bound(n: int, m: float, ell: int) -> float:
    """``(ell-1)^(ell-2) m^(ell-1) / n^(ell-2)``."""
    return (ell - 1) ** (ell - 2) * m ** (ell - 1) / n ** (ell - 2)
