"""Mean number of K_l copies after m rounds against (l-1)^(l-2) m^(l-1) / n^(l-2).

    python scripts/clique_bound.py --n 10000 --trials 200
"""

import argparse
from dataclasses import dataclass

import numpy as np

from semirandom.analysis import clique_bound, clique_count
from semirandom.engine import StopCondition, run, trial_seed
from semirandom.multigraph import MultiGraph
from semirandom.strategies import strategy_from_spec


@dataclass
class Config:
    n: int = 10_000
    trials: int = 200
    seed: int = 1000


def count(n: int, m: int, ell: int, spec: str, seed: int) -> int:
    rec = run(n, strategy_from_spec(spec), StopCondition(budget=m), seed=seed, keep_edges=True)
    return clique_count(MultiGraph.from_edges(n, rec.edges, track=()), ell)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    for name in ("n", "trials", "seed"):
        p.add_argument(f"--{name}", type=int, default=getattr(Config, name))
    cfg = Config(**vars(p.parse_args()))
    for ell in (3, 4):
        m = round(cfg.n ** ((ell - 2) / (ell - 1)))
        bound = clique_bound(cfg.n, m, ell)
        for spec in ("s_min", "greedy_clique", "s_m"):
            counts = [count(cfg.n, m, ell, spec, trial_seed(cfg.seed, t)) for t in range(cfg.trials)]
            print(f"l={ell} m={m:<5} {spec:<14} mean {np.mean(counts):8.3f}   bound {bound:8.3f}")


if __name__ == "__main__":
    main()
