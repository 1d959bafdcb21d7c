"""Empirical (shift, eps) comparison of min-degree strategies for minimum FULL degree k.

    python scripts/dominance.py --n 10000 --trials 500
"""

import argparse
from dataclasses import dataclass

from semirandom.montecarlo import dominance
from semirandom.multigraph import DegreeMode
from semirandom.properties import min_degree_property
from semirandom.strategies import UniformStrategy, s_dagger_min, s_min


@dataclass
class Config:
    n: int = 10_000
    trials: int = 500
    k: int = 2
    seed: int = 1100
    threads: int = 1


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    for name in ("n", "trials", "k", "seed", "threads"):
        p.add_argument(f"--{name}", type=int, default=getattr(Config, name))
    cfg = Config(**vars(p.parse_args()))
    pred = min_degree_property(cfg.k, DegreeMode.FULL)
    pairs = [
        (s_min, s_dagger_min, cfg.n / 20),
        (s_min, s_dagger_min, 0),
        (s_dagger_min, UniformStrategy, 0),
        (s_min, s_min, 0),
    ]
    for i, (a, b, shift) in enumerate(pairs):
        rep = dominance(cfg.n, a, b, pred, cfg.trials, shift, cfg.seed + i, cfg.threads)
        print(f"{rep.label_a} vs {rep.label_b}, shift {shift:g}: eps = {rep.eps:.4f} (noise {rep.noise:.4f})")


if __name__ == "__main__":
    main()
