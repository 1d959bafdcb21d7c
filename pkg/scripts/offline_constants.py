"""Offline thresholds (min degree k, perfect matching, Hamilton cycle) per n, against the analytic constants.

    python scripts/offline_constants.py --n 100000 --trials 30
"""

import argparse
import math
from dataclasses import dataclass

from semirandom.analysis import alpha_ham, alpha_k
from semirandom.experiments import OfflineMeasure, measure_at


@dataclass
class Config:
    n: int = 100_000
    trials: int = 30
    kmax: int = 5
    seed: int = 300
    threads: int = 1


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n", type=int, default=Config.n)
    p.add_argument("--trials", type=int, default=Config.trials)
    p.add_argument("--kmax", type=int, default=Config.kmax)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--threads", type=int, default=Config.threads)
    cfg = Config(**vars(p.parse_args()))
    cases = [(f"min_degree_{k}", OfflineMeasure("mindeg", k), alpha_k(k)) for k in range(1, cfg.kmax + 1)]
    cases += [("perfect_matching", OfflineMeasure("pm"), math.log(2)), ("hamilton", OfflineMeasure("ham"), alpha_ham())]
    print(f"{'property':<18}{'measured':>10}{'analytic':>10}{'diff':>10}")
    for i, (name, measure, target) in enumerate(cases):
        m = measure_at(cfg.n, measure, cfg.trials, cfg.seed + i, cfg.threads).mean_over_n
        print(f"{name:<18}{m:>10.5f}{target:>10.5f}{m - target:>+10.5f}")


if __name__ == "__main__":
    main()
