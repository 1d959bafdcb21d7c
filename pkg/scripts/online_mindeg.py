"""Hitting rounds of minimum FULL degree 1..k under S_min, against the closed forms.

    python scripts/online_mindeg.py --n 100000 --trials 50 --k 3
"""

import argparse
import json
from dataclasses import asdict, dataclass

from semirandom.analysis import h_closed
from semirandom.experiments import online_mindeg


@dataclass
class Config:
    n: int = 100_000
    trials: int = 50
    k: int = 3
    seed: int = 101
    threads: int = 1


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    for name, default in asdict(Config()).items():
        p.add_argument(f"--{name}", type=int, default=default)
    cfg = Config(**vars(p.parse_args()))
    ladder = online_mindeg(cfg.n, cfg.trials, cfg.seed, range(1, cfg.k + 1), cfg.threads)
    rows = []
    for k, stats in ladder.items():
        lo, hi = stats.ci95_over_n()
        target = h_closed(k) if k <= 3 else None
        rows.append({"k": k, "mean_over_n": stats.mean_over_n, "ci95": [lo, hi], "closed_form": target, "censored": stats.censored})
        print(f"k={k}  mean/n={stats.mean_over_n:.5f}  95% CI [{lo:.5f}, {hi:.5f}]  closed form {target if target is None else f'{target:.5f}'}")
    print(json.dumps({"config": asdict(cfg), "rows": rows}, indent=2))


if __name__ == "__main__":
    main()
