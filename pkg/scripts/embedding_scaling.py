"""Growth exponent of the rounds needed to build a fixed graph H, online and offline.

Online (degeneracy embedding) the exponent is (d-1)/d for degeneracy d;
offline it is (r-1)/r with r the min-max out-degree of H.

    python scripts/embedding_scaling.py --graphs K3 K4 C4 --trials 30
"""

import argparse
from dataclasses import dataclass, field

from semirandom.experiments import EmbedMeasure, OfflineMeasure
from semirandom.montecarlo import scaling_exponent
from semirandom.properties import SmallGraph, degeneracy, min_max_outdegree


@dataclass
class Config:
    graphs: list[str] = field(default_factory=lambda: ["K3", "K4"])
    grid: list[int] = field(default_factory=lambda: [1_000, 4_000, 16_000, 64_000])
    trials: int = 30
    seed: int = 700
    threads: int = 1


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--graphs", nargs="+", default=Config().graphs)
    p.add_argument("--grid", nargs="+", type=int, default=Config().grid)
    p.add_argument("--trials", type=int, default=Config.trials)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--threads", type=int, default=Config.threads)
    cfg = Config(**vars(p.parse_args()))
    for i, name in enumerate(cfg.graphs):
        h = SmallGraph.parse(name)
        d, r = degeneracy(h)[0], min_max_outdegree(h)
        on = scaling_exponent(EmbedMeasure(name), cfg.grid, cfg.trials, cfg.seed + 2 * i, cfg.threads)
        off = scaling_exponent(OfflineMeasure("subgraph", graph=name), cfg.grid, cfg.trials, cfg.seed + 2 * i + 1, cfg.threads)
        print(f"{name}: online slope {on.slope:.3f} (expected {(d - 1) / d:.3f}), medians {on.medians}")
        print(f"{' ' * len(name)}  offline slope {off.slope:.3f} (expected {(r - 1) / r:.3f}), medians {off.medians}")


if __name__ == "__main__":
    main()
