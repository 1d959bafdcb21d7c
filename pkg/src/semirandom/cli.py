"""Command-line front end.

Subcommands: simulate | offline | constants | table1 | sweep.

Strategies and predicates use the ``name:key=value,key=value`` grammar, e.g.
``--strategy=min_degree:mode=full,timing=before`` and
``--predicate=min_degree:k=1,mode=full``.  Vertex ids in files are 1-based.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

from . import analysis
from .engine import OfferSequence, StopCondition, run, run_offline, trial_seed, write_plan
from .experiments import OfflineMeasure, measure_table1, table1_rows
from .grammar import SpecError
from .montecarlo import HittingStats, _jsonable, estimate_hitting, scaling_exponent
from .multigraph import MultiGraph
from .offline import (
    NotReachedError,
    build_mindeg_graph,
    m_of_graph,
    offline_embed_plan,
    offline_ham_plan,
    offline_pm_plan,
    tau_offline_ham,
    tau_offline_mindeg,
    tau_offline_pm,
)
from .properties import (
    SmallGraph,
    contains_subgraph,
    has_hamilton_cycle,
    has_perfect_matching,
    is_hamilton_cycle,
    predicate_from_spec,
)
from .strategies import strategy_factory

SPEC_HELP = """\
strategies: offered | uniform:mode=multigraph|simple (s_m, s_g) | kout:k=K,r=R |
  bipartite | min_degree:mode=full|no_loops|simple,timing=before|after,exclude=BOOL
  (s_min, s_dagger, s_star) | embed:graph=H | spanning:graph=matching|cycle|path|empty |
  greedy_clique
predicates: min_degree:k=K,mode=M | k_connected:k=K | subgraph:file=H.edges |
  subgraph:graph=H | perfect_matching | hamilton
graphs H: K<k>, C<k>, P<k>, E<k>, matching:<k>, or a 1-based edge-list file
"""


@dataclass
class ExperimentConfig:
    """Everything a CLI invocation depends on; ``to_argv`` reproduces it."""

    command: str
    n: int | None = None
    grid: list[int] | None = None
    strategy: str | None = None
    predicate: str | None = None
    trials: int = 1
    seed: int = 0
    threads: int = 1
    out: str | None = None
    format: str = "json"
    solver: str | None = None
    k: int | None = None
    subgraph: str | None = None
    sequence: str | None = None
    measure: bool = False
    dump_graph: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})

    def to_argv(self) -> list[str]:
        argv = [self.command]
        for f in fields(self):
            if f.name == "command":
                continue
            value = getattr(self, f.name)
            if value is None or value is False:
                continue
            flag = "--" + f.name.replace("_", "-")
            if value is True:
                argv.append(flag)
            elif isinstance(value, list):
                argv.append(f"{flag}={','.join(map(str, value))}")
            else:
                argv.append(f"{flag}={value}")
        return argv


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _count(text: str) -> int:
    try:
        value = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="base seed (default: $SEMIRANDOM_SEED or 0)")
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: all CPUs)")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="stdout rendering")
    common.add_argument("--out", default=None, help="output directory for CSV / JSON files")

    parser = argparse.ArgumentParser(
        prog="semirandom",
        description="Semi-random graph process: simulation, offline solvers and constants.",
        epilog=SPEC_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo hitting times", epilog=SPEC_HELP,
                         formatter_class=argparse.RawDescriptionHelpFormatter)
    sim.add_argument("--n", type=_count, required=True)
    sim.add_argument("--strategy", required=True)
    sim.add_argument("--predicate", default=None, help="stop predicate (default: the strategy's own completion)")
    sim.add_argument("--trials", type=_count, default=1)
    sim.add_argument("--dump-graph", default=None, help="write trial 0's edge list here")

    off = sub.add_parser("offline", parents=[common], help="offline hitting index with a verified plan")
    off.add_argument("--solver", choices=("subgraph", "mindeg", "pm", "ham"), required=True)
    off.add_argument("--n", type=_count, default=None, help="generate a seeded sequence on [n]")
    off.add_argument("--sequence", default=None, help="offer sequence file (text or binary)")
    off.add_argument("--k", type=int, default=1)
    off.add_argument("--subgraph", default="K3")
    off.add_argument("--trials", type=_count, default=1, help="independent generated sequences")

    const = sub.add_parser("constants", parents=[common], help="analytic constants")
    const.add_argument("--k", type=int, default=None, help="also compute alpha_k for this k")

    tab = sub.add_parser("table1", parents=[common], help="results table, optionally measured")
    tab.add_argument("--measure", action="store_true")
    tab.add_argument("--n", type=_count, default=20_000)
    tab.add_argument("--trials", type=_count, default=20)

    sweep = sub.add_parser("sweep", parents=[common], help="hitting times over a grid of n, with a log-log fit",
                           epilog=SPEC_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sweep.add_argument("--grid", type=_int_list, required=True)
    sweep.add_argument("--strategy", required=True)
    sweep.add_argument("--predicate", default=None)
    sweep.add_argument("--trials", type=_count, default=10)
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    seed = ns.seed
    if seed is None:
        seed = int(os.environ.get("SEMIRANDOM_SEED", "0"))
    threads = ns.threads if ns.threads is not None else (os.cpu_count() or 1)
    d = {k.replace("-", "_"): v for k, v in vars(ns).items()}
    d.update(seed=seed, threads=max(1, threads))
    return ExperimentConfig.from_dict(d)


def parse_config(argv: list[str] | None = None) -> ExperimentConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = config_from_args(ns)
    try:
        if cfg.strategy is not None:
            strategy_factory(cfg.strategy)
        if cfg.predicate is not None:
            predicate_from_spec(cfg.predicate)
        if cfg.command == "offline" and cfg.solver == "subgraph":
            SmallGraph.parse(cfg.subgraph or "K3")
    except (SpecError, ValueError, OSError) as e:
        parser.error(str(e))
    if cfg.command == "offline" and (cfg.n is None) == (cfg.sequence is None):
        parser.error("offline needs exactly one of --n or --sequence")
    if cfg.n is not None and cfg.n < 1:
        parser.error("--n must be positive")
    return cfg


# -- commands ----------------------------------------------------------------


def _emit(cfg: ExperimentConfig, payload: dict[str, Any], csv_text: str | None = None) -> None:
    if cfg.format == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        print(json.dumps(_jsonable(payload), indent=2, sort_keys=True, default=str))


def _outdir(cfg: ExperimentConfig) -> Path | None:
    if cfg.out is None:
        return None
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _stats_csv(stats: HittingStats) -> str:
    lines = ["trial,seed,n,rounds,hit_round,censored"]
    for i, (s, h) in enumerate(zip(stats.seeds, stats.hits)):
        rounds = stats.extras[i].get("rounds", h) if i < len(stats.extras) else h
        lines.append(f"{i},{s},{stats.n},{'' if rounds is None else rounds},{'' if h is None else h},{int(h is None)}")
    return "\n".join(lines) + "\n"


def cmd_simulate(cfg: ExperimentConfig) -> int:
    factory = strategy_factory(cfg.strategy)
    pred = predicate_from_spec(cfg.predicate) if cfg.predicate else None
    stats = estimate_hitting(cfg.n, factory, pred, max(cfg.trials, 1), cfg.seed, cfg.threads)
    summary = stats.summary()
    summary.update(strategy=cfg.strategy, predicate=cfg.predicate, config=cfg.to_dict())
    out = _outdir(cfg)
    if out is not None:
        stats.write_csv(out / "trials.csv")
        (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n")
    if cfg.dump_graph:
        rec = run(cfg.n, factory(), StopCondition(predicate=pred), seed=stats.seeds[0], keep_edges=True)
        g = MultiGraph.from_edges(cfg.n, rec.edges or (), track=())
        with open(cfg.dump_graph, "w") as fh:
            g.write_edge_list(fh)
    _emit(cfg, summary, _stats_csv(stats))
    return 0


def _solve_offline(cfg: ExperimentConfig, seq: OfferSequence) -> dict[str, Any]:
    n = seq.n
    solver = cfg.solver
    result: dict[str, Any] = {"solver": solver, "n": n, "seed": seq.seed}
    if solver == "subgraph":
        h = SmallGraph.parse(cfg.subgraph or "K3")
        w = m_of_graph(h, seq)
        if w is None:
            raise NotReachedError(f"{h} not reachable within the sequence")
        plan = offline_embed_plan(h, seq, w)
        verified = contains_subgraph(run_offline(seq, plan), h)
        result.update(graph=str(h), index=w.rounds, hosts=[x + 1 for x in w.hosts])
    elif solver == "mindeg":
        k = cfg.k or 1
        r = tau_offline_mindeg(k, seq)
        res = build_mindeg_graph(k, seq, r, seed=seq.seed or 0)
        plan = res.plan or []
        verified = res.ok and res.min_simple_degree is not None and res.min_simple_degree >= k
        result.update(k=k, index=r, hall_failure=res.failure)
    elif solver == "pm":
        m = tau_offline_pm(seq)
        plan, pairs = offline_pm_plan(seq, m)
        g = run_offline(seq, plan)
        verified = len(pairs) == n // 2 and all(g.multiplicity(a, b) for a, b in pairs) and len({x for p in pairs for x in p}) == n
        if n <= 2000:
            verified = verified and has_perfect_matching(g)
        result.update(index=m)
    else:
        m = tau_offline_ham(seq)
        plan, cycle = offline_ham_plan(seq, m)
        g = run_offline(seq, plan)
        verified = is_hamilton_cycle(g, cycle)
        if n <= 20:
            verified = verified and has_hamilton_cycle(g)
        result.update(index=m)
    result.update(index_over_n=result["index"] / n, verified=bool(verified))
    result["_plan"] = plan
    return result


def cmd_offline(cfg: ExperimentConfig) -> int:
    if cfg.sequence is not None:
        seqs = [OfferSequence.read(cfg.sequence)]
    else:
        seqs = [OfferSequence(cfg.n, seed=s) for s in _trial_seeds(cfg)]
    results = []
    try:
        for seq in seqs:
            results.append(_solve_offline(cfg, seq))
    except (NotReachedError, ValueError) as e:
        print(f"semirandom offline: {e}", file=sys.stderr)
        return 1
    out = _outdir(cfg)
    if out is not None:
        n = seqs[0].n
        write_plan(out / "plan.txt", results[0]["_plan"], n)
        if cfg.sequence is None:
            seqs[0].write_text(out / "sequence.txt")
    for r in results:
        r.pop("_plan")
    indices = sorted(r["index"] for r in results)
    payload: dict[str, Any] = {
        "solver": cfg.solver,
        "trials": len(results),
        "median_index": indices[(len(indices) - 1) // 2],
        "mean_index_over_n": sum(r["index_over_n"] for r in results) / len(results),
        "all_verified": all(r["verified"] for r in results),
        "results": results,
    }
    if out is not None:
        (out / "offline.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    csv_text = "trial,seed,n,index,verified\n" + "".join(
        f"{i},{'' if r['seed'] is None else r['seed']},{r['n']},{r['index']},{int(r['verified'])}\n" for i, r in enumerate(results)
    )
    _emit(cfg, payload, csv_text)
    return 0 if payload["all_verified"] else 1


def _trial_seeds(cfg: ExperimentConfig) -> list[int]:
    return [trial_seed(cfg.seed, i) for i in range(max(cfg.trials, 1))]


def cmd_constants(cfg: ExperimentConfig) -> int:
    ks = list(range(1, 6))
    if cfg.k is not None and cfg.k not in ks:
        if cfg.k < 1:
            print("semirandom constants: --k must be at least 1", file=sys.stderr)
            return 2
        ks.append(cfg.k)
    rows = analysis.constants_table(ks)
    payload = {"constants": [asdict(r) for r in rows]}
    csv_text = "name,value,method\n" + "".join(f"{r.name},{r.value!r},{r.method}\n" for r in rows)
    if cfg.format == "json":
        _emit(cfg, payload)
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_table1(cfg: ExperimentConfig) -> int:
    rows = measure_table1(cfg.n, max(cfg.trials, 1), cfg.seed, cfg.threads) if cfg.measure else table1_rows()
    payload = {
        "n": cfg.n if cfg.measure else None,
        "trials": cfg.trials if cfg.measure else None,
        "rows": [
            {
                "name": r.name,
                "regime": r.regime,
                "analytic": r.analytic,
                "measured": r.measured,
                "ratio": None if r.measured is None else r.measured / r.analytic,
                "tolerance": r.tolerance,
                "pass": r.passed,
            }
            for r in rows
        ],
    }
    if cfg.format == "csv":
        sys.stdout.write("name,regime,analytic,measured,ratio,tolerance,pass\n")
        for row in payload["rows"]:
            sys.stdout.write(",".join("" if row[k] is None else str(row[k]) for k in
                                      ("name", "regime", "analytic", "measured", "ratio", "tolerance", "pass")) + "\n")
    else:
        _emit(cfg, payload)
    out = _outdir(cfg)
    if out is not None:
        (out / "table1.json").write_text(json.dumps(payload, indent=2) + "\n")
    if cfg.measure and not all(r.passed for r in rows):
        return 1
    return 0


class _SweepMeasure:
    def __init__(self, strategy: str, predicate: str | None):
        self.strategy, self.predicate = strategy, predicate

    def __call__(self, n: int, seed: int) -> int | None:
        pred = predicate_from_spec(self.predicate) if self.predicate else None
        rec = run(n, strategy_factory(self.strategy)(), StopCondition(predicate=pred), seed=seed)
        if pred is None:
            return None if rec.censored else rec.rounds
        return rec.hits[pred.name]


def cmd_sweep(cfg: ExperimentConfig) -> int:
    grid = cfg.grid or []
    if not grid or min(grid) < 1:
        print("semirandom sweep: --grid needs positive sizes", file=sys.stderr)
        return 2
    measure = _SweepMeasure(cfg.strategy, cfg.predicate)
    if len(grid) >= 3:
        fit = scaling_exponent(measure, grid, max(cfg.trials, 1), cfg.seed, cfg.threads)
        payload = {"grid": grid, "medians": fit.medians, "slope": fit.slope, "intercept": fit.intercept,
                   "residuals": fit.residuals, "censored": fit.censored, "valid": fit.valid}
    else:
        from .experiments import measure_at

        meds = [measure_at(n, measure, max(cfg.trials, 1), cfg.seed, cfg.threads).median for n in grid]
        payload = {"grid": grid, "medians": meds, "slope": None}
    csv_text = "n,median\n" + "".join(f"{n},{m}\n" for n, m in zip(grid, payload["medians"]))
    out = _outdir(cfg)
    if out is not None:
        (out / "sweep.csv").write_text(csv_text)
        (out / "sweep.json").write_text(json.dumps(payload, indent=2) + "\n")
    _emit(cfg, payload, csv_text)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "offline": cmd_offline,
    "constants": cmd_constants,
    "table1": cmd_table1,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    cfg = parse_config(argv)
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
