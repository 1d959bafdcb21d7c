import json
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from semirandom import cli
from semirandom.cli import ExperimentConfig, main, parse_config
from semirandom.experiments import TableRow


def run_json(argv, capsys):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_simulate_summary(tmp_path, capsys):
    code, out = run_json(
        ["simulate", "--strategy=min_degree:mode=full", "--predicate=min_degree:k=1:mode=full",
         "--n=2000", "--trials=4", "--seed=7", "--threads=1", f"--out={tmp_path}"],
        capsys,
    )
    assert code == 0
    assert 0.66 < out["mean_over_n"] < 0.73
    assert (tmp_path / "trials.csv").read_text().startswith("trial,seed,n,rounds,hit_round,censored")
    assert json.loads((tmp_path / "summary.json").read_text())["trials"] == 4


def test_simulate_single_vertex(capsys):
    code, out = run_json(["simulate", "--n=1", "--strategy=offered", "--predicate=min_degree:k=2,mode=full", "--threads=1"], capsys)
    assert code == 0 and out["median"] == 1


def test_simulate_dump_graph(tmp_path, capsys):
    path = tmp_path / "g.edges"
    main(["simulate", "--n=20", "--strategy=s_min", "--predicate=min_degree:k=1", "--threads=1", f"--dump-graph={path}"])
    lines = path.read_text().splitlines()
    assert lines and all(1 <= int(x) <= 20 for line in lines for x in line.split())


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--n=10", "--strategy=??"],
        ["simulate", "--n=10", "--strategy=s_min", "--predicate=min_degree:k=x"],
        ["simulate", "--strategy=s_min"],
        ["offline", "--solver=pm"],
        ["offline", "--solver=subgraph", "--subgraph=Q9", "--n=10"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "semirandom", "simulate", "--n=5", "--strategy=??"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr


def test_offline_subgraph_k3(capsys, tmp_path):
    code, out = run_json(["offline", "--solver=subgraph", "--subgraph=K3", "--n=10000", "--trials=11", f"--out={tmp_path}"], capsys)
    assert code == 0 and out["median_index"] == 3 and out["all_verified"]
    assert (tmp_path / "plan.txt").read_text().splitlines()[0] == "10000 3"


def test_offline_pm_and_ham(capsys):
    code, out = run_json(["offline", "--solver=pm", "--n=100000", "--seed=3"], capsys)
    assert code == 0 and abs(out["mean_index_over_n"] - 0.6931) < 0.01
    code, out = run_json(["offline", "--solver=ham", "--n=100000"], capsys)
    assert code == 0 and abs(out["mean_index_over_n"] - 1.14619) < 0.01


def test_offline_mindeg_from_file(tmp_path, capsys):
    from semirandom.engine import OfferSequence

    seq = OfferSequence.from_seed(300, 1, 2000)
    seq.write_text(tmp_path / "seq.txt")
    code, out = run_json(["offline", "--solver=mindeg", "--k=2", f"--sequence={tmp_path / 'seq.txt'}"], capsys)
    assert code == 0 and out["all_verified"]


def test_offline_unreached_exit_1(tmp_path, capsys):
    (tmp_path / "short.txt").write_text("10 2\n1\n2\n")
    assert main(["offline", "--solver=pm", f"--sequence={tmp_path / 'short.txt'}"]) == 1


def test_constants(capsys):
    code, out = run_json(["constants", "--k=7"], capsys)
    rows = {r["name"]: r for r in out["constants"]}
    assert code == 0
    for name in ("h_1", "h_2", "h_3", "alpha_1", "alpha_5", "alpha_7", "alpha_ham", "bipartite_two_chance"):
        assert name in rows
    assert rows["alpha_7"]["method"] == "bisection"
    assert main(["constants", "--format=csv"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "name,value,method"


def test_table1_exit_code_tracks_tolerances(monkeypatch, capsys):
    assert main(["table1"]) == 0
    capsys.readouterr()
    good = [TableRow("x", "online", 1.0, 0.1, 1.05)]
    monkeypatch.setattr(cli, "measure_table1", lambda *a: good)
    assert main(["table1", "--measure", "--n=10", "--trials=1"]) == 0
    bad = good + [TableRow("y", "offline", 1.0, 0.1, 1.5)]
    monkeypatch.setattr(cli, "measure_table1", lambda *a: bad)
    assert main(["table1", "--measure", "--n=10", "--trials=1"]) == 1


def test_sweep(capsys, tmp_path):
    code, out = run_json(["sweep", "--grid=200,400,800", "--strategy=embed:graph=K2", "--trials=3", "--threads=1", f"--out={tmp_path}"], capsys)
    assert code == 0 and len(out["medians"]) == 3
    assert (tmp_path / "sweep.csv").exists()


def test_seed_env_fallback(monkeypatch):
    monkeypatch.setenv("SEMIRANDOM_SEED", "42")
    assert parse_config(["constants"]).seed == 42
    assert parse_config(["constants", "--seed=3"]).seed == 3


@given(
    st.sampled_from(["s_min", "s_dagger", "kout:k=3,r=2", "min_degree:mode=simple,timing=before,exclude=true"]),
    st.integers(1, 10**6),
    st.integers(1, 100),
    st.integers(0, 2**31),
    st.sampled_from(["json", "csv"]),
    st.one_of(st.none(), st.sampled_from(["min_degree:k=2,mode=full", "k_connected:k=2"])),
)
def test_config_round_trip(strategy, n, trials, seed, fmt, predicate):
    cfg = ExperimentConfig("simulate", n=n, strategy=strategy, predicate=predicate, trials=trials, seed=seed, threads=1, format=fmt)
    again = parse_config(cfg.to_argv())
    assert again == cfg
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
