import csv
import json

import pytest
import yaml

from ocrs_lab import __version__
from ocrs_lab import runners
from ocrs_lab.cli import main
from ocrs_lab.errors import InvariantError


def invoke(*args):
    try:
        main(list(args))
    except SystemExit as exc:
        return exc.code
    return 0


def load(path):
    return json.loads(path.read_text())


def digests(out):
    return {f["path"]: f["sha256"] for f in load(out / "manifest.json")["files"]}


def write_yaml(path, data):
    path.write_text(yaml.safe_dump(data))
    return str(path)


def test_version(capsys):
    assert invoke("--version") == 0
    assert __version__ in capsys.readouterr().out


def test_verify_oracles(tmp_path, capsys):
    cfg = write_yaml(tmp_path / "v.yaml", {"corpus": ["graphic-k3", "uniform-1-4"], "max_k": 2,
                                           "occupancy_ks": [2], "occupancy_max_n": 3})
    out = tmp_path / "run"
    assert invoke("verify-oracles", "--config", cfg, "--seed", "1", "--out", str(out)) == 0
    assert "all brute-force checks passed" in capsys.readouterr().out
    report = load(out / "oracles.json")
    assert report["passed"] and report["schema_version"] == 1
    manifest = load(out / "manifest.json")
    assert manifest["command"] == "verify-oracles"
    assert [f["path"] for f in manifest["files"]] == ["oracles.json"]


@pytest.mark.parametrize("doc", [{"bogus": 1}, {"max_k": 0}, {"seed": -3}])
def test_malformed_config_leaves_nothing(tmp_path, capsys, doc):
    cfg = write_yaml(tmp_path / "bad.yaml", doc)
    out = tmp_path / "run"
    assert invoke("verify-oracles", "--config", cfg, "--out", str(out)) == 2
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["exit_code"] == 2 and record["error"]
    assert not out.exists()
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".run")]


def test_unparseable_and_missing_files(tmp_path):
    bad = tmp_path / "x.json"
    bad.write_text("{not json")
    assert invoke("verify-oracles", "--config", str(bad), "--out", str(tmp_path / "a")) == 2
    assert invoke("verify-oracles", "--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path / "b")) == 2


def test_out_is_required(tmp_path, monkeypatch):
    monkeypatch.delenv("OCRS_LAB_OUT", raising=False)
    assert invoke("verify-oracles", "--seed", "0") == 2


def test_environment_overrides(tmp_path, monkeypatch):
    cfg = write_yaml(tmp_path / "v.yaml", {"corpus": ["graphic-k3"], "max_k": 1, "occupancy_ks": [2],
                                           "occupancy_max_n": 2, "seed": 5})
    out = tmp_path / "env"
    monkeypatch.setenv("OCRS_LAB_CONFIG", cfg)
    monkeypatch.setenv("OCRS_LAB_SEED", "77")
    monkeypatch.setenv("OCRS_LAB_OUT", str(out))
    assert invoke("verify-oracles") == 0
    assert load(out / "manifest.json")["seed"] == 77


def test_gen_hard_girth(tmp_path):
    out = tmp_path / "hg"
    assert invoke("gen-instance", "--family", "hard-girth", "--param", "graph=petersen", "--param", "eps=0.25",
                  "--out", str(out)) == 0
    info = load(out / "hard_girth.json")
    inst = load(out / "prophet_instance.json")
    assert len(inst["matroid"]["edges"]) == 30
    assert info["girth_split"] == 10


def test_gen_two_element_instance(tmp_path):
    out = tmp_path / "u"
    assert invoke("gen-instance", "--family", "uniform-suite", "--param", "k=1", "--param", "n=2",
                  "--out", str(out)) == 0
    inst = load(out / "prophet_instance.json")
    assert inst["distributions"][0] == [[1.0, 1.0]]
    assert inst["distributions"][1] == [[4.0, 0.25], [0.0, 0.75]]


def test_gen_invalid_params(tmp_path):
    out = tmp_path / "bad"
    assert invoke("gen-instance", "--family", "overloaded-partition", "--param", "blocks=0", "--out", str(out)) == 2
    assert invoke("gen-instance", "--family", "hard-girth", "--param", "colour=red", "--out", str(out)) == 2
    assert not out.exists()


def test_generated_selection_runs(tmp_path):
    gen = tmp_path / "gen"
    assert invoke("gen-instance", "--family", "overloaded-partition", "--param", "blocks=1", "--out", str(gen)) == 0
    cfg = str(gen / "ocrs_select.json")
    outs = []
    for threads in (1, 3):
        out = tmp_path / f"sel{threads}"
        assert invoke("ocrs-select", "--config", cfg, "--seed", "3", "--trials", "3000", "--threads", str(threads),
                      "--out", str(out)) == 0
        outs.append(out)
    with (outs[0] / "selectability.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(0 <= float(r["rate"]) <= 1 for r in rows if r["rate"])
    assert load(outs[0] / "chain.json")["chain"]["level_sizes"] == [6, 2, 0]
    assert digests(outs[0]) == digests(outs[1])
    assert load(outs[0] / "manifest.json")["config_hash"] == load(outs[1] / "manifest.json")["config_hash"]


def test_indeterminate_comparison_exit(tmp_path, capsys):
    cfg = write_yaml(tmp_path / "ind.yaml", {
        "matroid": {"kind": "graphic", "num_vertices": 3, "edges": [[0, 1], [1, 2], [0, 2]]},
        "k": 1, "b": 0.5,
        "marginals": {"scale": 0.9, "certificate": [{"set": [0, 1], "weight": 0.34}, {"set": [1, 2], "weight": 0.33},
                                                    {"set": [0, 2], "weight": 0.33}]},
        "estimator": {"mode": "monte-carlo", "samples": 10, "max_samples": 10, "policy": "raise"},
    })
    out = tmp_path / "ind"
    assert invoke("ocrs-select", "--config", cfg, "--out", str(out), "--trials", "10") == 3
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "IndeterminateComparisonError" and record["radius"] > 0
    assert not out.exists()


def test_invariant_failure_exit(tmp_path, monkeypatch, capsys):
    def broken(cfg, ctx):
        (ctx.out / "half.csv").write_text("x\n")
        raise InvariantError("deliberately broken")

    monkeypatch.setitem(runners.RUNNERS, "verify-oracles", broken)
    out = tmp_path / "inv"
    assert invoke("verify-oracles", "--out", str(out)) == 4
    assert json.loads(capsys.readouterr().err.strip())["exit_code"] == 4
    assert not out.exists()


def test_prophet_ratio(tmp_path):
    gen = tmp_path / "gen"
    assert invoke("gen-instance", "--family", "uniform-suite", "--param", "k=2", "--param", "n=6",
                  "--out", str(gen)) == 0
    cfg = write_yaml(tmp_path / "p.yaml", {
        "instance_file": str(gen / "prophet_instance.json"),
        "gamblers": [{"kind": "accept-all-feasible"}, {"kind": "greedy-threshold", "threshold": 4.0},
                     {"kind": "ocrs-reduction"}],
        "reduction": {"samples": 500},
    })
    out = tmp_path / "pr"
    assert invoke("prophet-ratio", "--config", cfg, "--seed", "2", "--trials", "2000", "--out", str(out)) == 0
    with (out / "ratios.csv").open() as fh:
        policies = [r["policy"] for r in csv.DictReader(fh)]
    assert policies == ["accept-all-feasible", "greedy-threshold(4)", "ocrs-reduction"]
    with (out / "trials.csv").open() as fh:
        assert sum(1 for _ in fh) == 2001


def test_concentration_sweep(tmp_path):
    cfg = write_yaml(tmp_path / "c.yaml", {
        "functions": [{"kind": "capped-sum", "dim": 100, "p": 0.5, "cap": 55}, {"kind": "max", "dim": 50, "p": 0.02}],
        "grid": [[0.5, 3.0], [1.0, 1.0]],
        "counterexample": None,
    })
    out = tmp_path / "cs"
    assert invoke("concentration-sweep", "--config", cfg, "--trials", "2000", "--out", str(out)) == 0
    with (out / "sweep.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert all(r["within_bound"] in ("true", "false") for r in rows)
    assert not (out / "counterexample.json").exists()


def test_girth_bound_small(tmp_path):
    cfg = write_yaml(tmp_path / "g.yaml", {"graphs": ["k4", "petersen"], "eps": [0.25], "reduction_samples": 200,
                                           "estimator_samples": 200})
    out = tmp_path / "gb"
    assert invoke("girth-bound", "--config", cfg, "--trials", "1000", "--out", str(out)) == 0
    with (out / "girth.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert [r["graph"] for r in rows] == ["k4", "petersen"]
    assert all(int(r["girth_split"]) == 2 * int(r["girth_source"]) for r in rows)


def test_unknown_graph(tmp_path):
    cfg = write_yaml(tmp_path / "g.yaml", {"graphs": ["no-such-graph"]})
    assert invoke("girth-bound", "--config", cfg, "--trials", "10", "--out", str(tmp_path / "gb")) == 2
