"""End-to-end tests of the command-line interface and its exit codes."""

import json

import pytest

from websurf import metrics
from websurf.cli import main
from websurf.graphs import read_edge_list


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_generate_then_metrics_round_trip(capsys, tmp_path):
    out = tmp_path / "g.txt"
    code, _, _ = run_cli(
        capsys, "generate", "--model", "surfer", "--n", "100", "--d", "2",
        "--p", "0.5", "--seed", "7", "--out", str(out),
    )
    assert code == 0
    assert out.exists()
    code, stdout, _ = run_cli(capsys, "metrics", "--in", str(out))
    assert code == 0
    report = json.loads(stdout)
    g = read_edge_list(out)
    in_memory = metrics.metric_report(g)
    assert report["height"] == in_memory.height
    assert report["diameter"] == in_memory.diameter
    # byte-identical JSON on re-serialisation
    expected = json.dumps(
        {
            "n": in_memory.n,
            "height": in_memory.height,
            "diameter": in_memory.diameter,
            "semi_diameter": in_memory.semi_diameter,
            "weighted_height": in_memory.weighted_height,
        },
        sort_keys=True,
    )
    assert stdout.strip() == expected


def test_metrics_single_vertex(capsys, tmp_path):
    out = tmp_path / "one.txt"
    run_cli(capsys, "generate", "--model", "surfer", "--n", "1", "--d", "1",
            "--p", "0.5", "--seed", "1", "--out", str(out))
    code, stdout, _ = run_cli(capsys, "metrics", "--in", str(out))
    assert code == 0
    report = json.loads(stdout)
    assert report["height"] == 0
    assert report["diameter"] == 0


def test_theory_eval_crossover(capsys):
    code, stdout, _ = run_cli(capsys, "theory", "eval", "--fn", "p0")
    assert code == 0
    assert abs(float(stdout.strip()) - 0.206) <= 1e-3


def test_theory_eval_needs_parameters(capsys):
    code, _, err = run_cli(capsys, "theory", "eval", "--fn", "cL")
    assert code == 2
    assert "needs --p" in err


def test_theory_table(capsys, tmp_path):
    out = tmp_path / "curve.csv"
    code, _, _ = run_cli(capsys, "theory", "table", "--fn", "cL,cU",
                         "--p-grid", "0.1:0.9:0.2", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "p,cL,cU"
    assert len(lines) == 6
    p, cl, cu = (float(x) for x in lines[1].split(","))
    assert p == 0.1 and cu > cl


def test_branch_json(capsys):
    code, stdout, _ = run_cli(capsys, "branch", "--t-max", "4", "--p", "0.5",
                              "--seed", "11")
    assert code == 0
    payload = json.loads(stdout)
    assert payload["nodes"] >= 1
    assert payload["truncated"] is False
    assert payload["variant"] == "T"


def test_pagerank_csv(capsys, tmp_path):
    out = tmp_path / "g.txt"
    run_cli(capsys, "generate", "--model", "pagerank", "--n", "30", "--d", "2",
            "--p", "0.4", "--beta", "0.3", "--seed", "3", "--out", str(out))
    code, stdout, _ = run_cli(capsys, "pagerank", "--in", str(out), "--p", "0.4")
    assert code == 0
    lines = stdout.strip().splitlines()
    assert lines[0] == "vertex,prob"
    probs = [float(l.split(",")[1]) for l in lines[1:]]
    assert len(probs) == 30
    assert abs(sum(probs) - 1.0) < 1e-9


def test_experiment_subcommand(capsys, tmp_path):
    prefix = tmp_path / "exp"
    code, stdout, _ = run_cli(
        capsys, "experiment", "--kind", "height", "--n", "200", "400",
        "--trials", "5", "--seed", "77", "--band", "0.9", "--threads", "1",
        "--out", str(prefix),
    )
    assert code == 0
    assert (tmp_path / "exp.csv").exists()
    assert (tmp_path / "exp.json").exists()
    payload = json.loads(stdout)
    assert payload["passed"] is True


def test_exit_code_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--model", "surfer"])  # missing required flags
    assert exc.value.code == 2


def test_exit_code_bad_parameter(capsys):
    code, _, err = run_cli(capsys, "generate", "--model", "surfer", "--n", "10",
                           "--p", "2.0", "--seed", "1", "--out", "/tmp/x.txt")
    assert code == 2
    assert "error" in err


def test_exit_code_missing_file(capsys):
    code, _, err = run_cli(capsys, "metrics", "--in", "/nonexistent/file.txt")
    assert code == 3
    assert "i/o error" in err


def test_verify_subset(capsys):
    code, stdout, _ = run_cli(capsys, "verify", "--only", "1", "2")
    assert code == 0
    lines = stdout.strip().splitlines()
    assert lines[0] == "criterion,name,status,seconds,detail"
    assert len(lines) == 3
    assert all(",PASS," in l for l in lines[1:])


def test_generate_generalized_law(capsys, tmp_path):
    out = tmp_path / "t.txt"
    code, _, _ = run_cli(capsys, "generate", "--model", "generalized", "--law",
                         "bernoulli", "--n", "50", "--seed", "5", "--out", str(out))
    assert code == 0
    g = read_edge_list(out)
    assert g.variant == "generalized-bernoulli"
    assert g.d == 1
