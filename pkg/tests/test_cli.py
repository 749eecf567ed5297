import json

import pytest

from riskpath.cli import EXIT_BUDGET, EXIT_IO, EXIT_OK, EXIT_VALIDATION, main
from riskpath.records import read_record


def run(*args):
    return main([str(a) for a in args])


def test_gen_counts(tmp_path, capsys):
    out = tmp_path / "d.json"
    assert run("gen", "diamond_sequence", "k=4", "--out", out) == EXIT_OK
    assert "13 vertices" in capsys.readouterr().out
    assert len(json.loads(out.read_text())["vertices"]) == 13
    assert run("gen", "chain", "m=1", "--out", tmp_path / "c.json") == EXIT_OK
    assert len(json.loads((tmp_path / "c.json").read_text())["vertices"]) == 2
    assert run("gen", "diamond_sequence", "k=0", "--out", tmp_path / "x.json") == EXIT_VALIDATION
    assert run("gen", "chain", "m", "--out", tmp_path / "x.json") == EXIT_VALIDATION


def test_run_and_coverage(tmp_path, capsys):
    g = tmp_path / "g.json"
    run("gen", "chain", "m=2", "--out", g)
    assert run("run", "--graph", g, "--out", tmp_path / "r.json") == EXIT_OK
    out = capsys.readouterr().out
    assert "budget:" in out and "ᾱ=0.001" in out
    header, body = read_record(tmp_path / "r.json", "result")
    assert "timestamp" in header and abs(body["estimate"] - 0.95) < 0.01
    assert run("run", "--graph", g, "--algorithm", "baseline", "--out", tmp_path / "b.json") == EXIT_OK
    _, bbody = read_record(tmp_path / "b.json", "result")
    assert abs(bbody["estimate"] - 0.9487) < 0.01 and bbody["allocation"] is None
    assert run("coverage", "--graph", g, "--result", tmp_path / "r.json", "--out", tmp_path / "c.json") == EXIT_OK
    _, rep = read_record(tmp_path / "c.json", "coverage")
    assert 0.88 <= rep["coverage"] <= 0.93
    assert rep["verdicts"]["thm1_lower_ok"] is True


def test_coverage_constant_graph(tmp_path):
    g = tmp_path / "g.json"
    run("gen", "chain", "m=2", "kind=constant", "value=4", "--out", g)
    run("run", "--graph", g, "--samples", "20", "--buckets", "4", "--out", tmp_path / "r.json")
    run("coverage", "--graph", g, "--result", tmp_path / "r.json", "--out", tmp_path / "c.json")
    _, rep = read_record(tmp_path / "c.json", "coverage")
    assert rep["coverage"] == 1.0 and rep["estimate"] == 4.0


def test_graph_mismatch(tmp_path, capsys):
    run("gen", "chain", "m=2", "--out", tmp_path / "a.json")
    run("gen", "chain", "m=3", "--out", tmp_path / "b.json")
    run("run", "--graph", tmp_path / "a.json", "--samples", "100", "--buckets", "5", "--out", tmp_path / "r.json")
    code = run("coverage", "--graph", tmp_path / "b.json", "--result", tmp_path / "r.json")
    assert code == EXIT_VALIDATION
    assert "GraphMismatch" in capsys.readouterr().err


def test_exit_codes(tmp_path):
    run("gen", "rooms16", "--out", tmp_path / "g.json")
    assert run("run", "--graph", tmp_path / "g.json", "--algorithm", "baseline", "--path-cap", "4") == EXIT_BUDGET
    assert run("run", "--graph", tmp_path / "missing.json") == EXIT_IO
    (tmp_path / "bad.json").write_text('{"vertices": ["a", "b"], "source": "a", "terminal": "b", '
                                       '"edges": [{"from": "b", "to": "a", "agent": {"kind": "uniform"}}]}')
    assert run("run", "--graph", tmp_path / "bad.json") == EXIT_VALIDATION
    (tmp_path / "junk.json").write_text("{not json")
    assert run("run", "--graph", tmp_path / "junk.json") == EXIT_VALIDATION
    assert run("run", "--graph", tmp_path / "g.json", "--alpha", "1.5") == EXIT_VALIDATION


def test_all_paths_table(tmp_path, capsys):
    run("gen", "mouse_nav", "--out", tmp_path / "g.json")
    run("run", "--graph", tmp_path / "g.json", "--algorithm", "baseline", "--all-paths",
        "--samples", "500", "--out", tmp_path / "r.json")
    _, body = read_record(tmp_path / "r.json")
    assert len(body["path_estimates"]) == 2
    assert capsys.readouterr().out.count("d0 -> ") >= 3


def test_sweep_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert run("sweep", "samples", "--values", "200,400", "--buckets", "10", "--coverage-samples", "500",
               "--threads", "1", "--out", out) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "param,estimate,coverage,ci_lo,ci_hi,seconds"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["200", "400"]
    assert run("sweep", "samples", "--values", "a,b") == EXIT_VALIDATION


def test_table_command(tmp_path, capsys):
    assert run("table", "--benchmarks", "MouseNav", "--samples", "300", "--coverage-samples", "300",
               "--out", tmp_path / "t.tsv") == EXIT_OK
    assert (tmp_path / "t.tsv").read_text().startswith("benchmark\t")


def test_reuse_flag_recorded(tmp_path):
    run("gen", "chain", "m=2", "--out", tmp_path / "g.json")
    run("run", "--graph", tmp_path / "g.json", "--reuse-draws", "--samples", "100", "--buckets", "5",
        "--out", tmp_path / "r.json")
    _, body = read_record(tmp_path / "r.json")
    assert body["config"]["reuse_draws"] is True


def test_parser_rejects_unknown_family():
    with pytest.raises(SystemExit):
        main(["gen", "pentagon"])
