import json

import pytest

from multiagg.cli import main
from multiagg.graph import gen_diamond_chain, load_graph


def _run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_diamond(tmp_path, capsys):
    f = tmp_path / "g.txt"
    assert _run(["gen", "--kind", "diamond", "--n", "10", "-o", str(f)], capsys)[0] == 0
    assert load_graph(f) == gen_diamond_chain(10)


def test_run_cc_report(tmp_path, capsys):
    g = tmp_path / "g.txt"
    main(["gen", "--kind", "random", "--n", "20", "--seed", "3", "-o", str(g)])
    out = tmp_path / "cc.json"
    code, text, _ = _run(["run-cc", "--graph", str(g), "--eps", "0.3", "--seed", "1", "-o", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert json.loads(text) == rep
    assert rep["result"]["rounds_used"] > 0
    assert {"config", "seed", "graph_hash", "version"} <= set(rep)
    assert len(rep["result"]["nodes"]) == 20


def test_reports_reproducible(tmp_path, capsys):
    args = ["run-bc", "--kind", "barbell", "--m", "5", "--eps-prime", "0.2", "--seed", "2", "--quiet"]
    main(args + ["-o", str(tmp_path / "a.json")])
    main(args + ["-o", str(tmp_path / "a2.json")])
    a = json.loads((tmp_path / "a.json").read_text())
    b = json.loads((tmp_path / "a2.json").read_text())
    a["config"].pop("out"), b["config"].pop("out")
    assert a == b


def test_run_mrct_and_trace(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MULTIAGG_OUT", str(tmp_path))
    s = tmp_path / "s.txt"
    s.write_text("1 4\n7\n")
    code, text, _ = _run(["run-mrct", "--kind", "diamond", "--n", "10", "--s-file", str(s), "--trace"], capsys)
    assert code == 0
    rep = json.loads(text)["result"]
    assert {"root", "tree_edges", "rc", "rounds_used"} <= set(rep)
    assert list(tmp_path.glob("*.trace.csv")) and list(tmp_path.glob("*.summary.json"))


def test_run_agg(tmp_path, capsys):
    vals = tmp_path / "v.txt"
    vals.write_text("".join(f"{u} {u % 3}\n" for u in range(1, 11)))
    code, text, _ = _run(["run-agg", "--kind", "path", "--n", "10", "--fn", "sum", "--k", "2",
                          "--values-file", str(vals), "--quiet", "-o", str(tmp_path / "r.json")], capsys)
    assert code == 0
    res = json.loads((tmp_path / "r.json").read_text())["result"]["results"]
    assert res[0] == {"root": 1, "value": 1 + 2 + 0}


def test_config_file(tmp_path, capsys):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"kind": "star", "n": 6, "eps": 0.5, "force_all": True}))
    code, text, _ = _run(["--config", str(conf), "run-cc", "-o", str(tmp_path / "o.json")], capsys)
    assert code == 0
    assert json.loads(text)["result"]["nodes"][0]["cc_estimate"] == 1.0


@pytest.mark.parametrize("args", [
    ["run-cc", "--graph", "/does/not/exist"],
    ["run-cc"],
    ["run-bc", "--kind", "path", "--n", "10", "--eps-prime", "0.9"],
    ["nonsense"],
])
def test_usage_errors_exit_2(args, capsys, tmp_path):
    try:
        code = main(args + [] if args == ["nonsense"] else args + ["-o", str(tmp_path / "x.json")])
    except SystemExit as e:
        code = e.code
    assert code == 2
    assert capsys.readouterr().err


def test_parse_error_is_reported(tmp_path, capsys):
    g = tmp_path / "bad.txt"
    g.write_text("n 3\n1 1 1\n")
    code, _, err = _run(["run-cc", "--graph", str(g)], capsys)
    assert code == 2 and "line 2: self-loop" in err


def test_verify_suite(tmp_path, capsys):
    code, _, err = _run(["verify", "--suite", "dlg", "--count", "5", "--n-max", "12", "--quiet",
                         "-o", str(tmp_path / "v.json")], capsys)
    assert code == 0 and "[PASS] dlg-validity" in err
    rep = json.loads((tmp_path / "v.json").read_text())
    assert rep["result"]["passed"] is True
