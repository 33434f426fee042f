import io
import json

import pytest

from fedex_menus.cli import main


def run(argv, capsys, monkeypatch, stdin=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def gen(args, capsys, monkeypatch):
    code, out, _ = run(["gen", *args], capsys, monkeypatch)
    assert code == 0
    return out


def test_gen_lba_solve(capsys, monkeypatch):
    inst = gen(["lba", "--n", "8"], capsys, monkeypatch)
    code, out, err = run(["solve"], capsys, monkeypatch, stdin=inst)
    assert code == 0
    doc = json.loads(out)
    assert doc["menu_complexity"]["per_day"] == list(range(1, 9))
    assert doc["days"][0]["atoms"] == [["25", "1"]]
    assert "day  atoms" in err


def test_perturbed_solve_verify_lp(capsys, monkeypatch):
    inst = gen(["exponential", "--n", "4", "--perturbed"], capsys, monkeypatch)
    _, solved, _ = run(["solve"], capsys, monkeypatch, stdin=inst)
    code, out, _ = run(["verify", "--lp"], capsys, monkeypatch, stdin=solved)
    assert code == 0
    doc = json.loads(out)
    assert doc["lp_gap"] == "0" and doc["ic_ok"] and doc["accounting_ok"]


def test_polygon_lpl(capsys, monkeypatch):
    code, out, _ = run(["polygon", "--gen", "lpl:6", "--eps", "1/2", "--scheme", "greedy"], capsys, monkeypatch)
    assert code == 0
    doc = json.loads(out)
    assert doc["size"] >= 5 and doc["interval_cover"] == "ok"


def test_polygon_csv(tmp_path, capsys, monkeypatch):
    path = tmp_path / "curve.csv"
    path.write_text("x,y\n0,0\n4,3\n8,4\n")
    code, out, _ = run(["polygon", str(path), "--eps", "1/10", "--scheme", "level"], capsys, monkeypatch)
    assert code == 0
    assert json.loads(out)["X"][0] == "0"


def test_approx_pipeline(capsys, monkeypatch):
    inst = gen(["lba", "--n", "8"], capsys, monkeypatch)
    code, out, _ = run(["approx", "--eps", "1/10"], capsys, monkeypatch, stdin=inst)
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["meets_guarantee"] and rep["ic_ok"]
    assert rep["menu_complexity"] <= 2 * rep["sum_k"]


def test_report_and_curves(capsys, monkeypatch):
    inst = gen(["exponential", "--n", "3", "--perturbed"], capsys, monkeypatch)
    code, out, _ = run(["report", "--lp", "--eps", "1/4"], capsys, monkeypatch, stdin=inst)
    assert code == 0
    doc = json.loads(out)
    assert doc["checks"]["ok"] and doc["revenue"]["lp_gap"] == "0"
    code, out, _ = run(["curves"], capsys, monkeypatch, stdin=inst)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("day,v,R_i")
    assert len(lines) == 1 + 3 * 9


def test_regular3_solve(capsys, monkeypatch):
    inst = gen(["regular3"], capsys, monkeypatch)
    code, out, _ = run(["solve"], capsys, monkeypatch, stdin=inst)
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "float" and doc["menu_complexity"]["per_day"][1] >= 2


def test_verify_battery(capsys, monkeypatch):
    code, out, err = run(["verify", "--battery", "20", "--seed", "3"], capsys, monkeypatch)
    assert code == 0
    assert json.loads(out)["failures"] == []
    assert "20 trials" in err


def test_verify_detects_bad_mechanism(capsys, monkeypatch):
    inst = gen(["lba", "--n", "4"], capsys, monkeypatch)
    _, solved, _ = run(["solve"], capsys, monkeypatch, stdin=inst)
    doc = json.loads(solved)
    # a day-2 menu that charges more than day 1 for the same good breaks downward IC
    doc["days"][1] = {"atoms": [["20", "1"]]}
    code, out, _ = run(["verify"], capsys, monkeypatch, stdin=json.dumps(doc))
    assert code == 1
    assert not json.loads(out)["ok"]


def test_deterministic_output(capsys, monkeypatch):
    inst = gen(["random", "--n", "3", "--vmax", "6", "--seed", "11"], capsys, monkeypatch)
    assert inst == gen(["random", "--n", "3", "--vmax", "6", "--seed", "11"], capsys, monkeypatch)
    outs = [run(["approx", "--eps", "1/4"], capsys, monkeypatch, stdin=inst)[1] for _ in range(2)]
    assert outs[0] == outs[1]


@pytest.mark.parametrize(
    "argv, stdin",
    [
        (["solve", "/nonexistent/file.json"], None),
        (["solve"], "{not json"),
        (["solve"], '{"n": 1, "v_max": 1, "q": ["1/2"], "pmf": [["0", "1"]]}'),
        (["polygon", "--gen", "foo:3", "--eps", "1/2"], None),
        (["polygon", "--eps", "1/2"], None),
        (["polygon", "--gen", "lpl:4", "--eps", "abc"], None),
        (["approx", "--eps", "2"], '{"n": 1, "v_max": 1, "q": ["1"], "pmf": [["0", "1"]]}'),
    ],
)
def test_usage_errors_exit_2(argv, stdin, capsys, monkeypatch):
    code, _, err = run(argv, capsys, monkeypatch, stdin=stdin)
    assert code == 2
    assert err.startswith("error:")


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
