import io
import json
from pathlib import Path

import pytest

from selgame.cli import main
from selgame.engine import parse_transcript, rejudge
from selgame.scenario import load_scenario
from selgame.suites import shipped_registry

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_scenario(tmp_path, **over):
    sc = {
        "name": "tiny",
        "space": "discrete_n",
        "game": {"selection": "single", "p1_class": "K", "p2_target": "K"},
        "horizon": 2,
        "seed": 0,
        "p1": {"strategy": "adversary"},
        "p2": {"strategy": "markov_from_cofinality", "params": {"witness": "hemicompact"}},
    }
    sc.update(over)
    p = tmp_path / "tiny.json"
    p.write_text(json.dumps(sc))
    return str(p)


def record_types(text):
    return [json.loads(line)["type"] for line in text.splitlines()]


# -- spaces list and the registry ---------------------------------------------

def test_spaces_list(capsys):
    code, out, _ = run(capsys, "spaces", "list")
    assert code == 0
    assert out.splitlines()[0].split()[:2] == ["id", "kind"]
    assert "real_line_2" in out and "ProductSpace" in out


def test_spaces_list_json(capsys):
    code, out, _ = run(capsys, "spaces", "list", "--json")
    rows = json.loads(out)
    assert code == 0 and [r["id"] for r in rows] == sorted(r["id"] for r in rows)


def test_empty_registry(capsys, monkeypatch, tmp_path):
    p = tmp_path / "reg.json"
    p.write_text(json.dumps({"version": 1, "spaces": []}))
    monkeypatch.setenv("SELGAME_REGISTRY", str(p))
    code, out, _ = run(capsys, "spaces", "list")
    assert code == 0 and len(out.splitlines()) == 1


def test_corrupt_registry(capsys, monkeypatch, tmp_path):
    p = tmp_path / "reg.json"
    p.write_text('{"version": 1,\n "spaces": [\n')
    monkeypatch.setenv("SELGAME_REGISTRY", str(p))
    code, _, err = run(capsys, "spaces", "list")
    assert code == 2 and "line" in err


def test_missing_registry(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("SELGAME_REGISTRY", str(tmp_path / "nowhere.json"))
    code, _, err = run(capsys, "spaces", "list")
    assert code == 2 and err.startswith("selgame:")


# -- verify ----------------------------------------------------------------------

def test_verify_one_suite(capsys):
    code, out, _ = run(capsys, "verify", "pairing")
    assert code == 0
    assert out.splitlines()[0].startswith("pairing") and "PASS" in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "baire", "--json")
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["suites"][0]["name"] == "baire"


@pytest.mark.parametrize("argv", [["verify", "nonsense"], ["verify"], ["verify", "pairing", "--all"]])
def test_verify_bad_arguments(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


# -- play ------------------------------------------------------------------------

def test_unknown_scenario(capsys):
    code, _, err = run(capsys, "play", "no_such_scenario")
    assert code == 2 and "no_such_scenario" in err


def test_bad_scenario_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"name": "x",\n  "space": }')
    code, _, err = run(capsys, "play", str(p))
    assert code == 2 and "line 2" in err


@pytest.mark.parametrize("over", [{"space": "nope"}, {"horizon": -1}, {"horizon": 10 ** 6},
                                  {"colour": "red"}, {"p2": {"strategy": "psychic"}}])
def test_invalid_scenarios(capsys, tmp_path, over):
    code, _, err = run(capsys, "play", write_scenario(tmp_path, **over))
    assert code == 2 and err


def test_horizon_zero_writes_header_and_report(capsys, tmp_path):
    code, out, err = run(capsys, "play", write_scenario(tmp_path, horizon=0))
    assert code == 0
    assert record_types(out) == ["header", "report"]
    assert "rounds played: 0" in err


def test_out_file_and_summary(capsys, tmp_path):
    dest = tmp_path / "t.jsonl"
    code, out, _ = run(capsys, "play", write_scenario(tmp_path), "--out", str(dest))
    assert code == 0 and "winner" in out
    assert record_types(dest.read_text()) == ["header", "round", "round", "report"]


def test_seed_repetition_identical(capsys):
    _, a, _ = run(capsys, "play", "markov_discrete", "--seed", "4")
    _, b, _ = run(capsys, "play", "markov_discrete", "--seed", "4")
    _, c, _ = run(capsys, "play", "markov_discrete", "--seed", "5")
    assert a == b and a != c


@pytest.mark.parametrize("name", ["product_k_rothberger", "chq_finite_open"])
def test_golden_transcripts(capsys, name):
    code, out, _ = run(capsys, "play", name)
    want = (GOLDEN / (name + ".jsonl")).read_text()
    assert code == 0 and out == want
    t = parse_transcript(want)
    reg = shipped_registry()
    assert rejudge(t, reg.get(load_scenario(name, reg).space)) == t.report


def test_chq_summary_reports_measure(capsys):
    code, _, err = run(capsys, "play", "chq_finite_open")
    assert code == 0
    assert "below 1/2" in err and "uncovered point" in err


def test_baire_reports_escape(capsys):
    code, _, err = run(capsys, "play", "baire")
    assert code == 0 and "escape" in err and "winner: P1" in err


# -- interactive -------------------------------------------------------------------

def test_interactive_reprompts_without_moving(capsys, monkeypatch, tmp_path):
    monkeypatch.setattr("sys.stdin", io.StringIO("zero\n100000\n1 2\n0\n0\n"))
    code, out, err = run(capsys, "play", write_scenario(tmp_path), "--interactive", "P2")
    assert code == 0
    assert "not a number" in err and "out of range" in err and "exactly one index" in err
    rounds = [json.loads(line) for line in out.splitlines() if '"type":"round"' in line]
    assert [r["p2"] for r in rounds] == [0, 0]


def test_interactive_eof_aborts(capsys, monkeypatch, tmp_path):
    monkeypatch.setattr("sys.stdin", io.StringIO("0\n"))
    code, out, err = run(capsys, "play", write_scenario(tmp_path), "--interactive", "P2")
    assert code == 3
    assert record_types(out) == ["header", "round", "abort", "report"]
    assert "aborted" in err


def test_interactive_p1(capsys, monkeypatch, tmp_path):
    monkeypatch.setattr("sys.stdin", io.StringIO("0\n0\n"))
    code, out, _ = run(capsys, "play", write_scenario(tmp_path), "--interactive", "P1")
    assert code == 0 and record_types(out).count("round") == 2


# -- duel ----------------------------------------------------------------------------

def test_duel_product_twenty_wins(capsys):
    code, out, _ = run(capsys, "duel", "product_k_rothberger", "--seeds", "20")
    assert code == 0
    assert out.splitlines()[-1] == "product_k_rothberger: P2 won 20 of 20 games"


def test_duel_falsifier_names_interval(capsys):
    code, out, _ = run(capsys, "duel", "falsifier", "--seeds", "2")
    assert code == 0
    assert "P1 wins" in out and "[2000, 2001]" in out
    assert out.splitlines()[-1] == "falsifier: P2 won 0 of 2 games"


def test_duel_json(capsys):
    code, out, _ = run(capsys, "duel", "markov_discrete", "--seeds", "3", "--json")
    data = json.loads(out)
    assert code == 0 and data["p2_wins"] == 3 and [g["seed"] for g in data["games"]] == [0, 1, 2]


def test_duel_needs_positive_seeds(capsys):
    code, _, _ = run(capsys, "duel", "markov_discrete", "--seeds", "0")
    assert code == 2
