from __future__ import annotations

import json

from dialogic.cli import main
from dialogic.entail import bundled_corpus_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_prints_polarity(capsys):
    code, out, _ = run(capsys, "parse", "suedois(x) -> scandinave(x)")
    assert code == 0
    payload = json.loads(out)
    assert payload["formula"] == "suedois(x) -> scandinave(x)"
    assert payload["polarity"]["suedois"] == {"positive": False, "negative": True}


def test_parse_error_exits_3(capsys):
    code, _, err = run(capsys, "parse", "a &")
    assert code == 3 and "error" in err


def test_prove_sequent_with_strategic_check(capsys):
    code, out, _ = run(capsys, "prove", "forall x. c(x) |- exists x. c(x)",
                       "--strategic-check")
    assert code == 0
    payload = json.loads(out)
    assert payload["strategic"] is True
    assert payload["derivation"]["sequent"]["left"] == ["forall x. c(x)"]


def test_prove_invalid_prints_none(capsys):
    code, out, _ = run(capsys, "prove", "a -> b")
    assert code == 0 and out.strip() == "NONE"


def test_strategy_and_check_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "strategy", "exists x. (a(x) -> forall y. a(y))")
    assert code == 0
    path = tmp_path / "s.json"
    path.write_text(out)
    code, out2, _ = run(capsys, "check", str(path))
    assert code == 0
    assert json.loads(out2) == {"kind": "strategy", "ok": True, "message": None}


def test_translate_round_trip_files(tmp_path, capsys):
    code, out, _ = run(capsys, "strategy", "forall x. a(x) | exists x. ~a(x)")
    assert code == 0
    spath = tmp_path / "s.json"
    spath.write_text(out)
    code, dout, _ = run(capsys, "translate", "--to-derivation", str(spath))
    assert code == 0
    dpath = tmp_path / "d.json"
    dpath.write_text(dout)
    code, out2, _ = run(capsys, "check", str(dpath))
    assert code == 0 and json.loads(out2)["ok"]
    code, sout, _ = run(capsys, "translate", "--to-strategy", str(dpath))
    assert code == 0
    s2path = tmp_path / "s2.json"
    s2path.write_text(sout)
    code, out3, _ = run(capsys, "check", str(s2path))
    assert code == 0 and json.loads(out3)["ok"]


def test_entail_exit_codes(capsys):
    code, out, _ = run(
        capsys, "entail",
        "-H", "exists x. exists y. (suedois(x) & (prix_Nobel(y) & gagner(x,y)))",
        "-H", "forall u. (suedois(u) -> scandinave(u))",
        "-C", "exists w. exists z. (scandinave(w) & (prix_Nobel(z) & gagner(w,z)))")
    assert code == 0
    assert json.loads(out)["answer"] == "yes"
    code, out, _ = run(capsys, "entail", "-H", "a", "-C", "~a")
    assert code == 1
    code, out, _ = run(capsys, "entail", "-H", "a", "-C", "b")
    assert code == 2
    code, _, _ = run(capsys, "entail", "-C", "a")
    assert code == 3


def test_suite_bundled_corpus(capsys):
    code, out, _ = run(capsys, "suite", str(bundled_corpus_path()))
    assert code == 0
    assert "4/4 expected matches" in out


def test_suite_mismatch_is_nonzero(tmp_path, capsys):
    path = tmp_path / "suite.json"
    path.write_text(json.dumps([
        {"id": "w", "hypotheses": ["a"], "conclusion": "b", "expected": "yes"}]))
    code, out, _ = run(capsys, "suite", str(path))
    assert code == 3 and "MISMATCH" in out


def test_deterministic_output(capsys):
    _, out1, _ = run(capsys, "strategy", "exists x. (a(x) -> forall y. a(y))")
    _, out2, _ = run(capsys, "strategy", "exists x. (a(x) -> forall y. a(y))")
    assert out1 == out2


def test_check_game_file(tmp_path, capsys):
    from dialogic.dialogue import game_to_json
    from .classics import disj_game

    path = tmp_path / "game.json"
    path.write_text(json.dumps(game_to_json(disj_game())))
    code, out, _ = run(capsys, "check", str(path))
    assert code == 0 and json.loads(out)["kind"] == "game"
    broken = json.loads(path.read_text())
    broken["moves"][3]["enabler"] = 0
    path.write_text(json.dumps(broken))
    code, out, _ = run(capsys, "check", str(path))
    assert code == 3 and not json.loads(out)["ok"]
