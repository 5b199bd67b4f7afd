from __future__ import annotations

import random

import pytest
from fastapi.testclient import TestClient

from dialogic.dialogue import game_from_json
from dialogic.server import create_app

DRINKER = "exists x. (a(x) -> forall y. a(y))"
DISTRIB = "forall x. (a(x) & b(x)) -> (forall x. a(x)) & (forall x. b(x))"


@pytest.fixture()
def client():
    return TestClient(create_app())


def create(client, formula: str):
    response = client.post("/v1/sessions", json={"formula": formula})
    assert response.status_code == 201, response.text
    return response.json()


def play_out(client, session_id: str, pick, term_for=None, max_rounds=40):
    """Drive a session to the end, choosing moves with pick(options)."""
    for _ in range(max_rounds):
        state = client.get(f"/v1/sessions/{session_id}").json()
        if state["status"] != "awaiting_human":
            return state
        options = client.get(f"/v1/sessions/{session_id}/moves").json()["moves"]
        assert options, "awaiting human but no legal moves"
        option = pick(options)
        move = option["move"]
        if option["open_term"] and term_for is not None:
            move = dict(move)
            move["content"] = dict(move["content"])
            move["content"]["term"] = term_for(move)
        reply = client.post(f"/v1/sessions/{session_id}/moves", json={"move": move})
        assert reply.status_code == 200, reply.text
        state = reply.json()
        game_from_json(state["game"])  # every transition stays a valid game
    raise AssertionError("game did not finish")


def test_create_drinker_has_strategy(client):
    session = create(client, DRINKER)
    assert session["machine_strategy_found"] is True
    assert session["status"] == "awaiting_human"
    assert session["game"]["moves"][0]["content"] == DRINKER


def test_create_invalid_formula_is_400(client):
    response = client.post("/v1/sessions", json={"formula": "a & ("})
    assert response.status_code == 400
    body = response.json()
    assert body["reason"] == "parse-error" and "error" in body


def test_create_unprovable_flags_fallback(client):
    session = create(client, "a -> b")
    assert session["machine_strategy_found"] is False


def test_drinker_first_moves(client):
    session = create(client, DRINKER)
    options = client.get(f"/v1/sessions/{session['id']}/moves").json()["moves"]
    assert [o["move"]["content"]["kind"] for o in options] == ["exists"]


def test_machine_wins_drinker_canonical_play(client):
    session = create(client, DRINKER)
    state = play_out(client, session["id"], lambda opts: opts[0])
    assert state["status"] == "finished_p_win"


def test_machine_wins_distribution_with_exotic_terms(client):
    session = create(client, DISTRIB)
    state = play_out(client, session["id"], lambda opts: opts[-1],
                     term_for=lambda move: "f(g(c,c))")
    assert state["status"] == "finished_p_win"


def test_machine_wins_distribution_random_play(client):
    rng = random.Random(7)
    terms = ["c", "f(c)", "g(c,d)", "v0", "weird_term"]
    for i in range(8):
        session = create(client, DISTRIB)
        state = play_out(client, session["id"],
                         lambda opts: rng.choice(opts),
                         term_for=lambda move: rng.choice(terms))
        assert state["status"] == "finished_p_win"


def test_fallback_session_loses_when_machine_stuck(client):
    session = create(client, "a -> b")
    options = client.get(f"/v1/sessions/{session['id']}/moves").json()["moves"]
    reply = client.post(f"/v1/sessions/{session['id']}/moves",
                        json={"move": options[0]["move"]})
    assert reply.json()["status"] == "finished_o_win"


def test_wrong_turn_and_unknown_session(client):
    session = create(client, "a -> b")
    options = client.get(f"/v1/sessions/{session['id']}/moves").json()["moves"]
    client.post(f"/v1/sessions/{session['id']}/moves",
                json={"move": options[0]["move"]})
    after = client.get(f"/v1/sessions/{session['id']}/moves")
    assert after.status_code == 409
    assert after.json()["reason"] == "wrong-turn"
    missing = client.get("/v1/sessions/does-not-exist")
    assert missing.status_code == 404
    assert missing.json()["reason"] == "unknown-session"


def test_illegal_move_is_rejected_with_reason(client):
    session = create(client, DRINKER)
    bad = {"polarity": "?", "content": {"kind": "or"}, "enabler": 0}
    reply = client.post(f"/v1/sessions/{session['id']}/moves", json={"move": bad})
    assert reply.status_code == 422
    assert reply.json()["reason"] == "justification"


def test_machine_wins_disjunction_for_any_term(client):
    disj = "forall x. a(x) | exists x. ~a(x)"
    for term in ("c", "f(c)", "strange_pick"):
        session = create(client, disj)
        seen_formula_attack = []

        def pick(options):
            seen_formula_attack.extend(
                o for o in options
                if isinstance(o["move"]["content"], dict)
                and o["move"]["content"]["kind"] == "formula")
            return options[0]

        state = play_out(client, session["id"], pick, term_for=lambda m: term)
        assert state["status"] == "finished_p_win"
        # The implication stage offered exactly the antecedent attack.
        assert seen_formula_attack


def test_replay_matches_human_existential_witness(client):
    # The machine attacks the human's existential hypothesis; the human may
    # defend with any witness (typed terms are accepted beyond the listed
    # options), and the strategy replay must recover it.
    for witness in ("v0", "f(g(c,d))", "oddball"):
        session = create(client, "(exists x. a(x)) -> exists y. a(y)")
        assert session["machine_strategy_found"] is True
        sid = session["id"]
        state = session
        while state["status"] == "awaiting_human":
            options = client.get(f"/v1/sessions/{sid}/moves").json()["moves"]
            chosen = options[0]["move"]
            if options[0]["move"]["polarity"] == "!":
                enabler = options[0]["move"]["enabler"]
                chosen = {"polarity": "!", "content": f"a({witness})",
                          "enabler": enabler}
            reply = client.post(f"/v1/sessions/{sid}/moves", json={"move": chosen})
            assert reply.status_code == 200, reply.text
            state = reply.json()
            game_from_json(state["game"])
        assert state["status"] == "finished_p_win", witness


def test_sessions_expire_after_idle_timeout():
    expiring = TestClient(create_app(idle_seconds=0.0))
    session = expiring.post("/v1/sessions", json={"formula": DRINKER}).json()
    response = expiring.get(f"/v1/sessions/{session['id']}")
    assert response.status_code == 404
