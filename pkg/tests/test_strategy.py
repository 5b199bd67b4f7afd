from __future__ import annotations

import time

from dialogic.dialogue import ATTACK, DEFENCE, ExistsQuery, ForallAt, Move
from dialogic.formula import Atom, Var, parse_formula
from dialogic.gkk import SearchLimits
from dialogic.strategy import (
    Strategy, StrategyNode, expected_opponent_moves, find_winning_strategy,
    is_winning, iter_leaf_games, strategy_from_json, strategy_isomorphic,
    strategy_to_json, validate_strategy,
)

from .classics import (
    DISJ, DRINKER, CLASSIC_FORMULAS, disj_game, disj_strategy, distrib_strategy,
    drinker_strategy,
)

FAST = SearchLimits(time_budget_ms=3000)


def test_classic_strategies_validate_and_win():
    for build in (disj_strategy, drinker_strategy, distrib_strategy):
        s = build()
        report = validate_strategy(s)
        assert report.ok, report
        assert is_winning(s)


def test_noncanonical_universal_attack_is_condition_3():
    s = disj_strategy()
    bad_moves = list(disj_game().moves)
    bad_moves[3] = Move(ATTACK, ForallAt(Var("v5")), 2)
    # rebuild the tail so the defence still matches the attack term
    bad_moves[6] = Move(DEFENCE, parse_formula("~a(v5)"), 5)
    bad_moves[7] = Move(ATTACK,
                        disj_game().moves[7].content.__class__(parse_formula("a(v5)")), 6)
    bad_moves[8] = Move(DEFENCE, parse_formula("a(v5)"), 3)
    from .classics import _chain
    bad = Strategy(s.root_formula, (_chain(tuple(bad_moves[1:])),))
    report = validate_strategy(bad)
    assert not report.ok and report.condition == "condition-3"


def test_single_node_atomic_strategy_is_vacuously_winning():
    s = Strategy(Atom("a"), ())
    assert validate_strategy(s).ok
    assert is_winning(s)


def test_missing_opponent_cover_is_condition_1():
    # Drop the existential branch: after the disjunction attack, the tree
    # must contain exactly the Opponent's options, so removing a P child's
    # required Opponent answer elsewhere shows as missing cover.
    g = disj_game()
    from .classics import _chain
    truncated = Strategy(g.root, (_chain(g.moves[1:3]),))  # ends after P's defence
    report = validate_strategy(truncated)
    assert not report.ok and report.condition == "condition-1"


def test_unanswered_existential_attack_is_condition_5():
    s = Strategy(DRINKER, (StrategyNode(Move(ATTACK, ExistsQuery(), 0), ()),))
    report = validate_strategy(s)
    assert not report.ok and report.condition == "condition-5"


def test_two_p_children_is_condition_2():
    m1 = Move(ATTACK, ExistsQuery(), 0)
    d1 = Move(DEFENCE, parse_formula("a(c) -> forall y. a(y)"), 1)
    d2 = Move(DEFENCE, parse_formula("a(d) -> forall y. a(y)"), 1)
    s = Strategy(DRINKER, (StrategyNode(m1, (StrategyNode(d1, ()), StrategyNode(d2, ()))),))
    report = validate_strategy(s)
    assert not report.ok and report.condition == "condition-2"


def test_find_winning_strategy_classics():
    for f in CLASSIC_FORMULAS:
        started = time.monotonic()
        s = find_winning_strategy(f)
        elapsed = time.monotonic() - started
        assert s is not None
        assert validate_strategy(s).ok and is_winning(s)
        assert elapsed < 1.0


def test_find_winning_strategy_refuses_contradiction():
    assert find_winning_strategy(parse_formula("a & ~a"), FAST) is None
    assert find_winning_strategy(parse_formula("a -> b"), FAST) is None


def test_find_winning_strategy_entailment_formula():
    f = parse_formula(
        "(exists x. exists y. (suedois(x) & (prix_Nobel(y) & gagner(x,y))))"
        " & (forall u. (suedois(u) -> scandinave(u)))"
        " -> exists w. exists z. (scandinave(w) & (prix_Nobel(z) & gagner(w,z)))")
    s = find_winning_strategy(f, FAST)
    assert s is not None and is_winning(s)


def test_found_drinker_strategy_matches_figure():
    s = find_winning_strategy(DRINKER, FAST)
    assert strategy_isomorphic(s, drinker_strategy())


def test_leaf_games_and_cover():
    s = distrib_strategy()
    leaves = list(iter_leaf_games(s))
    assert len(leaves) == 2
    g = disj_game()
    from dialogic.dialogue import new_game
    cover = expected_opponent_moves(new_game(DISJ))
    assert [m.content.__class__.__name__ for m in cover] == ["OrQuery"]


def test_strategy_json_round_trip():
    for build in (disj_strategy, drinker_strategy, distrib_strategy):
        s = build()
        assert strategy_from_json(strategy_to_json(s)) == s


def test_isomorphism_ignores_variable_names():
    s1 = drinker_strategy()
    s2 = strategy_from_json(strategy_to_json(s1))
    assert strategy_isomorphic(s1, s2)
    assert not strategy_isomorphic(s1, disj_strategy())


def test_valid_but_losing_strategy_is_not_winning():
    # The tree may legally stop where the Proponent has no answer; such a
    # play is lost, so the strategy validates but does not win.
    f = parse_formula("a -> b")
    from dialogic.dialogue import FormulaAttack
    s = Strategy(f, (StrategyNode(
        Move(ATTACK, FormulaAttack(parse_formula("a")), 0), ()),))
    assert validate_strategy(s).ok
    assert not is_winning(s)
