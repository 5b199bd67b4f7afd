"""Hand transcriptions of the three running example games and strategies:
the excluded-middle-style disjunction, the drinker formula, and the
distribution of a universal over a conjunction."""
from __future__ import annotations

from dialogic.strategy import Strategy, StrategyNode
from dialogic.dialogue import (
    ATTACK, DEFENCE, AndLeft, AndRight, ExistsQuery, ForallAt, FormulaAttack,
    Game, Move, OrQuery,
)
from dialogic.formula import Var, parse_formula

DISJ = parse_formula("forall x. a(x) | exists x. ~a(x)")
DRINKER = parse_formula("exists x. (a(x) -> forall y. a(y))")
DISTRIB = parse_formula(
    "forall x. (a(x) & b(x)) -> (forall x. a(x)) & (forall x. b(x))")

CLASSIC_FORMULAS = (DISJ, DRINKER, DISTRIB)

_ax = parse_formula("forall x. a(x)")
_ex = parse_formula("exists x. ~a(x)")
_av0 = parse_formula("a(v0)")


def disj_game() -> Game:
    return Game(DISJ, (
        Move(DEFENCE, DISJ, None),
        Move(ATTACK, OrQuery(), 0),
        Move(DEFENCE, _ax, 1),
        Move(ATTACK, ForallAt(Var("v0")), 2),
        Move(DEFENCE, _ex, 1),
        Move(ATTACK, ExistsQuery(), 4),
        Move(DEFENCE, parse_formula("~a(v0)"), 5),
        Move(ATTACK, FormulaAttack(_av0), 6),
        Move(DEFENCE, _av0, 3),
    ))


def drinker_game() -> Game:
    ay = parse_formula("forall y. a(y)")
    return Game(DRINKER, (
        Move(DEFENCE, DRINKER, None),
        Move(ATTACK, ExistsQuery(), 0),
        Move(DEFENCE, parse_formula("a(c) -> forall y. a(y)"), 1),
        Move(ATTACK, FormulaAttack(parse_formula("a(c)")), 2),
        Move(DEFENCE, ay, 3),
        Move(ATTACK, ForallAt(Var("v0")), 4),
        Move(DEFENCE, parse_formula("a(v0) -> forall y. a(y)"), 1),
        Move(ATTACK, FormulaAttack(_av0), 6),
        Move(DEFENCE, _av0, 5),
    ))


def distrib_game(side: str) -> Game:
    """One branch of the distribution strategy: side is 'a' or 'b'."""
    attack = AndLeft() if side == "a" else AndRight()
    atom = parse_formula(f"{side}(v0)")
    return Game(DISTRIB, (
        Move(DEFENCE, DISTRIB, None),
        Move(ATTACK, FormulaAttack(parse_formula("forall x. (a(x) & b(x))")), 0),
        Move(DEFENCE, parse_formula("(forall x. a(x)) & (forall x. b(x))"), 1),
        Move(ATTACK, attack, 2),
        Move(DEFENCE, parse_formula(f"forall x. {side}(x)"), 3),
        Move(ATTACK, ForallAt(Var("v0")), 4),
        Move(ATTACK, ForallAt(Var("v0")), 1),
        Move(DEFENCE, parse_formula("a(v0) & b(v0)"), 6),
        Move(ATTACK, attack, 7),
        Move(DEFENCE, atom, 8),
        Move(DEFENCE, atom, 5),
    ))


def _chain(moves):
    node = None
    for m in reversed(moves):
        node = StrategyNode(m, (node,) if node else ())
    return node


def linear_strategy(g: Game) -> Strategy:
    return Strategy(g.root, (_chain(g.moves[1:]),))


def disj_strategy() -> Strategy:
    return linear_strategy(disj_game())


def drinker_strategy() -> Strategy:
    return linear_strategy(drinker_game())


def distrib_strategy() -> Strategy:
    ga, gb = distrib_game("a"), distrib_game("b")
    m2 = StrategyNode(ga.moves[2], (_chain(ga.moves[3:]), _chain(gb.moves[3:])))
    return Strategy(ga.root, (StrategyNode(ga.moves[1], (m2,)),))


CLASSIC_STRATEGIES = (disj_strategy, drinker_strategy, distrib_strategy)
