"""Winning strategies and the two-way translation with derivations.

A strategy is a tree of games: branching records every option the Opponent
has, and the Proponent's answers are deterministic.  Reading the Opponent
moves of a winning strategy as sequent-building steps yields a derivation;
reading a strategic derivation as dialogue moves yields a winning strategy.
"""
from dialogic import (
    find_winning_strategy, is_strategic, is_winning, parse_formula,
    render_formula, validate_strategy,
)
from dialogic.dialogue import (
    AndLeft, AndRight, ExistsQuery, ForallAt, FormulaAttack, OrQuery,
)
from dialogic.formula import render_term
from dialogic.translate import derivation_to_strategy, strategy_to_derivation


def label(move):
    c = move.content
    if isinstance(c, AndLeft):
        return "?and1"
    if isinstance(c, AndRight):
        return "?and2"
    if isinstance(c, OrQuery):
        return "?or"
    if isinstance(c, ExistsQuery):
        return "?exists"
    if isinstance(c, ForallAt):
        return f"?forall[{render_term(c.term)}]"
    if isinstance(c, FormulaAttack):
        return f"?{render_formula(c.formula)}"
    return f"!{render_formula(c)}"


def show(node, depth):
    print("  " * depth + label(node.move) + f"  ->{node.move.enabler}")
    for child in node.children:
        show(child, depth + 1)


f = parse_formula("forall x. (a(x) & b(x)) -> (forall x. a(x)) & (forall x. b(x))")
print("Formula:", render_formula(f), "\n")
s = find_winning_strategy(f)
print("Winning strategy (the tree branches where the Opponent may choose):")
for child in s.children:
    show(child, 1)
print("\nvalidates:", validate_strategy(s).ok, "| winning:", is_winning(s))

d = strategy_to_derivation(s)
print("\nAs a derivation it concludes:", repr(d.conclusion))
print("strategic:", is_strategic(d).ok)

s2 = derivation_to_strategy(d)
print("\nRound trip gives a winning strategy for the same formula:",
      render_formula(s2.root_formula) == render_formula(f) and is_winning(s2))
