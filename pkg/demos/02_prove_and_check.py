"""Prove sequents in the retained-principal calculus and check derivations.

The checker is independent of the search: it replays every rule schema and
the eigenvariable conditions.  The strategic restriction (the antecedent must
be active in the left premise of an implication-left, the chosen witness in
the premise of an existential-right) is what makes a derivation readable as
a winning strategy, and not every valid derivation satisfies it.
"""
from dialogic import (
    Derivation, RuleApplication, Sequent, Var, is_strategic, parse_sequent,
    prove, validate_derivation,
)
from dialogic.formula import parse_formula
from dialogic.translate import strategize


def show(d, indent=0):
    tag = d.rule.rule
    extra = ""
    if d.rule.term is not None:
        from dialogic.formula import render_term
        extra = f" [{render_term(d.rule.term)}]"
    if d.rule.eigen is not None:
        extra = f" [{d.rule.eigen}]"
    print("  " * indent + f"{d.conclusion!r}   <{tag}{extra}>")
    for p in d.premises:
        show(p, indent + 1)


goal = parse_sequent("forall x. c(x) |- exists x. c(x)")
print(f"Searching for a strategic derivation of: {goal!r}\n")
d = prove(goal)
show(d)
print("\nvalidates:", validate_derivation(d).ok, "| strategic:", is_strategic(d).ok)

print("\nThe same sequent can be derived upside-down (instantiate the")
print("existential first, then the universal) - valid, but not strategic:\n")
s1 = Sequent(goal.left, (parse_formula("c(x)"),) + goal.right)
s2 = Sequent((parse_formula("c(x)"),) + s1.left, s1.right)
upside_down = Derivation(goal, RuleApplication("ExR", "R", 0, term=Var("x")), (
    Derivation(s1, RuleApplication("AllL", "L", 0, term=Var("x")), (
        Derivation(s2, RuleApplication("Id", "R", 0), ()),
    )),
))
show(upside_down)
check = is_strategic(upside_down)
print("\nvalidates:", validate_derivation(upside_down).ok,
      "| strategic:", check.ok, "| offending node:", check.path)

print("\nstrategize() repairs it:")
show(strategize(upside_down))
