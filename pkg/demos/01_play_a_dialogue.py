"""Play one dialogue game by hand, move by move.

The Proponent opens by asserting a formula; the Opponent always answers the
Proponent's last move; the Proponent may answer any earlier Opponent move.
The Proponent wins the moment they legally assert an atom, because atomic
assertions cannot be attacked and the Proponent's atoms must repeat something
the Opponent already conceded.
"""
from dialogic import (
    ExistsQuery, ForallAt, FormulaAttack, Move, OrQuery, Var,
    extend_game, game_winner, legal_moves, new_game, parse_formula,
    render_formula,
)
from dialogic.dialogue import ATTACK, DEFENCE


def show(game):
    for i, m in enumerate(game.moves):
        content = (render_formula(m.content)
                   if not isinstance(m.content, (OrQuery, ExistsQuery, ForallAt,
                                                 FormulaAttack))
                   else type(m.content).__name__
                   + (f"[{render_formula(m.content.formula)}]"
                      if isinstance(m.content, FormulaAttack) else ""))
        arrow = "" if m.enabler is None else f"   (answers move {m.enabler})"
        who = "P" if i % 2 == 0 else "O"
        print(f"  {i}. {who} {m.polarity} {content}{arrow}")
    print()


f = parse_formula("forall x. a(x) | exists x. ~a(x)")
g = new_game(f)
print(f"The Proponent asserts: {render_formula(f)}\n")

print("The Opponent's only option is to query the disjunction:")
for d in legal_moves(g, []):
    print("   legal:", d.move)
g = extend_game(g, Move(ATTACK, OrQuery(), 0))

print("\nThe Proponent gambles on the left disjunct...")
g = extend_game(g, Move(DEFENCE, parse_formula("forall x. a(x)"), 1))

print("...so the Opponent picks a fresh individual v0 and demands a(v0):")
g = extend_game(g, Move(ATTACK, ForallAt(Var("v0")), 2))

print("Stuck? No: the Proponent may defend the OLD disjunction query again,")
print("this time with the other disjunct (a different subformula occurrence).")
g = extend_game(g, Move(DEFENCE, parse_formula("exists x. ~a(x)"), 1))
g = extend_game(g, Move(ATTACK, ExistsQuery(), 4))

print("The Proponent names the Opponent's own individual as the witness:")
g = extend_game(g, Move(DEFENCE, parse_formula("~a(v0)"), 5))

print("Attacking ~a(v0) forces the Opponent to assert a(v0)...")
g = extend_game(g, Move(ATTACK, FormulaAttack(parse_formula("a(v0)")), 6))

print("...which is exactly what move 3 demanded. Reprise, and the game ends:\n")
g = extend_game(g, Move(DEFENCE, parse_formula("a(v0)"), 3))

show(g)
print("legal moves left:", legal_moves(g, []))
print("winner:", game_winner(g, []))
