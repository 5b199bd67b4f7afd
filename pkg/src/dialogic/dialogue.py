"""Dialogue moves and games: attack/defence options, legality, win condition.

A game is an alternating pointing sequence of moves.  Even indices belong to
the Proponent, odd indices to the Opponent.  Every odd-index move answers the
move just before it; even-index moves may answer any earlier odd-index move
through their enabler pointer.  A Proponent assertion of an atomic formula is
only legal as a reprise of a formula the Opponent asserted earlier, which is
why a Proponent atomic assertion ends (and wins) the game.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .formula import (
    And, App, Atom, Bottom, Exists, Forall, Formula, Implies, Or, Term, Var,
    alpha_eq, all_names, atom_key, canonical_key, first_fresh_variable,
    formula_subterms, is_atomic, parse_formula, parse_term, polarity_table,
    render_formula, render_term, substitute, term_variables,
)


class DialogueError(Exception):
    pass


class AtomNotAttackable(DialogueError):
    pass


class MismatchedAttack(DialogueError):
    pass


class IllegalMove(DialogueError):
    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


# ---------------------------------------------------------------------------
# Attack symbols


@dataclass(frozen=True)
class AndLeft:
    pass


@dataclass(frozen=True)
class AndRight:
    pass


@dataclass(frozen=True)
class OrQuery:
    pass


@dataclass(frozen=True)
class ExistsQuery:
    pass


@dataclass(frozen=True)
class ForallAt:
    term: Term


@dataclass(frozen=True)
class FormulaAttack:
    formula: Formula


AttackSymbol = Union[AndLeft, AndRight, OrQuery, ExistsQuery, ForallAt, FormulaAttack]

ATTACK = "?"
DEFENCE = "!"


@dataclass(frozen=True)
class Move:
    polarity: str  # "?" attack, "!" defence
    content: AttackSymbol | Formula
    enabler: int | None

    def is_attack(self) -> bool:
        return self.polarity == ATTACK

    def asserted(self) -> Formula | None:
        """The formula this move asserts, if any (defences and formula attacks)."""
        if self.polarity == DEFENCE:
            return self.content  # type: ignore[return-value]
        if isinstance(self.content, FormulaAttack):
            return self.content.formula
        return None


@dataclass(frozen=True)
class MoveDescriptor:
    """A candidate legal move; open_term marks an unfilled term slot."""
    move: Move
    open_term: bool = False


@dataclass(frozen=True)
class Game:
    root: Formula
    moves: tuple[Move, ...]


def new_game(root: Formula) -> Game:
    return Game(root, (Move(DEFENCE, root, None),))


def game_variables(g: Game) -> set[str]:
    """Variables appearing in the game: in asserted formulas or chosen terms."""
    out: set[str] = set()
    for m in g.moves:
        f = m.asserted()
        if f is not None:
            out |= {n for n in all_names(f)}
        if isinstance(m.content, ForallAt):
            out |= term_variables(m.content.term)
    return out


def fresh_game_variable(g: Game) -> str:
    return first_fresh_variable(game_variables(g))


def game_terms(g: Game) -> list[Term]:
    """Subterms occurring in the game's asserted formulas and chosen terms,
    bound-variable occurrences excluded, in appearance order."""
    out: list[Term] = []
    for m in g.moves:
        f = m.asserted()
        if f is not None:
            formula_subterms(f, set(), out)
        if isinstance(m.content, ForallAt) and m.content.term not in out:
            out.append(m.content.term)
    return out


# ---------------------------------------------------------------------------
# The attack/defence table


def attack_options(f: Formula, term_universe: list[Term]) -> list[AttackSymbol]:
    if is_atomic(f):
        raise AtomNotAttackable(render_formula(f))
    if isinstance(f, Implies):
        return [FormulaAttack(f.left)]
    if isinstance(f, And):
        return [AndLeft(), AndRight()]
    if isinstance(f, Or):
        return [OrQuery()]
    if isinstance(f, Exists):
        return [ExistsQuery()]
    if isinstance(f, Forall):
        return [ForallAt(t) for t in term_universe]
    raise DialogueError(f"not a formula: {f!r}")


def defence_options(asserted: Formula, attack: AttackSymbol,
                    term_universe: list[Term]) -> list[Formula]:
    if isinstance(attack, FormulaAttack):
        if not (isinstance(asserted, Implies) and alpha_eq(attack.formula, asserted.left)):
            raise MismatchedAttack(render_formula(asserted))
        return [asserted.right]
    if isinstance(attack, (AndLeft, AndRight)):
        if not isinstance(asserted, And):
            raise MismatchedAttack(render_formula(asserted))
        return [asserted.left if isinstance(attack, AndLeft) else asserted.right]
    if isinstance(attack, OrQuery):
        if not isinstance(asserted, Or):
            raise MismatchedAttack(render_formula(asserted))
        return [asserted.left, asserted.right]
    if isinstance(attack, ForallAt):
        if not isinstance(asserted, Forall):
            raise MismatchedAttack(render_formula(asserted))
        return [substitute(asserted.body, asserted.var, attack.term)]
    if isinstance(attack, ExistsQuery):
        if not isinstance(asserted, Exists):
            raise MismatchedAttack(render_formula(asserted))
        return [substitute(asserted.body, asserted.var, t) for t in term_universe]
    raise DialogueError(f"not an attack symbol: {attack!r}")


# ---------------------------------------------------------------------------
# Instance matching: find t with candidate == body[t/x], up to alpha


_VACUOUS = object()


def match_instance(body: Formula, var: str, candidate: Formula):
    """Term t such that candidate is alpha-equal to body[t/var], else None.

    Returns the sentinel ``_VACUOUS`` when var does not occur free in body
    (any term would do).
    """
    holes: list[Term] = []

    def terms(pattern: Term, target: Term, env: dict[str, str], shadowed: bool) -> bool:
        if isinstance(pattern, Var):
            if pattern.name == var and not shadowed and pattern.name not in env:
                holes.append(target)
                return True
            if pattern.name in env:
                return isinstance(target, Var) and target.name == env[pattern.name]
            return isinstance(target, Var) and target.name == pattern.name
        if not isinstance(target, App):
            return False
        if pattern.function != target.function or len(pattern.args) != len(target.args):
            return False
        return all(terms(p, t, env, shadowed) for p, t in zip(pattern.args, target.args))

    def walk(pattern: Formula, target: Formula, env: dict[str, str], shadowed: bool) -> bool:
        if isinstance(pattern, Bottom):
            return isinstance(target, Bottom)
        if isinstance(pattern, Atom):
            return (isinstance(target, Atom) and target.predicate == pattern.predicate
                    and len(target.args) == len(pattern.args)
                    and all(terms(p, t, env, shadowed)
                            for p, t in zip(pattern.args, target.args)))
        if isinstance(pattern, (And, Or, Implies)):
            return (type(target) is type(pattern)
                    and walk(pattern.left, target.left, env, shadowed)
                    and walk(pattern.right, target.right, env, shadowed))
        if isinstance(pattern, (Forall, Exists)):
            if type(target) is not type(pattern):
                return False
            inner = dict(env)
            inner[pattern.var] = target.var
            return walk(pattern.body, target.body, inner,
                        shadowed or pattern.var == var)
        return False

    if not walk(body, candidate, {}, False):
        return None
    if not holes:
        return _VACUOUS
    first = holes[0]
    if any(h != first for h in holes[1:]):
        return None
    # Reject capture: the filled term may not mention bound variables.
    if alpha_eq(substitute(body, var, first), candidate):
        return first
    return None


# ---------------------------------------------------------------------------
# Appending moves


def _check_attack_justified(g: Game, move: Move) -> None:
    target = g.moves[move.enabler].asserted()
    if target is None:
        raise IllegalMove("justification", "enabler is not an assertion")
    s = move.content
    if isinstance(s, FormulaAttack):
        if not (isinstance(target, Implies) and alpha_eq(s.formula, target.left)):
            raise IllegalMove("justification", "formula attack must assert the antecedent")
    elif isinstance(s, (AndLeft, AndRight)):
        if not isinstance(target, And):
            raise IllegalMove("justification", "conjunction attack on a non-conjunction")
    elif isinstance(s, OrQuery):
        if not isinstance(target, Or):
            raise IllegalMove("justification", "disjunction attack on a non-disjunction")
    elif isinstance(s, ExistsQuery):
        if not isinstance(target, Exists):
            raise IllegalMove("justification", "existential attack on a non-existential")
    elif isinstance(s, ForallAt):
        if not isinstance(target, Forall):
            raise IllegalMove("justification", "universal attack on a non-universal")
    else:
        raise IllegalMove("justification", f"bad attack content {s!r}")


def _check_defence_justified(g: Game, move: Move) -> None:
    attack = g.moves[move.enabler]
    if not attack.is_attack():
        raise IllegalMove("justification", "defence must answer an attack")
    if isinstance(attack.content, FormulaAttack):
        attacked = g.moves[attack.enabler].asserted()
        if not (isinstance(attacked, Implies)
                and alpha_eq(move.content, attacked.right)):  # type: ignore[arg-type]
            raise IllegalMove("justification", "wrong defence against a formula attack")
        return
    attacked = g.moves[attack.enabler].asserted()
    if attacked is None:
        raise IllegalMove("justification", "attacked move is not an assertion")
    s = attack.content
    f = move.content
    if isinstance(s, (AndLeft, AndRight)) and isinstance(attacked, And):
        want = attacked.left if isinstance(s, AndLeft) else attacked.right
        if not alpha_eq(f, want):  # type: ignore[arg-type]
            raise IllegalMove("justification", "wrong conjunct")
    elif isinstance(s, OrQuery) and isinstance(attacked, Or):
        if not (alpha_eq(f, attacked.left) or alpha_eq(f, attacked.right)):  # type: ignore[arg-type]
            raise IllegalMove("justification", "defence is neither disjunct")
    elif isinstance(s, ForallAt) and isinstance(attacked, Forall):
        want = substitute(attacked.body, attacked.var, s.term)
        if not alpha_eq(f, want):  # type: ignore[arg-type]
            raise IllegalMove("justification", "wrong universal instance")
    elif isinstance(s, ExistsQuery) and isinstance(attacked, Exists):
        if match_instance(attacked.body, attacked.var, f) is None:  # type: ignore[arg-type]
            raise IllegalMove("justification", "not an instance of the existential body")
    else:
        raise IllegalMove("justification", "attack does not match the attacked formula")


def check_append(g: Game, move: Move) -> None:
    """Raise IllegalMove unless g extended by move is still a game."""
    n = len(g.moves)
    if move.polarity not in (ATTACK, DEFENCE):
        raise IllegalMove("parity", f"bad polarity {move.polarity!r}")
    if move.polarity == DEFENCE and not _is_formula(move.content):
        raise IllegalMove("justification", "a defence must carry a formula")
    if move.polarity == ATTACK and _is_formula(move.content):
        raise IllegalMove("justification", "an attack must carry an attack symbol")
    if move.enabler is None or not (0 <= move.enabler < n):
        raise IllegalMove("enabler", "enabler must point to an earlier move")
    if n % 2 == 1:
        if move.enabler != n - 1:
            raise IllegalMove("enabler", "Opponent moves answer their immediate predecessor")
    else:
        if move.enabler % 2 != 1:
            raise IllegalMove("parity", "Proponent moves answer odd-index moves")
    if move.is_attack():
        _check_attack_justified(g, move)
    else:
        _check_defence_justified(g, move)
    asserted = move.asserted()
    if n % 2 == 0 and asserted is not None and is_atomic(asserted):
        if not any(m.asserted() is not None and alpha_eq(m.asserted(), asserted)
                   for i, m in enumerate(g.moves) if i % 2 == 1):
            raise IllegalMove("atom-not-reprise",
                              f"{render_formula(asserted)} was never asserted by the Opponent")
    if n % 2 == 0 and move.polarity == DEFENCE:
        key = canonical_key(move.content)  # type: ignore[arg-type]
        same = sum(1 for i, m in enumerate(g.moves)
                   if i % 2 == 0 and m.polarity == DEFENCE
                   and m.enabler == move.enabler
                   and canonical_key(m.content) == key)  # type: ignore[arg-type]
        # Defences are per subformula occurrence: a disjunction with equal
        # disjuncts offers two occurrences with the same content.
        allowed = 1
        attack = g.moves[move.enabler]
        if isinstance(attack.content, OrQuery):
            attacked = g.moves[attack.enabler].asserted()
            if (isinstance(attacked, Or)
                    and alpha_eq(attacked.left, attacked.right)):
                allowed = 2
        if same >= allowed:
            raise IllegalMove("duplicate-defence",
                              "same defence against the same enabler")


def _is_formula(x) -> bool:
    return isinstance(x, (Atom, Bottom, And, Or, Implies, Forall, Exists))


def extend_game(g: Game, m: Move | MoveDescriptor) -> Game:
    move = m.move if isinstance(m, MoveDescriptor) else m
    check_append(g, move)
    return Game(g.root, g.moves + (move,))


def validate_game(g: Game) -> None:
    """Raise IllegalMove if g is not a well-formed game."""
    if not g.moves or g.moves[0] != Move(DEFENCE, g.root, None):
        raise IllegalMove("parity", "the first move must assert the root formula")
    acc = new_game(g.root)
    for move in g.moves[1:]:
        acc = extend_game(acc, move)


# ---------------------------------------------------------------------------
# Legal-move enumeration


def _term_choices(g: Game, term_universe: list[Term]) -> list[Term]:
    fresh = Var(fresh_game_variable(g))
    out = list(term_universe)
    if all(t != fresh for t in out):
        out.append(fresh)
    return out


def _candidate_moves(g: Game, term_universe: list[Term]) -> Iterator[Move]:
    n = len(g.moves)
    choices = _term_choices(g, term_universe)
    if n % 2 == 1:
        # Opponent: respond to the Proponent's last move.
        last = g.moves[-1]
        target = last.asserted()
        if target is not None and not is_atomic(target):
            universe = choices if isinstance(target, Forall) else []
            for s in attack_options(target, universe):
                yield Move(ATTACK, s, n - 1)
        if last.is_attack():
            attacked = g.moves[last.enabler].asserted()
            s = last.content
            if isinstance(s, FormulaAttack) and isinstance(attacked, Implies):
                yield Move(DEFENCE, attacked.right, n - 1)
            elif isinstance(s, (AndLeft, AndRight, OrQuery, ForallAt, ExistsQuery)):
                universe = choices if isinstance(s, ExistsQuery) else []
                for f in defence_options(attacked, s, universe):
                    yield Move(DEFENCE, f, n - 1)
        return
    # Proponent: answer any earlier odd-index move.
    for j in range(1, n, 2):
        mj = g.moves[j]
        if mj.is_attack() and not isinstance(mj.content, FormulaAttack):
            attacked = g.moves[mj.enabler].asserted()
            universe = choices if isinstance(mj.content, ExistsQuery) else []
            for f in defence_options(attacked, mj.content, universe):
                yield Move(DEFENCE, f, j)
        elif mj.is_attack() and isinstance(mj.content, FormulaAttack):
            attacked = g.moves[mj.enabler].asserted()
            if isinstance(attacked, Implies):
                yield Move(DEFENCE, attacked.right, j)
        target = mj.asserted()
        if target is not None and not is_atomic(target):
            universe = choices if isinstance(target, Forall) else []
            for s in attack_options(target, universe):
                yield Move(ATTACK, s, j)


def legal_moves(g: Game, term_universe: list[Term]) -> list[MoveDescriptor]:
    """All and only moves whose appended game is valid, with term slots drawn
    from term_universe plus one fresh variable."""
    seen: set[tuple] = set()
    out: list[MoveDescriptor] = []
    for move in _candidate_moves(g, term_universe):
        key = _move_key(move)
        if key in seen:
            continue
        seen.add(key)
        try:
            check_append(g, move)
        except IllegalMove:
            continue
        out.append(MoveDescriptor(move))
    return out


def _content_key(content) -> tuple:
    if _is_formula(content):
        return ("F", canonical_key(content))
    if isinstance(content, ForallAt):
        return ("forall", render_term(content.term))
    if isinstance(content, FormulaAttack):
        return ("formula", canonical_key(content.formula))
    return (type(content).__name__,)


def _move_key(move: Move) -> tuple:
    return (move.polarity, move.enabler, _content_key(move.content))


def game_winner(g: Game, term_universe: list[Term]) -> str:
    """"P", "O", or "Open"."""
    n = len(g.moves)
    if n % 2 == 1:
        return "P" if not legal_moves(g, term_universe) else "Open"
    return "O" if not legal_moves(g, term_universe) else "Open"


# ---------------------------------------------------------------------------
# Structural facts every game must satisfy (violations indicate engine bugs)


@dataclass(frozen=True)
class PropositionReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_propositions(g: Game) -> PropositionReport:
    """Check the win/polarity facts on a game.

    (1) a Proponent-won game ends with an atomic assertion; (2) Proponent
    assertions sit at positive and Opponent assertions at negative predicate
    polarities of the root; (3) Proponent-asserted atoms have both polarities
    in the root.
    """
    violations: list[str] = []
    root_table = polarity_table(g.root)
    if game_winner(g, []) == "P":
        last = g.moves[-1].asserted()
        if last is None or not is_atomic(last):
            violations.append("prop1: final move of a P-won game must assert an atom")
    for i, m in enumerate(g.moves):
        f = m.asserted()
        if f is None:
            continue
        table = polarity_table(f)
        for name, entry in table.entries:
            if not entry.positive and not entry.negative:
                continue
            root_entry = root_table.entry(name)
            if i % 2 == 0:
                ok = ((not entry.positive or root_entry.positive)
                      and (not entry.negative or root_entry.negative))
            else:
                ok = ((not entry.positive or root_entry.negative)
                      and (not entry.negative or root_entry.positive))
            if not ok:
                violations.append(
                    f"prop2: move {i} asserts {render_formula(f)} out of polarity")
                break
        if i % 2 == 0 and i > 0 and is_atomic(f):
            # The opening assertion is exempt: it is no reprise, so the
            # both-polarities consequence does not follow for it.
            entry = root_table.entry(atom_key(f))
            if not (entry.positive and entry.negative):
                violations.append(
                    f"prop3: P asserts {render_formula(f)} whose predicate "
                    "lacks both polarities")
    return PropositionReport(tuple(violations))


# ---------------------------------------------------------------------------
# JSON serialization


def attack_to_json(s: AttackSymbol) -> dict:
    if isinstance(s, AndLeft):
        return {"kind": "and1"}
    if isinstance(s, AndRight):
        return {"kind": "and2"}
    if isinstance(s, OrQuery):
        return {"kind": "or"}
    if isinstance(s, ExistsQuery):
        return {"kind": "exists"}
    if isinstance(s, ForallAt):
        return {"kind": "forall", "term": render_term(s.term)}
    if isinstance(s, FormulaAttack):
        return {"kind": "formula", "formula": render_formula(s.formula)}
    raise DialogueError(f"not an attack symbol: {s!r}")


def attack_from_json(d: dict) -> AttackSymbol:
    kind = d.get("kind")
    if kind == "and1":
        return AndLeft()
    if kind == "and2":
        return AndRight()
    if kind == "or":
        return OrQuery()
    if kind == "exists":
        return ExistsQuery()
    if kind == "forall":
        return ForallAt(parse_term(d["term"]))
    if kind == "formula":
        return FormulaAttack(parse_formula(d["formula"]))
    raise DialogueError(f"unknown attack kind {kind!r}")


def move_to_json(m: Move) -> dict:
    content = (render_formula(m.content) if _is_formula(m.content)
               else attack_to_json(m.content))
    return {"polarity": m.polarity, "content": content, "enabler": m.enabler}


def move_from_json(d: dict) -> Move:
    content = d["content"]
    if isinstance(content, str):
        parsed: AttackSymbol | Formula = parse_formula(content)
    else:
        parsed = attack_from_json(content)
    return Move(d["polarity"], parsed, d["enabler"])


def game_to_json(g: Game) -> dict:
    return {"formula": render_formula(g.root),
            "moves": [move_to_json(m) for m in g.moves]}


def game_from_json(d: dict) -> Game:
    g = Game(parse_formula(d["formula"]),
             tuple(move_from_json(m) for m in d["moves"]))
    validate_game(g)
    return g
