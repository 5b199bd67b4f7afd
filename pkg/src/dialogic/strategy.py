"""Strategy trees over dialogue games: validation, winningness, search.

A strategy is a prefix-closed tree of games for one formula.  The Proponent
is deterministic (one child under every Opponent move), the Opponent's
options are covered exhaustively, and the Opponent's term choices (universal
attacks and existential defences) are canonicalized to the first enumeration
variable that does not yet appear in the game, which keeps the cover finite.
"""
from __future__ import annotations

from dataclasses import dataclass

from .dialogue import (
    ATTACK, DEFENCE, AndLeft, AndRight, ExistsQuery, ForallAt, FormulaAttack,
    Game, Move, OrQuery, extend_game, fresh_game_variable, game_winner,
    move_from_json, move_to_json, new_game,
)
from .formula import (
    And, Atom, Bottom, Exists, Forall, Formula, Implies, Or, Var,
    canonical_key, is_atomic, parse_formula, render_formula, render_term,
)
from .gkk import SearchLimits, Sequent, prove


class StrategyError(Exception):
    pass


@dataclass(frozen=True)
class StrategyNode:
    move: Move
    children: tuple["StrategyNode", ...]


@dataclass(frozen=True)
class Strategy:
    root_formula: Formula
    children: tuple[StrategyNode, ...]


@dataclass(frozen=True)
class StrategyReport:
    ok: bool
    condition: str | None = None
    path: tuple[int, ...] | None = None
    message: str | None = None


def _move_key(m: Move) -> tuple:
    content = m.content
    if isinstance(content, ForallAt):
        c: tuple = ("forall", render_term(content.term))
    elif isinstance(content, FormulaAttack):
        c = ("fa", canonical_key(content.formula))
    elif isinstance(content, (AndLeft, AndRight, OrQuery, ExistsQuery)):
        c = (type(content).__name__,)
    else:
        c = ("f", canonical_key(content))
    return (m.polarity, m.enabler, c)


def expected_opponent_moves(g: Game) -> list[Move]:
    """The canonical cover of the Opponent's options after the Proponent's
    last move: every legal response, with universal-attack and
    existential-defence term slots pinned to the first fresh variable."""
    n = len(g.moves)
    last = g.moves[-1]
    fresh = Var(fresh_game_variable(g))
    out: list[Move] = []
    target = last.asserted()
    if target is not None and not is_atomic(target):
        if isinstance(target, Implies):
            out.append(Move(ATTACK, FormulaAttack(target.left), n - 1))
        elif isinstance(target, And):
            out.append(Move(ATTACK, AndLeft(), n - 1))
            out.append(Move(ATTACK, AndRight(), n - 1))
        elif isinstance(target, Or):
            out.append(Move(ATTACK, OrQuery(), n - 1))
        elif isinstance(target, Exists):
            out.append(Move(ATTACK, ExistsQuery(), n - 1))
        elif isinstance(target, Forall):
            out.append(Move(ATTACK, ForallAt(fresh), n - 1))
    if last.is_attack():
        if isinstance(last.content, FormulaAttack):
            attacked = g.moves[last.enabler].asserted()
            if isinstance(attacked, Implies):
                out.append(Move(DEFENCE, attacked.right, n - 1))
        else:
            attacked = g.moves[last.enabler].asserted()
            s = last.content
            if isinstance(s, AndLeft) and isinstance(attacked, And):
                out.append(Move(DEFENCE, attacked.left, n - 1))
            elif isinstance(s, AndRight) and isinstance(attacked, And):
                out.append(Move(DEFENCE, attacked.right, n - 1))
            elif isinstance(s, OrQuery) and isinstance(attacked, Or):
                out.append(Move(DEFENCE, attacked.left, n - 1))
                out.append(Move(DEFENCE, attacked.right, n - 1))
            elif isinstance(s, ForallAt) and isinstance(attacked, Forall):
                from .formula import substitute
                out.append(Move(DEFENCE,
                                substitute(attacked.body, attacked.var, s.term), n - 1))
            elif isinstance(s, ExistsQuery) and isinstance(attacked, Exists):
                from .formula import substitute
                out.append(Move(DEFENCE,
                                substitute(attacked.body, attacked.var, fresh), n - 1))
    deduped: list[Move] = []
    seen = set()
    for m in out:
        k = _move_key(m)
        if k not in seen:
            seen.add(k)
            deduped.append(m)
    return deduped


def validate_strategy(s: Strategy) -> StrategyReport:
    """Game legality of every path plus the five strategy conditions."""

    def walk(node_children: tuple[StrategyNode, ...], g: Game,
             path: tuple[int, ...]) -> StrategyReport | None:
        index = len(g.moves) - 1
        if index % 2 == 0:
            expected = {_move_key(m): m for m in expected_opponent_moves(g)}
            got = {}
            for k, child in enumerate(node_children):
                key = _move_key(child.move)
                if key in got:
                    return StrategyReport(False, "condition-2", path + (k,),
                                          "duplicate child move")
                got[key] = child.move
            if set(got) != set(expected):
                condition = "condition-1"
                label = "children must cover the Opponent's options exactly"
                for key in set(got) - set(expected):
                    move = got[key]
                    if isinstance(move.content, ForallAt):
                        condition, label = "condition-3", \
                            "universal attack must use the first fresh variable"
                    elif (move.polarity == DEFENCE and move.enabler is not None
                          and isinstance(g.moves[move.enabler].content, ExistsQuery)):
                        condition, label = "condition-4", \
                            "existential defence must use the first fresh variable"
                return StrategyReport(False, condition, path, label)
        else:
            if len(node_children) > 1:
                return StrategyReport(False, "condition-2", path,
                                      "the Proponent is deterministic")
            last = g.moves[-1]
            if isinstance(last.content, ExistsQuery) and last.is_attack():
                if not node_children:
                    return StrategyReport(False, "condition-5", path,
                                          "an existential attack must be answered")
                child = node_children[0].move
                if not (child.polarity == DEFENCE and child.enabler == index):
                    return StrategyReport(False, "condition-5", path,
                                          "the Proponent must defend the existential attack")
        for k, child in enumerate(node_children):
            try:
                g2 = extend_game(g, child.move)
            except Exception as e:  # IllegalMove
                return StrategyReport(False, "game", path + (k,), str(e))
            bad = walk(child.children, g2, path + (k,))
            if bad is not None:
                return bad
        return None

    g0 = new_game(s.root_formula)
    bad = walk(s.children, g0, ())
    return bad if bad is not None else StrategyReport(True)


def iter_leaf_games(s: Strategy):
    def walk(children: tuple[StrategyNode, ...], g: Game):
        if not children:
            yield g
            return
        for child in children:
            yield from walk(child.children, extend_game(g, child.move))

    yield from walk(s.children, new_game(s.root_formula))


def is_winning(s: Strategy) -> bool:
    """Every maximal play in the tree is a finite game won by the Proponent."""
    return all(game_winner(g, []) == "P" for g in iter_leaf_games(s))


def find_winning_strategy(f: Formula, limits: SearchLimits | None = None) -> Strategy | None:
    """Search for a winning strategy by proving the formula in the strategic
    sequent calculus and reading the derivation back as a strategy.  None
    means the search bounds were exhausted."""
    from .translate import derivation_to_strategy

    d = prove(Sequent((), (f,)), limits)
    if d is None:
        return None
    s = derivation_to_strategy(d)
    report = validate_strategy(s)
    if not report.ok:
        raise StrategyError(f"derived strategy fails validation: {report}")
    if not is_winning(s):
        raise StrategyError("derived strategy is not winning")
    return s


# ---------------------------------------------------------------------------
# Isomorphism up to variable renaming


def _canonical_tree(s: Strategy):
    rename: dict[str, str] = {}

    def canon_term(t, erase: bool) -> str:
        if isinstance(t, Var):
            if erase:
                return "_"
            if t.name not in rename:
                rename[t.name] = f"={len(rename)}"
            return rename[t.name]
        args = ",".join(canon_term(a, erase) for a in t.args)
        return f"{t.function}({args})"

    def canon_formula(f: Formula, erase: bool) -> str:
        if isinstance(f, Bottom):
            return "#bot"
        if isinstance(f, Atom):
            return f"{f.predicate}({','.join(canon_term(a, erase) for a in f.args)})"
        if isinstance(f, (And, Or, Implies)):
            tag = {And: "&", Or: "|", Implies: ">"}[type(f)]
            return f"({tag}{canon_formula(f.left, erase)}{canon_formula(f.right, erase)})"
        if isinstance(f, (Forall, Exists)):
            tag = "A" if isinstance(f, Forall) else "E"
            if not erase and f.var not in rename:
                rename[f.var] = f"={len(rename)}"
            v = "_" if erase else rename[f.var]
            return f"({tag}{v}.{canon_formula(f.body, erase)})"
        raise StrategyError(f"not a formula: {f!r}")

    def canon_move(m: Move, erase: bool):
        c = m.content
        if isinstance(c, ForallAt):
            content = ("forall", canon_term(c.term, erase))
        elif isinstance(c, FormulaAttack):
            content = ("fa", canon_formula(c.formula, erase))
        elif isinstance(c, (AndLeft, AndRight, OrQuery, ExistsQuery)):
            content = (type(c).__name__,)
        else:
            content = ("f", canon_formula(c, erase))
        return (m.polarity, m.enabler, content)

    def erased(node: StrategyNode):
        return (canon_move(node.move, True),
                tuple(sorted(erased(c) for c in node.children)))

    def walk(node: StrategyNode):
        # Children are visited in a rename-independent order so canonical
        # names do not depend on the stored child order.
        ordered = sorted(node.children, key=erased)
        head = canon_move(node.move, False)
        return (head, tuple(walk(c) for c in ordered))

    top = sorted(s.children, key=erased)
    return (canon_formula(s.root_formula, False), tuple(walk(c) for c in top))


def strategy_isomorphic(s1: Strategy, s2: Strategy) -> bool:
    """Tree isomorphism after canonical renaming of all variables."""
    return _canonical_tree(s1) == _canonical_tree(s2)


# ---------------------------------------------------------------------------
# JSON serialization


def strategy_to_json(s: Strategy) -> dict:
    def node(n: StrategyNode) -> dict:
        return {"move": move_to_json(n.move), "children": [node(c) for c in n.children]}

    return {"formula": render_formula(s.root_formula),
            "children": [node(c) for c in s.children]}


def strategy_from_json(d: dict) -> Strategy:
    def node(x: dict) -> StrategyNode:
        return StrategyNode(move_from_json(x["move"]),
                            tuple(node(c) for c in x.get("children", [])))

    return Strategy(parse_formula(d["formula"]),
                    tuple(node(c) for c in d.get("children", [])))
