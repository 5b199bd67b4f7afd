"""Translation between winning strategies and strategic derivations.

Strategy -> derivation: project a strategy onto its Opponent moves, label
each projection node with a sequent (Opponent assertions on the left, the
Proponent's standing commitments on the right), and read the Proponent's
responses as rule applications.  Derivation -> strategy: walk a strategic
derivation from the conclusion upward, emitting a Proponent move per rule and
fanning out the Opponent's responses over the premises.

Proponent commitments are tracked as slots: a slot remembers which Opponent
attack it answers, which Proponent move asserted it, and, for retained
existentials, the existential attack that later defences (existential
repetitions) keep answering.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .dialogue import (
    ATTACK, DEFENCE, AndLeft, AndRight, ExistsQuery, ForallAt, FormulaAttack,
    Game, Move, OrQuery, extend_game, match_instance, new_game, _VACUOUS,
)
from .formula import (
    And, App, Atom, Bottom, Exists, Forall, Formula, Implies, Or, Term, Var,
    alpha_eq, canonical_key, free_variables, is_atomic, render_formula,
    substitute, term_variables,
)
from .gkk import (
    Derivation, RuleApplication, SearchLimits, Sequent, is_strategic, prove,
    rule_premises, validate_derivation,
)
from .strategy import Strategy, StrategyNode, is_winning, validate_strategy


class TranslateError(Exception):
    pass


class NotWinning(TranslateError):
    pass


class NotStrategic(TranslateError):
    pass


class NotSingleConclusion(TranslateError):
    pass


class StrategizationFailed(TranslateError):
    pass


# ---------------------------------------------------------------------------
# Projection onto Opponent moves, with sequent labels


@dataclass(frozen=True)
class _Slot:
    formula: Formula
    demander: int | None  # Opponent attack this content answers
    owner: int | None = None  # Proponent move that asserted it
    exists_attack: int | None = None  # (?,exists) move attacking this slot


@dataclass
class ProjectionNode:
    sequent: Sequent
    o_move: Move | None
    o_index: int | None
    chosen_variable: str | None
    p_move: Move
    p_index: int
    children: list["ProjectionNode"]
    strategy_path: tuple[int, ...]
    _gamma: tuple[tuple[Formula, int], ...] = ()
    _delta: tuple[_Slot, ...] = ()


def _sequent_of(gamma, delta) -> Sequent:
    return Sequent(tuple(f for f, _ in gamma), tuple(s.formula for s in delta))


def _witness_variable(move: Move, attacked: Formula) -> str | None:
    """The variable chosen by an Opponent existential defence, if it is one."""
    if not isinstance(attacked, Exists):
        return None
    t = match_instance(attacked.body, attacked.var, move.content)
    if isinstance(t, Var):
        return t.name
    return None


def _apply_o_move(gamma, delta, game: Game, o: Move, o_idx: int,
                  forced_defence: Formula | None):
    """Sequent-label transition for one Opponent move."""
    chosen: str | None = None
    e = o.enabler
    if o.polarity == DEFENCE:
        gamma = gamma + ((o.content, o_idx),)
        attack = game.moves[e]
        if isinstance(attack.content, ExistsQuery):
            chosen = _witness_variable(o, game.moves[attack.enabler].asserted())
        return gamma, delta, chosen
    owner_slot = next((i for i, s in enumerate(delta) if s.owner == e), None)
    attacked = game.moves[e].asserted()
    s = o.content
    if isinstance(s, FormulaAttack):
        gamma = gamma + ((s.formula, o_idx),)
        rest = tuple(x for i, x in enumerate(delta) if i != owner_slot)
        return gamma, rest + (_Slot(attacked.right, o_idx),), chosen
    if isinstance(s, (AndLeft, AndRight)):
        piece = attacked.left if isinstance(s, AndLeft) else attacked.right
        rest = tuple(x for i, x in enumerate(delta) if i != owner_slot)
        return gamma, rest + (_Slot(piece, o_idx),), chosen
    if isinstance(s, OrQuery):
        rest = tuple(x for i, x in enumerate(delta) if i != owner_slot)
        return gamma, rest + (_Slot(attacked.left, o_idx), _Slot(attacked.right, o_idx)), chosen
    if isinstance(s, ForallAt):
        inst = substitute(attacked.body, attacked.var, s.term)
        rest = tuple(x for i, x in enumerate(delta) if i != owner_slot)
        if isinstance(s.term, Var):
            chosen = s.term.name
        return gamma, rest + (_Slot(inst, o_idx),), chosen
    if isinstance(s, ExistsQuery):
        if forced_defence is None:
            raise NotWinning("an existential attack has no Proponent defence")
        if owner_slot is not None:
            delta = tuple(replace(x, exists_attack=o_idx) if i == owner_slot else x
                          for i, x in enumerate(delta))
        else:
            # The existential was asserted as attack content; keep it on the
            # right so later repetitions find their retained principal.
            delta = delta + (_Slot(attacked, None, owner=e, exists_attack=o_idx),)
        return gamma, delta + (_Slot(forced_defence, o_idx),), chosen
    raise TranslateError(f"unclassifiable Opponent move {o!r}")


def _mark_owner(delta, p: Move, p_idx: int):
    if p.polarity != DEFENCE:
        return delta
    for i, s in enumerate(delta):
        if (s.owner is None and s.demander == p.enabler
                and alpha_eq(s.formula, p.content)):
            return tuple(replace(x, owner=p_idx) if j == i else x
                         for j, x in enumerate(delta))
    return delta  # existential repetition: no pending slot to take over


def label_sequents(s: Strategy) -> ProjectionNode:
    """Project onto Opponent moves and label every node with a sequent.

    Requires a validated winning strategy.
    """
    report = validate_strategy(s)
    if not report.ok:
        raise NotWinning(f"not a valid strategy: {report}")
    if not is_winning(s):
        raise NotWinning("strategy has a lost or unfinished play")

    def children_of(o_children: tuple[StrategyNode, ...], game: Game,
                    gamma, delta, path) -> list[ProjectionNode]:
        out = []
        for k, onode in enumerate(o_children):
            o_idx = len(game.moves)
            if not onode.children:
                raise NotWinning("Opponent move with no Proponent answer")
            pnode = onode.children[0]
            forced = None
            if isinstance(onode.move.content, ExistsQuery) and onode.move.is_attack():
                forced = pnode.move.content
            gamma2, delta2, chosen = _apply_o_move(gamma, delta, game,
                                                   onode.move, o_idx, forced)
            g2 = extend_game(game, onode.move)
            delta3 = _mark_owner(delta2, pnode.move, o_idx + 1)
            g3 = extend_game(g2, pnode.move)
            node = ProjectionNode(
                sequent=_sequent_of(gamma2, delta3),
                o_move=onode.move, o_index=o_idx, chosen_variable=chosen,
                p_move=pnode.move, p_index=o_idx + 1,
                children=[], strategy_path=path + (k,),
                _gamma=gamma2, _delta=delta3)
            node.children = children_of(pnode.children, g3, gamma2, delta3,
                                        path + (k,))
            out.append(node)
        return out

    root_slot = _Slot(s.root_formula, None, owner=0)
    game0 = new_game(s.root_formula)
    root = ProjectionNode(
        sequent=Sequent((), (s.root_formula,)),
        o_move=None, o_index=None, chosen_variable=None,
        p_move=game0.moves[0], p_index=0,
        children=[], strategy_path=(),
        _gamma=(), _delta=(root_slot,))
    root.children = children_of(s.children, game0, (), (root_slot,), ())
    return root


def fresh_variable_violations(root: ProjectionNode) -> list[tuple[tuple[int, ...], str]]:
    """Nodes whose chosen variable is free in the parent's sequent."""
    bad: list[tuple[tuple[int, ...], str]] = []

    def walk(node: ProjectionNode):
        parent_free = set()
        for f in node.sequent.left + node.sequent.right:
            parent_free |= free_variables(f)
        for child in node.children:
            if child.chosen_variable is not None and child.chosen_variable in parent_free:
                bad.append((child.strategy_path, child.chosen_variable))
            walk(child)

    walk(root)
    return bad


# ---------------------------------------------------------------------------
# Strategy -> derivation


def strategy_to_derivation(s: Strategy) -> Derivation:
    root = label_sequents(s)
    return _derive(root)


def _slot_index(node: ProjectionNode, predicate) -> int | None:
    for i, slot in enumerate(node._delta):
        if predicate(slot):
            return i
    return None


def _gamma_index(node: ProjectionNode, asserting: int) -> int:
    for i, (_, idx) in enumerate(node._gamma):
        if idx == asserting:
            return i
    raise TranslateError(f"no hypothesis asserted by move {asserting}")


def _child_by_move(node: ProjectionNode, want) -> ProjectionNode:
    for child in node.children:
        if want(child.o_move):
            return child
    raise TranslateError("expected Opponent response is missing")


def _derive(node: ProjectionNode) -> Derivation:
    p = node.p_move
    seq = node.sequent
    if p.polarity == DEFENCE:
        i = _slot_index(node, lambda s: s.owner == node.p_index)
        if i is not None:
            return _decompose(node, seq, i, node._delta[i].formula, node.children)
        # Existential repetition: another defence against a recorded attack.
        i = _slot_index(node, lambda s: s.exists_attack == p.enabler)
        if i is None:
            raise TranslateError("defence matches no commitment slot")
        existential = node._delta[i].formula
        inst = p.content
        t = _witness_term(existential, inst)
        premise_seq = Sequent(seq.left, (inst,) + seq.right)
        inner = _decompose(node, premise_seq, 0, inst, node.children)
        return Derivation(seq, RuleApplication("ExR", "R", i, term=t), (inner,))
    # Proponent attacks: left rules.
    content = p.content
    j = _gamma_index(node, p.enabler)
    attacked = node._gamma[j][0]
    if isinstance(content, (AndLeft, AndRight)):
        rule = "AndL1" if isinstance(content, AndLeft) else "AndL2"
        (child,) = node.children
        return Derivation(seq, RuleApplication(rule, "L", j), (_derive(child),))
    if isinstance(content, OrQuery):
        if alpha_eq(attacked.left, attacked.right):
            # Equal disjuncts collapse to one Opponent defence; reuse it.
            (child,) = node.children
            sub = _derive(child)
            return Derivation(seq, RuleApplication("OrL", "L", j), (sub, sub))
        left_child = _child_by_move(
            node, lambda m: m.polarity == DEFENCE and alpha_eq(m.content, attacked.left))
        right_child = _child_by_move(
            node, lambda m: m.polarity == DEFENCE and alpha_eq(m.content, attacked.right))
        return Derivation(seq, RuleApplication("OrL", "L", j),
                          (_derive(left_child), _derive(right_child)))
    if isinstance(content, ForallAt):
        (child,) = node.children
        return Derivation(seq, RuleApplication("AllL", "L", j, term=content.term),
                          (_derive(child),))
    if isinstance(content, ExistsQuery):
        (child,) = node.children
        w = child.chosen_variable
        if w is None:
            raise TranslateError("existential defence did not choose a variable")
        return Derivation(seq, RuleApplication("ExL", "L", j, eigen=w),
                          (_derive(child),))
    if isinstance(content, FormulaAttack):
        antecedent = content.formula
        defence = _child_by_move(node, lambda m: m.polarity == DEFENCE)
        attackers = [c for c in node.children if c is not defence]
        left_seq = Sequent(seq.left, (antecedent,) + seq.right)
        left = _decompose(node, left_seq, 0, antecedent, attackers)
        return Derivation(seq, RuleApplication("ImpL", "L", j),
                          (left, _derive(defence)))
    raise TranslateError(f"unclassifiable Proponent move {p!r}")


def _decompose(node: ProjectionNode, seq: Sequent, index: int, g: Formula,
               children) -> Derivation:
    """Derive seq by the right rule acting on its occurrence `index` (= g),
    taking premises from the projection children that attack g."""
    if is_atomic(g):
        if children:
            raise TranslateError("an atomic assertion admits no attacks")
        return Derivation(seq, RuleApplication("Id", "R", index), ())
    if isinstance(g, Implies):
        (child,) = children
        return Derivation(seq, RuleApplication("ImpR", "R", index),
                          (_derive(child),))
    if isinstance(g, And):
        first = next(c for c in children if isinstance(c.o_move.content, AndLeft))
        second = next(c for c in children if isinstance(c.o_move.content, AndRight))
        return Derivation(seq, RuleApplication("AndR", "R", index),
                          (_derive(first), _derive(second)))
    if isinstance(g, Or):
        (child,) = children
        return Derivation(seq, RuleApplication("OrR", "R", index),
                          (_derive(child),))
    if isinstance(g, Forall):
        (child,) = children
        term = child.o_move.content.term
        if not isinstance(term, Var):
            raise TranslateError("universal attack must choose a variable")
        return Derivation(seq, RuleApplication("AllR", "R", index, eigen=term.name),
                          (_derive(child),))
    if isinstance(g, Exists):
        (child,) = children
        inst = child.p_move.content
        t = _witness_term(g, inst)
        return Derivation(seq, RuleApplication("ExR", "R", index, term=t),
                          (_derive(child),))
    raise TranslateError(f"cannot decompose {render_formula(g)}")


def _witness_term(existential: Formula, inst: Formula) -> Term:
    t = match_instance(existential.body, existential.var, inst)
    if t is None:
        raise TranslateError(
            f"{render_formula(inst)} is not an instance of "
            f"{render_formula(existential)}")
    if t is _VACUOUS:
        return Var(existential.var)
    return t


# ---------------------------------------------------------------------------
# Derivation -> strategy


@dataclass(frozen=True)
class _RInfo:
    demander: int | None = None
    asserted_by: int | None = None
    exists_attack: int | None = None


def _node_active(node: Derivation) -> Formula:
    side = node.conclusion.left if node.rule.side == "L" else node.conclusion.right
    return side[node.rule.index]


def _canonical_rebuild(node: Derivation, conclusion: Sequent) -> Derivation:
    """Rebuild with rule_premises' occurrence conventions (new formulas at
    index 0), remapping active indices by formula identity."""
    f = _node_active(node)
    side = conclusion.left if node.rule.side == "L" else conclusion.right
    key = canonical_key(f)
    idx = min(i for i, g in enumerate(side) if canonical_key(g) == key)
    app = replace(node.rule, index=idx)
    prems = rule_premises(conclusion, app)
    return Derivation(conclusion, app,
                      tuple(_canonical_rebuild(p, ps)
                            for p, ps in zip(node.premises, prems)))


def _rename_free(f: Formula, mapping: dict[str, str]) -> Formula:
    def term(t: Term, bound: frozenset) -> Term:
        if isinstance(t, Var):
            if t.name in mapping and t.name not in bound:
                return Var(mapping[t.name])
            return t
        return App(t.function, tuple(term(a, bound) for a in t.args))

    def walk(g: Formula, bound: frozenset) -> Formula:
        if isinstance(g, Bottom):
            return g
        if isinstance(g, Atom):
            return Atom(g.predicate, tuple(term(a, bound) for a in g.args))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(walk(g.left, bound), walk(g.right, bound))
        if isinstance(g, (Forall, Exists)):
            return type(g)(g.var, walk(g.body, bound | {g.var}))
        raise TranslateError(f"not a formula: {g!r}")

    return walk(f, frozenset())


class _Emitter:
    """Derivation-side names -> game-side names, assigned on demand so the
    machine's fresh choices never collide with what the game already shows."""

    def __init__(self, identity: set[str]):
        self.identity = identity

    def assign(self, names, game: Game, rename: dict[str, str]) -> None:
        from .dialogue import game_variables
        for n in sorted(names):
            if n in rename:
                continue
            if n in self.identity:
                rename[n] = n
                continue
            taken = game_variables(game) | set(rename.values())
            from .formula import first_fresh_variable
            rename[n] = first_fresh_variable(taken)

    def formula(self, f: Formula, game: Game, rename: dict[str, str]) -> Formula:
        self.assign(free_variables(f), game, rename)
        return _rename_free(f, rename)

    def term(self, t: Term, game: Game, rename: dict[str, str]) -> Term:
        self.assign(term_variables(t), game, rename)
        if isinstance(t, Var):
            return Var(rename.get(t.name, t.name))
        return App(t.function, tuple(self.term(a, game, rename) for a in t.args))


def _fresh_for(game: Game, rename: dict[str, str]) -> str:
    from .dialogue import game_variables
    from .formula import first_fresh_variable
    return first_fresh_variable(game_variables(game) | set(rename.values()))


def derivation_to_strategy(d: Derivation) -> Strategy:
    """Read a strategic derivation of a single-succedent sequent back as a
    winning strategy for that formula."""
    report = validate_derivation(d)
    if not report.ok:
        raise TranslateError(f"invalid derivation: {report.message} at {report.path}")
    if d.conclusion.left or len(d.conclusion.right) != 1:
        raise NotSingleConclusion(repr(d.conclusion))
    strategic = is_strategic(d)
    if not strategic.ok:
        raise NotStrategic(f"{strategic.reason} at {strategic.path}")
    root_formula = d.conclusion.right[0]
    cd = _canonical_rebuild(d, d.conclusion)
    emitter = _Emitter(free_variables(root_formula))
    game = new_game(root_formula)
    rinfo = (_RInfo(demander=None, asserted_by=0),)
    children = _o_responses(cd, (), rinfo, game, {}, emitter)
    return Strategy(root_formula, children)


def _o_responses(dnode: Derivation, linfo: tuple, rinfo: tuple, game: Game,
                 rename: dict[str, str], em: _Emitter) -> tuple[StrategyNode, ...]:
    """Opponent responses to the already-asserted active formula of dnode,
    each packaged with its Proponent continuation."""
    rule = dnode.rule
    if rule.side != "R":
        raise NotStrategic("a left rule acts where a right rule is forced")
    i = rule.index
    g_formula = dnode.conclusion.right[i]
    ab = rinfo[i].asserted_by
    if ab is None:
        raise TranslateError("active formula was never asserted")
    o_idx = len(game.moves)
    if rule.rule == "Id":
        return ()
    if rule.rule == "ImpR":
        o = Move(ATTACK, FormulaAttack(em.formula(g_formula.left, game, rename)), ab)
        g2 = extend_game(game, o)
        linfo2 = (o_idx,) + linfo
        rinfo2 = (_RInfo(demander=o_idx),) + _drop(rinfo, i)
        return (StrategyNode(o, (_build_p(dnode.premises[0], linfo2, rinfo2,
                                          g2, dict(rename), em),)),)
    if rule.rule == "AndR":
        out = []
        for k, symbol in ((0, AndLeft()), (1, AndRight())):
            o = Move(ATTACK, symbol, ab)
            g2 = extend_game(game, o)
            rinfo2 = (_RInfo(demander=o_idx),) + _drop(rinfo, i)
            out.append(StrategyNode(o, (_build_p(dnode.premises[k], linfo, rinfo2,
                                                 g2, dict(rename), em),)))
        return tuple(out)
    if rule.rule == "OrR":
        o = Move(ATTACK, OrQuery(), ab)
        g2 = extend_game(game, o)
        rinfo2 = (_RInfo(demander=o_idx), _RInfo(demander=o_idx)) + _drop(rinfo, i)
        return (StrategyNode(o, (_build_p(dnode.premises[0], linfo, rinfo2,
                                          g2, dict(rename), em),)),)
    if rule.rule == "AllR":
        w = _fresh_for(game, rename)
        rename2 = dict(rename)
        rename2[rule.eigen] = w
        o = Move(ATTACK, ForallAt(Var(w)), ab)
        g2 = extend_game(game, o)
        rinfo2 = (_RInfo(demander=o_idx),) + _drop(rinfo, i)
        return (StrategyNode(o, (_build_p(dnode.premises[0], linfo, rinfo2,
                                          g2, rename2, em),)),)
    if rule.rule == "ExR":
        o = Move(ATTACK, ExistsQuery(), ab)
        g2 = extend_game(game, o)
        inst = dnode.premises[0].conclusion.right[0]
        rename2 = dict(rename)
        p2 = Move(DEFENCE, em.formula(inst, g2, rename2), o_idx)
        g3 = extend_game(g2, p2)
        marked = tuple(replace(x, exists_attack=o_idx) if j == i else x
                       for j, x in enumerate(rinfo))
        rinfo2 = (_RInfo(demander=o_idx, asserted_by=o_idx + 1),) + marked
        grand = _o_responses(dnode.premises[0], linfo, rinfo2, g3, rename2, em)
        return (StrategyNode(o, (StrategyNode(p2, grand),)),)
    raise NotStrategic(f"unexpected rule {rule.rule} on an asserted formula")


def _drop(t: tuple, i: int) -> tuple:
    return t[:i] + t[i + 1:]


def _build_p(dnode: Derivation, linfo: tuple, rinfo: tuple, game: Game,
             rename: dict[str, str], em: _Emitter) -> StrategyNode:
    """The Proponent's move dictated by dnode's rule, with its subtree."""
    rule = dnode.rule
    p_idx = len(game.moves)
    if rule.side == "R":
        i = rule.index
        info = rinfo[i]
        g_formula = dnode.conclusion.right[i]
        if rule.rule == "ExR" and info.exists_attack is not None:
            inst = dnode.premises[0].conclusion.right[0]
            p = Move(DEFENCE, em.formula(inst, game, rename), info.exists_attack)
            g2 = extend_game(game, p)
            rinfo2 = (_RInfo(demander=info.exists_attack, asserted_by=p_idx),) + rinfo
            return StrategyNode(p, _o_responses(dnode.premises[0], linfo, rinfo2,
                                                g2, dict(rename), em))
        p = Move(DEFENCE, em.formula(g_formula, game, rename), info.demander)
        g2 = extend_game(game, p)
        rinfo2 = tuple(replace(x, asserted_by=p_idx) if j == i else x
                       for j, x in enumerate(rinfo))
        return StrategyNode(p, _o_responses(dnode, linfo, rinfo2, g2, rename, em))
    # Left rules: Proponent attacks the Opponent assertion at rule.index.
    j = rule.index
    jm = linfo[j]
    attacked = dnode.conclusion.left[j]
    if rule.rule in ("AndL1", "AndL2"):
        symbol = AndLeft() if rule.rule == "AndL1" else AndRight()
        piece = attacked.left if rule.rule == "AndL1" else attacked.right
        p = Move(ATTACK, symbol, jm)
        g2 = extend_game(game, p)
        o = Move(DEFENCE, em.formula(piece, g2, rename), p_idx)
        g3 = extend_game(g2, o)
        inner = _build_p(dnode.premises[0], (p_idx + 1,) + linfo, rinfo, g3,
                         dict(rename), em)
        return StrategyNode(p, (StrategyNode(o, (inner,)),))
    if rule.rule == "OrL":
        p = Move(ATTACK, OrQuery(), jm)
        g2 = extend_game(game, p)
        pieces = [(attacked.left, dnode.premises[0]), (attacked.right, dnode.premises[1])]
        if alpha_eq(attacked.left, attacked.right):
            pieces = pieces[:1]
        children = []
        for piece, premise in pieces:
            rename2 = dict(rename)
            o = Move(DEFENCE, em.formula(piece, g2, rename2), p_idx)
            g3 = extend_game(g2, o)
            inner = _build_p(premise, (p_idx + 1,) + linfo, rinfo, g3, rename2, em)
            children.append(StrategyNode(o, (inner,)))
        return StrategyNode(p, tuple(children))
    if rule.rule == "AllL":
        p = Move(ATTACK, ForallAt(em.term(rule.term, game, rename)), jm)
        g2 = extend_game(game, p)
        inst = dnode.premises[0].conclusion.left[0]
        o = Move(DEFENCE, em.formula(inst, g2, rename), p_idx)
        g3 = extend_game(g2, o)
        inner = _build_p(dnode.premises[0], (p_idx + 1,) + linfo, rinfo, g3,
                         dict(rename), em)
        return StrategyNode(p, (StrategyNode(o, (inner,)),))
    if rule.rule == "ExL":
        p = Move(ATTACK, ExistsQuery(), jm)
        g2 = extend_game(game, p)
        w = _fresh_for(g2, rename)
        rename2 = dict(rename)
        rename2[rule.eigen] = w
        inst = dnode.premises[0].conclusion.left[0]
        o = Move(DEFENCE, em.formula(inst, g2, rename2), p_idx)
        g3 = extend_game(g2, o)
        inner = _build_p(dnode.premises[0], (p_idx + 1,) + linfo, rinfo, g3,
                         rename2, em)
        return StrategyNode(p, (StrategyNode(o, (inner,)),))
    if rule.rule == "ImpL":
        p = Move(ATTACK, FormulaAttack(em.formula(attacked.left, game, rename)), jm)
        g2 = extend_game(game, p)
        left_rinfo = (_RInfo(asserted_by=p_idx),) + rinfo
        attackers = _o_responses(dnode.premises[0], linfo, left_rinfo, g2,
                                 dict(rename), em)
        rename2 = dict(rename)
        o_def = Move(DEFENCE, em.formula(attacked.right, g2, rename2), p_idx)
        g3 = extend_game(g2, o_def)
        inner = _build_p(dnode.premises[1], (p_idx + 1,) + linfo, rinfo, g3,
                         rename2, em)
        return StrategyNode(p, attackers + (StrategyNode(o_def, (inner,)),))
    raise TranslateError(f"unexpected rule {rule.rule}")


# ---------------------------------------------------------------------------
# Strategization of arbitrary derivations


def _harvest_terms(d: Derivation) -> list[Term]:
    allowed: set[str] = set()
    for f in d.conclusion.left + d.conclusion.right:
        allowed |= free_variables(f)
    out: list[Term] = []

    def walk(node: Derivation):
        t = node.rule.term
        if t is not None and term_variables(t) <= allowed and t not in out:
            out.append(t)
        for p in node.premises:
            walk(p)

    walk(d)
    return out


def _permute_exr_pass(d: Derivation) -> Derivation | None:
    """One bottom-up pass moving offending ExR applications above an AllR
    premise; returns None when nothing moved."""
    changed = False

    def locally_strategic(node: Derivation) -> bool:
        f = _node_active(node)
        inst = substitute(f.body, f.var, node.rule.term)
        premise = node.premises[0]
        return (premise.rule.side == "R"
                and alpha_eq(_node_active(premise), inst))

    def walk(node: Derivation) -> Derivation:
        nonlocal changed
        node = Derivation(node.conclusion, node.rule,
                          tuple(walk(p) for p in node.premises))
        if node.rule.rule != "ExR" or locally_strategic(node):
            return node
        premise = node.premises[0]
        if premise.rule.rule != "AllR":
            return node
        conclusion = node.conclusion
        all_formula = _node_active(premise)
        key = canonical_key(all_formula)
        k = next((i for i, g in enumerate(conclusion.right)
                  if canonical_key(g) == key), None)
        if k is None:
            return node
        app_all = RuleApplication("AllR", "R", k, eigen=premise.rule.eigen)
        mid = rule_premises(conclusion, app_all)[0]
        ex_key = canonical_key(_node_active(node))
        k2 = next(i for i, g in enumerate(mid.right)
                  if canonical_key(g) == ex_key)
        app_ex = replace(node.rule, index=k2)
        changed = True
        return Derivation(conclusion, app_all,
                          (Derivation(mid, app_ex, (premise.premises[0],)),))

    out = walk(d)
    return out if changed else None


def strategize(d: Derivation, limits: SearchLimits | None = None) -> Derivation:
    """A strategic derivation of the same sequent: local ExR/AllR permutation
    when it suffices, else a fresh search seeded with the derivation's own
    instantiation terms."""
    report = validate_derivation(d)
    if not report.ok:
        raise TranslateError(f"invalid derivation: {report.message}")
    if is_strategic(d).ok:
        return d
    current = d
    for _ in range(64):
        permuted = _permute_exr_pass(current)
        if permuted is None:
            break
        current = permuted
        if validate_derivation(current).ok and is_strategic(current).ok:
            return current
    result = prove(d.conclusion, limits, seed_terms=_harvest_terms(d))
    if result is None:
        raise StrategizationFailed("search bounds exhausted while re-deriving")
    return result
