"""Two-sided sequent calculus with retained principal formulas, a derivation
checker, the strategic restriction, and bounded goal-directed proof search.

Left rules and the right existential rule keep their principal formula in the
premise, so contraction is built in and naive backward search would loop; the
searcher therefore combines iterative deepening, eager application of
invertible rules, per-branch loop detection on set-normalized sequents, and
per-formula instantiation caps.  The strategic restriction (the antecedent
must be active in the left premise of ImpL, the chosen instance in the
premise of ExR) is threaded through the search as an obligation on the next
rule application instead of being repaired after the fact.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace

from .formula import (
    And, Atom, Bottom, Exists, Forall, Formula, Implies, Or, Term, Var,
    all_names, canonical_key, first_fresh_variable, formula_subterms,
    free_variables, is_atomic, parse_formula, parse_formula_list, parse_term,
    render_formula, render_term, substitute, variable_enumeration,
)


class GkkError(Exception):
    pass


class TimeBudgetExceeded(GkkError):
    pass


RULES = ("Id", "ImpR", "ImpL", "AndR", "AndL1", "AndL2", "OrR", "OrL",
         "ExR", "ExL", "AllR", "AllL")


@dataclass(frozen=True, eq=False)
class Sequent:
    left: tuple[Formula, ...]
    right: tuple[Formula, ...]

    def multiset_key(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (tuple(sorted(canonical_key(f) for f in self.left)),
                tuple(sorted(canonical_key(f) for f in self.right)))

    def set_key(self) -> tuple[frozenset, frozenset]:
        return (frozenset(canonical_key(f) for f in self.left),
                frozenset(canonical_key(f) for f in self.right))

    def __eq__(self, other):
        return isinstance(other, Sequent) and self.multiset_key() == other.multiset_key()

    def __hash__(self):
        return hash(self.multiset_key())

    def __repr__(self):
        return (", ".join(render_formula(f) for f in self.left)
                + " |- " + ", ".join(render_formula(f) for f in self.right))


def parse_sequent(text: str) -> Sequent:
    parts = text.split("|-")
    if len(parts) != 2:
        raise GkkError("a sequent needs exactly one |-")
    return Sequent(tuple(parse_formula_list(parts[0])),
                   tuple(parse_formula_list(parts[1])))


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    side: str  # "L" | "R"
    index: int
    term: Term | None = None
    eigen: str | None = None


@dataclass(frozen=True)
class Derivation:
    conclusion: Sequent
    rule: RuleApplication
    premises: tuple["Derivation", ...]


@dataclass(frozen=True)
class SearchLimits:
    max_depth: int = 40
    max_fresh_vars: int = 3
    max_instantiations_per_formula: int = 3
    time_budget_ms: int = 5000


# ---------------------------------------------------------------------------
# Rule schemas


def _active(s: Sequent, app: RuleApplication) -> Formula:
    side = s.left if app.side == "L" else s.right
    if not (0 <= app.index < len(side)):
        raise GkkError(f"active index {app.index} out of range")
    return side[app.index]


def _without(seq: tuple[Formula, ...], i: int) -> tuple[Formula, ...]:
    return seq[:i] + seq[i + 1:]


def rule_premises(s: Sequent, app: RuleApplication) -> tuple[Sequent, ...]:
    """Premises of applying app to s, new occurrences at index 0 of their side.

    Raises GkkError when the rule does not fit the active occurrence.
    """
    f = _active(s, app)
    rule = app.rule
    if rule == "Id":
        if app.side != "R" or not is_atomic(f):
            raise GkkError("Id needs an atomic active formula on the right")
        if not any(canonical_key(g) == canonical_key(f) for g in s.left):
            raise GkkError("Id needs the atom on the left as well")
        return ()
    if rule == "ImpR":
        if app.side != "R" or not isinstance(f, Implies):
            raise GkkError("ImpR needs an implication on the right")
        return (Sequent((f.left,) + s.left, (f.right,) + _without(s.right, app.index)),)
    if rule == "ImpL":
        if app.side != "L" or not isinstance(f, Implies):
            raise GkkError("ImpL needs an implication on the left")
        return (Sequent(s.left, (f.left,) + s.right),
                Sequent((f.right,) + s.left, s.right))
    if rule == "AndR":
        if app.side != "R" or not isinstance(f, And):
            raise GkkError("AndR needs a conjunction on the right")
        rest = _without(s.right, app.index)
        return (Sequent(s.left, (f.left,) + rest),
                Sequent(s.left, (f.right,) + rest))
    if rule in ("AndL1", "AndL2"):
        if app.side != "L" or not isinstance(f, And):
            raise GkkError("AndL needs a conjunction on the left")
        piece = f.left if rule == "AndL1" else f.right
        return (Sequent((piece,) + s.left, s.right),)
    if rule == "OrR":
        if app.side != "R" or not isinstance(f, Or):
            raise GkkError("OrR needs a disjunction on the right")
        return (Sequent(s.left, (f.left, f.right) + _without(s.right, app.index)),)
    if rule == "OrL":
        if app.side != "L" or not isinstance(f, Or):
            raise GkkError("OrL needs a disjunction on the left")
        return (Sequent((f.left,) + s.left, s.right),
                Sequent((f.right,) + s.left, s.right))
    if rule == "ExR":
        if app.side != "R" or not isinstance(f, Exists) or app.term is None:
            raise GkkError("ExR needs an existential on the right and a term")
        inst = substitute(f.body, f.var, app.term)
        return (Sequent(s.left, (inst,) + s.right),)
    if rule == "ExL":
        if app.side != "L" or not isinstance(f, Exists) or app.eigen is None:
            raise GkkError("ExL needs an existential on the left and an eigenvariable")
        inst = substitute(f.body, f.var, Var(app.eigen))
        return (Sequent((inst,) + s.left, s.right),)
    if rule == "AllR":
        if app.side != "R" or not isinstance(f, Forall) or app.eigen is None:
            raise GkkError("AllR needs a universal on the right and an eigenvariable")
        inst = substitute(f.body, f.var, Var(app.eigen))
        return (Sequent(s.left, (inst,) + _without(s.right, app.index)),)
    if rule == "AllL":
        if app.side != "L" or not isinstance(f, Forall) or app.term is None:
            raise GkkError("AllL needs a universal on the left and a term")
        inst = substitute(f.body, f.var, app.term)
        return (Sequent((inst,) + s.left, s.right),)
    raise GkkError(f"unknown rule {rule!r}")


# ---------------------------------------------------------------------------
# Derivation checking


@dataclass(frozen=True)
class DerivationReport:
    ok: bool
    path: tuple[int, ...] | None = None
    message: str | None = None


def validate_derivation(d: Derivation) -> DerivationReport:
    """Check every node against its rule schema, leaves included."""

    def walk(node: Derivation, path: tuple[int, ...]) -> DerivationReport | None:
        try:
            expected = rule_premises(node.conclusion, node.rule)
        except GkkError as e:
            return DerivationReport(False, path, str(e))
        if node.rule.rule in ("ExL", "AllR"):
            if node.rule.eigen in free_variables_of_sequent(node.conclusion):
                return DerivationReport(
                    False, path,
                    f"eigenvariable {node.rule.eigen} occurs in the conclusion")
        if len(node.premises) != len(expected):
            return DerivationReport(
                False, path,
                f"{node.rule.rule} expects {len(expected)} premises, "
                f"got {len(node.premises)}")
        for i, (premise, want) in enumerate(zip(node.premises, expected)):
            if premise.conclusion != want:
                return DerivationReport(
                    False, path + (i,),
                    f"premise {i} of {node.rule.rule} should be {want!r}, "
                    f"is {premise.conclusion!r}")
            bad = walk(premise, path + (i,))
            if bad is not None:
                return bad
        return None

    bad = walk(d, ())
    return bad if bad is not None else DerivationReport(True)


def free_variables_of_sequent(s: Sequent) -> set[str]:
    out: set[str] = set()
    for f in s.left + s.right:
        out |= free_variables(f)
    return out


@dataclass(frozen=True)
class StrategicCheck:
    ok: bool
    path: tuple[int, ...] | None = None
    reason: str | None = None


def is_strategic(d: Derivation) -> StrategicCheck:
    """The ImpL/ExR activity restriction; assumes validate_derivation passed."""

    def active_formula(node: Derivation) -> Formula:
        return _active(node.conclusion, node.rule)

    def walk(node: Derivation, path: tuple[int, ...]) -> StrategicCheck | None:
        if node.rule.rule == "ImpL":
            antecedent = _active(node.conclusion, node.rule).left  # type: ignore[union-attr]
            left = node.premises[0]
            if left.rule.side != "R" or not _alpha(active_formula(left), antecedent):
                return StrategicCheck(
                    False, path,
                    "the antecedent is not active in the left premise of ImpL")
        if node.rule.rule == "ExR":
            f = _active(node.conclusion, node.rule)
            inst = substitute(f.body, f.var, node.rule.term)  # type: ignore[union-attr]
            premise = node.premises[0]
            if premise.rule.side != "R" or not _alpha(active_formula(premise), inst):
                return StrategicCheck(
                    False, path, "the chosen instance is not active in the premise of ExR")
        for i, premise in enumerate(node.premises):
            bad = walk(premise, path + (i,))
            if bad is not None:
                return bad
        return None

    bad = walk(d, ())
    return bad if bad is not None else StrategicCheck(True)


def _alpha(f: Formula, g: Formula) -> bool:
    return canonical_key(f) == canonical_key(g)


# ---------------------------------------------------------------------------
# Term universe


def term_universe(s: Sequent, fresh_budget: int) -> list[Term]:
    """Subterms occurring in s (bound-variable occurrences excluded),
    deduplicated in appearance order, plus fresh enumeration variables.
    A term-free sequent always gets one fresh witness."""
    out: list[Term] = []
    for f in s.left + s.right:
        formula_subterms(f, set(), out)
    taken: set[str] = set()
    for f in s.left + s.right:
        taken |= all_names(f)
    fresh: list[Term] = []
    for name in variable_enumeration():
        if len(fresh) >= max(fresh_budget, 1 if not out else 0):
            break
        if name not in taken:
            fresh.append(Var(name))
    return out + fresh


# ---------------------------------------------------------------------------
# Bounded strategic proof search


def _fsize(f: Formula) -> int:
    if isinstance(f, (Atom, Bottom)):
        return 1
    if isinstance(f, (And, Or, Implies)):
        return 1 + _fsize(f.left) + _fsize(f.right)
    return 1 + _fsize(f.body)


def _sizes(s: Sequent) -> tuple[int, int]:
    return (sum(_fsize(f) for f in s.left), sum(_fsize(f) for f in s.right))


@dataclass
class _SearchState:
    deadline: float
    limits: SearchLimits
    seed_terms: tuple[Term, ...] = ()
    nodes: int = 0


def _eigen_for(s: Sequent) -> str:
    taken: set[str] = set()
    for f in s.left + s.right:
        taken |= all_names(f)
    return first_fresh_variable(taken)


def _instantiation_terms(s: Sequent, fresh_used: int,
                         st: _SearchState) -> tuple[list[Term], Term | None]:
    subs: list[Term] = []
    for f in s.left + s.right:
        formula_subterms(f, set(), subs)
    for t in st.seed_terms:
        if t not in subs:
            subs.append(t)
    fresh: Term | None = None
    if fresh_used < st.limits.max_fresh_vars or not subs:
        fresh = Var(_eigen_for(s))
    return subs, fresh


def _search(s: Sequent, obligation: int | None, depth: int,
            fresh_used: int, insts: dict, done: frozenset,
            ancestors: frozenset, st: _SearchState) -> Derivation | None:
    st.nodes += 1
    if st.nodes % 16 == 0 and time.monotonic() > st.deadline:
        raise TimeBudgetExceeded(f"{st.limits.time_budget_ms} ms")
    if depth <= 0:
        return None

    if obligation is not None:
        return _discharge_obligation(s, obligation, depth, fresh_used, insts,
                                     done, ancestors, st)

    # Axiom
    left_keys = {canonical_key(f) for f in s.left}
    for i, f in enumerate(s.right):
        if is_atomic(f) and canonical_key(f) in left_keys:
            return Derivation(s, RuleApplication("Id", "R", i), ())

    # Loop check: multiset->set normalized, keyed with per-side sizes and the
    # decomposition marks.  A premise repeating an ancestor's set while any
    # of those changed has made progress (decomposed material or a freshly
    # marked principal) and must not be pruned.
    key = (s.set_key(), _sizes(s), done)
    if key in ancestors:
        return None
    ancestors = ancestors | {key}

    eager = _eager_rule(s, done)
    if eager is not None:
        app, new_done = eager
        return _apply_and_recurse(s, app, None, depth, fresh_used, insts,
                                  new_done, ancestors, st)

    # Choice points: ImpL on left implications, AllL / ExR instantiations.
    cap = st.limits.max_instantiations_per_formula
    for i, f in enumerate(s.left):
        if not isinstance(f, Implies):
            continue
        # In a strategic derivation an atomic antecedent must close by Id
        # immediately, so the attempt is pointless until it is on the left;
        # and a consequent already on the left makes the right premise just
        # repeat the current goal.
        if is_atomic(f.left) and canonical_key(f.left) not in left_keys:
            continue
        if canonical_key(f.right) in left_keys:
            continue
        fkey = ("ImpL", canonical_key(f))
        if insts.get(fkey, 0) >= cap:
            continue
        app = RuleApplication("ImpL", "L", i)
        result = _apply_and_recurse(s, app, 0, depth, fresh_used,
                                    _bump(insts, fkey), done, ancestors, st)
        if result is not None:
            return result
    subs, fresh = _instantiation_terms(s, fresh_used, st)
    for i, f in enumerate(s.right):
        if not isinstance(f, Exists):
            continue
        result = _try_terms(s, RuleApplication("ExR", "R", i), f, subs, fresh,
                            0, depth, fresh_used, insts, done, ancestors, st)
        if result is not None:
            return result
    for i, f in enumerate(s.left):
        if not isinstance(f, Forall):
            continue
        result = _try_terms(s, RuleApplication("AllL", "L", i), f, subs, fresh,
                            None, depth, fresh_used, insts, done, ancestors, st)
        if result is not None:
            return result
    return None


def _bump(insts: dict, key) -> dict:
    out = dict(insts)
    out[key] = out.get(key, 0) + 1
    return out


def _try_terms(s: Sequent, base: RuleApplication, f: Formula,
               subs: list[Term], fresh: Term | None, obligation: int | None,
               depth: int, fresh_used: int, insts: dict, done: frozenset,
               ancestors: frozenset, st: _SearchState) -> Derivation | None:
    cap = st.limits.max_instantiations_per_formula
    fkey = (base.rule, canonical_key(f))
    for t in subs + ([fresh] if fresh is not None else []):
        if insts.get(fkey, 0) >= cap:
            return None
        tkey = (base.rule, canonical_key(f), render_term(t))
        if insts.get(tkey, 0):
            continue
        new_fresh_used = fresh_used + (1 if fresh is not None and t == fresh else 0)
        new_insts = _bump(_bump(insts, fkey), tkey)
        result = _apply_and_recurse(s, replace(base, term=t), obligation, depth,
                                    new_fresh_used, new_insts, done, ancestors, st)
        if result is not None:
            return result
    return None


def _eager_rule(s: Sequent, done: frozenset):
    """First applicable invertible rule, with per-branch marks for the rules
    whose principal formula is retained in the premise."""
    for i, f in enumerate(s.right):
        if isinstance(f, Implies):
            return RuleApplication("ImpR", "R", i), done
        if isinstance(f, Or):
            return RuleApplication("OrR", "R", i), done
        if isinstance(f, Forall):
            return RuleApplication("AllR", "R", i, eigen=_eigen_for(s)), done
    for i, f in enumerate(s.left):
        key = ("done", canonical_key(f))
        if isinstance(f, Exists) and key not in done:
            return (RuleApplication("ExL", "L", i, eigen=_eigen_for(s)),
                    done | {key})
        if isinstance(f, And) and key not in done:
            return RuleApplication("AndL1", "L", i), done | {key}
        if isinstance(f, Or) and key not in done:
            return RuleApplication("OrL", "L", i), done | {key}
    for i, f in enumerate(s.right):
        if isinstance(f, And):
            return RuleApplication("AndR", "R", i), done
    return None


def _apply_and_recurse(s: Sequent, app: RuleApplication, first_obligation: int | None,
                       depth: int, fresh_used: int, insts: dict, done: frozenset,
                       ancestors: frozenset, st: _SearchState) -> Derivation | None:
    premises = rule_premises(s, app)
    if app.rule == "AndL1":
        # Decompose the conjunction fully: AndL1 stacked over AndL2.  The
        # retained principal sits one slot further right in the premise.
        inner_seq = premises[0]
        inner_app = RuleApplication("AndL2", "L", app.index + 1)
        inner_premises = rule_premises(inner_seq, inner_app)
        sub = _search(inner_premises[0], None, depth - 2, fresh_used, insts,
                      done, ancestors, st)
        if sub is None:
            return None
        inner = Derivation(inner_seq, inner_app, (sub,))
        return Derivation(s, app, (inner,))
    built: list[Derivation] = []
    for k, premise in enumerate(premises):
        obligation = first_obligation if k == 0 else None
        sub = _search(premise, obligation, depth - 1, fresh_used, insts, done,
                      ancestors, st)
        if sub is None:
            return None
        built.append(sub)
    return Derivation(s, app, tuple(built))


def _discharge_obligation(s: Sequent, index: int, depth: int, fresh_used: int,
                          insts: dict, done: frozenset, ancestors: frozenset,
                          st: _SearchState) -> Derivation | None:
    f = s.right[index]
    if is_atomic(f):
        if any(canonical_key(g) == canonical_key(f) for g in s.left):
            return Derivation(s, RuleApplication("Id", "R", index), ())
        return None
    if isinstance(f, Implies):
        return _apply_and_recurse(s, RuleApplication("ImpR", "R", index), None,
                                  depth, fresh_used, insts, done, ancestors, st)
    if isinstance(f, Or):
        return _apply_and_recurse(s, RuleApplication("OrR", "R", index), None,
                                  depth, fresh_used, insts, done, ancestors, st)
    if isinstance(f, And):
        return _apply_and_recurse(s, RuleApplication("AndR", "R", index), None,
                                  depth, fresh_used, insts, done, ancestors, st)
    if isinstance(f, Forall):
        app = RuleApplication("AllR", "R", index, eigen=_eigen_for(s))
        return _apply_and_recurse(s, app, None, depth, fresh_used, insts, done,
                                  ancestors, st)
    if isinstance(f, Exists):
        subs, fresh = _instantiation_terms(s, fresh_used, st)
        return _try_terms(s, RuleApplication("ExR", "R", index), f, subs, fresh,
                          0, depth, fresh_used, insts, done, ancestors, st)
    return None


def prove(s: Sequent, limits: SearchLimits | None = None,
          seed_terms: list[Term] | None = None) -> Derivation | None:
    """Bounded search for a strategic derivation of s.

    None means the bounds were exhausted, not that s is invalid.  Raises
    TimeBudgetExceeded when the wall clock runs out.  seed_terms extend the
    instantiation universe at the root (used when re-searching a derivation
    whose term choices are worth keeping).
    """
    limits = limits or SearchLimits()
    st = _SearchState(deadline=time.monotonic() + limits.time_budget_ms / 1000.0,
                      limits=limits, seed_terms=tuple(seed_terms or ()))
    depths = sorted({d for d in range(6, limits.max_depth, 6)} | {limits.max_depth})
    for depth in depths:
        result = _search(s, None, depth, 0, {}, frozenset(), frozenset(), st)
        if result is not None:
            report = validate_derivation(result)
            if not report.ok:
                raise GkkError(f"search produced an invalid derivation: {report}")
            strategic = is_strategic(result)
            if not strategic.ok:
                raise GkkError(f"search produced a non-strategic derivation: {strategic}")
            return result
    return None


# ---------------------------------------------------------------------------
# JSON serialization


def sequent_to_json(s: Sequent) -> dict:
    return {"left": [render_formula(f) for f in s.left],
            "right": [render_formula(f) for f in s.right]}


def sequent_from_json(d: dict) -> Sequent:
    return Sequent(tuple(parse_formula(f) for f in d["left"]),
                   tuple(parse_formula(f) for f in d["right"]))


def derivation_to_json(d: Derivation) -> dict:
    out = {"sequent": sequent_to_json(d.conclusion),
           "rule": d.rule.rule,
           "active": {"side": d.rule.side, "index": d.rule.index}}
    if d.rule.term is not None:
        out["term"] = render_term(d.rule.term)
    if d.rule.eigen is not None:
        out["eigen"] = d.rule.eigen
    out["premises"] = [derivation_to_json(p) for p in d.premises]
    return out


def derivation_from_json(d: dict) -> Derivation:
    app = RuleApplication(
        d["rule"], d["active"]["side"], d["active"]["index"],
        parse_term(d["term"]) if "term" in d and d["term"] is not None else None,
        d.get("eigen"))
    return Derivation(sequent_from_json(d["sequent"]), app,
                      tuple(derivation_from_json(p) for p in d.get("premises", [])))
