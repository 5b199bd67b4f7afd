"""First-order syntax: terms, formulas, parsing, printing, substitution, polarity.

Negation is sugar: ``~F`` denotes ``F -> _|_`` where ``_|_`` (alias ``false``)
is a distinguished 0-ary atom with no special proof rules.  The parser maps a
bare identifier in term position to a variable; 0-ary function applications
must be written with explicit parentheses (``c()``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
BOTTOM_NAME = "_|_"
KEYWORDS = ("forall", "exists", "false")


class FormulaError(Exception):
    pass


class ParseError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ArityError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Syntax trees


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    function: str
    args: tuple["Term", ...] = ()


Term = Union[Var, App]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Bottom, And, Or, Implies, Forall, Exists]

BOTTOM = Bottom()


def neg(f: Formula) -> Formula:
    return Implies(f, BOTTOM)


def is_atomic(f: Formula) -> bool:
    return isinstance(f, (Atom, Bottom))


def is_negation(f: Formula) -> bool:
    return isinstance(f, Implies) and isinstance(f.right, Bottom)


def atom_key(f: Formula) -> str:
    """Predicate symbol of an atomic formula; Bottom maps to ``_|_``."""
    if isinstance(f, Bottom):
        return BOTTOM_NAME
    if isinstance(f, Atom):
        return f.predicate
    raise FormulaError(f"not an atomic formula: {f}")


# ---------------------------------------------------------------------------
# Tokenizer


_TOKEN_SPECS = (
    ("BOT", re.compile(r"_\|_")),
    ("ARROW", re.compile(r"->")),
    ("TURNSTILE", re.compile(r"\|-")),
    ("AMP", re.compile(r"&")),
    ("PIPE", re.compile(r"\|")),
    ("TILDE", re.compile(r"~")),
    ("LPAR", re.compile(r"\(")),
    ("RPAR", re.compile(r"\)")),
    ("DOT", re.compile(r"\.")),
    ("COMMA", re.compile(r",")),
    ("IDENT", IDENT_RE),
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        for kind, rx in _TOKEN_SPECS:
            m = rx.match(text, pos)
            if m:
                value = m.group(0)
                if kind == "IDENT" and value in KEYWORDS:
                    kind = value.upper()
                tokens.append((kind, value, pos))
                pos = m.end()
                break
        else:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expected: str | None = None) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        if expected is not None and tok[0] != expected:
            raise ParseError(f"expected {expected}, found {tok[1]!r}", tok[2])
        self.pos += 1
        return tok

    def at(self, kind: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == kind

    def formula(self) -> Formula:
        return self.impl()

    def impl(self) -> Formula:
        left = self.disj()
        if self.at("ARROW"):
            self.next()
            return Implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.at("PIPE"):
            self.next()
            parts.append(self.conj())
        f = parts[-1]
        for g in reversed(parts[:-1]):
            f = Or(g, f)
        return f

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.at("AMP"):
            self.next()
            parts.append(self.unary())
        f = parts[-1]
        for g in reversed(parts[:-1]):
            f = And(g, f)
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        kind = tok[0]
        if kind == "TILDE":
            self.next()
            return neg(self.unary())
        if kind in ("FORALL", "EXISTS"):
            self.next()
            var = self.next("IDENT")[1]
            self.next("DOT")
            body = self.unary()
            return Forall(var, body) if kind == "FORALL" else Exists(var, body)
        return self.atomexp()

    def atomexp(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        kind = tok[0]
        if kind == "LPAR":
            self.next()
            f = self.formula()
            self.next("RPAR")
            return f
        if kind in ("BOT", "FALSE"):
            self.next()
            return BOTTOM
        if kind == "IDENT":
            name = self.next()[1]
            args: tuple[Term, ...] = ()
            if self.at("LPAR"):
                args = self.term_args()
            return Atom(name, args)
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])

    def term_args(self) -> tuple[Term, ...]:
        self.next("LPAR")
        args = []
        if not self.at("RPAR"):
            args.append(self.term())
            while self.at("COMMA"):
                self.next()
                args.append(self.term())
        self.next("RPAR")
        return tuple(args)

    def term(self) -> Term:
        name = self.next("IDENT")[1]
        if self.at("LPAR"):
            return App(name, self.term_args())
        return Var(name)


def _check_arities(f: Formula) -> None:
    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}

    def walk_term(t: Term) -> None:
        if isinstance(t, App):
            seen = funcs.setdefault(t.function, len(t.args))
            if seen != len(t.args):
                raise ArityError(
                    f"function {t.function!r} used with arity {len(t.args)} and {seen}")
            for a in t.args:
                walk_term(a)

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            seen = preds.setdefault(g.predicate, len(g.args))
            if seen != len(g.args):
                raise ArityError(
                    f"predicate {g.predicate!r} used with arity {len(g.args)} and {seen}")
            for a in g.args:
                walk_term(a)
        elif isinstance(g, (And, Or, Implies)):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Forall, Exists)):
            walk(g.body)

    walk(f)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok is not None:
        raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
    _check_arities(f)
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    tok = p.peek()
    if tok is not None:
        raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
    return t


def parse_formula_list(text: str) -> list[Formula]:
    """Parse a top-level comma-separated formula list; blank input gives []."""
    if not text.strip():
        return []
    p = _Parser(text)
    out = [p.formula()]
    while p.at("COMMA"):
        p.next()
        out.append(p.formula())
    tok = p.peek()
    if tok is not None:
        raise ParseError(f"unexpected trailing input {tok[1]!r}", tok[2])
    for f in out:
        _check_arities(f)
    return out


# ---------------------------------------------------------------------------
# Printing

_PREC_IMPL, _PREC_OR, _PREC_AND, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 4, 5


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return f"{t.function}({','.join(render_term(a) for a in t.args)})"


def _render(f: Formula, min_prec: int) -> str:
    if isinstance(f, Bottom):
        return BOTTOM_NAME
    if isinstance(f, Atom):
        if not f.args:
            return f.predicate
        return f"{f.predicate}({','.join(render_term(a) for a in f.args)})"
    if is_negation(f):
        s = "~" + _render(f.left, _PREC_UNARY)
        return f"({s})" if min_prec > _PREC_UNARY else s
    if isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        s = f"{q} {f.var}. " + _render(f.body, _PREC_UNARY)
        return f"({s})" if min_prec > _PREC_UNARY else s
    if isinstance(f, Implies):
        s = _render(f.left, _PREC_IMPL + 1) + " -> " + _render(f.right, _PREC_IMPL)
        return f"({s})" if min_prec > _PREC_IMPL else s
    if isinstance(f, Or):
        s = _render(f.left, _PREC_OR + 1) + " | " + _render(f.right, _PREC_OR)
        return f"({s})" if min_prec > _PREC_OR else s
    if isinstance(f, And):
        s = _render(f.left, _PREC_AND + 1) + " & " + _render(f.right, _PREC_AND)
        return f"({s})" if min_prec > _PREC_AND else s
    raise FormulaError(f"cannot render {f!r}")


def render_formula(f: Formula) -> str:
    return _render(f, 0)


# ---------------------------------------------------------------------------
# Variables and substitution


def term_variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= term_variables(a)
    return out


def free_variables(f: Formula) -> set[str]:
    if isinstance(f, Bottom):
        return set()
    if isinstance(f, Atom):
        out: set[str] = set()
        for a in f.args:
            out |= term_variables(a)
        return out
    if isinstance(f, (And, Or, Implies)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_variables(f.body) - {f.var}
    raise FormulaError(f"not a formula: {f!r}")


def all_names(f: Formula) -> set[str]:
    """Every identifier appearing in f: variables (free or bound), functions, predicates."""
    if isinstance(f, Bottom):
        return set()
    if isinstance(f, Atom):
        out = {f.predicate}
        for a in f.args:
            out |= _term_names(a)
        return out
    if isinstance(f, (And, Or, Implies)):
        return all_names(f.left) | all_names(f.right)
    if isinstance(f, (Forall, Exists)):
        return {f.var} | all_names(f.body)
    raise FormulaError(f"not a formula: {f!r}")


def _term_names(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out = {t.function}
    for a in t.args:
        out |= _term_names(a)
    return out


def _subterms_into(t: Term, bound: set[str], out: list[Term]) -> None:
    if not (term_variables(t) & bound) and t not in out:
        out.append(t)
    if isinstance(t, App):
        for a in t.args:
            _subterms_into(a, bound, out)


def formula_subterms(f: Formula, bound: set[str] | None = None,
                     out: list[Term] | None = None) -> list[Term]:
    """Terms occurring in f, bound-variable occurrences excluded, together
    with their subterms, deduplicated in appearance order."""
    bound = bound if bound is not None else set()
    out = out if out is not None else []
    if isinstance(f, Atom):
        for a in f.args:
            _subterms_into(a, bound, out)
    elif isinstance(f, (And, Or, Implies)):
        formula_subterms(f.left, bound, out)
        formula_subterms(f.right, bound, out)
    elif isinstance(f, (Forall, Exists)):
        formula_subterms(f.body, bound | {f.var}, out)
    return out


def substitute_term(t: Term, var: str, replacement: Term) -> Term:
    if isinstance(t, Var):
        return replacement if t.name == var else t
    return App(t.function, tuple(substitute_term(a, var, replacement) for a in t.args))


def _rename_candidate(base: str, avoid: set[str]) -> str:
    fresh = base + "'"
    while fresh in avoid:
        fresh += "'"
    return fresh


def substitute(f: Formula, var: str, t: Term) -> Formula:
    """Capture-avoiding substitution of t for the free occurrences of var.

    Bound variables are primed (y, y', y'', ...) whenever t would be captured.
    """
    if isinstance(f, Bottom):
        return f
    if isinstance(f, Atom):
        return Atom(f.predicate, tuple(substitute_term(a, var, t) for a in f.args))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(substitute(f.left, var, t), substitute(f.right, var, t))
    if isinstance(f, (Forall, Exists)):
        if f.var == var:
            return f
        if var not in free_variables(f.body):
            return f
        if f.var in term_variables(t):
            avoid = free_variables(f.body) | term_variables(t) | {var}
            fresh = _rename_candidate(f.var, avoid)
            body = substitute(f.body, f.var, Var(fresh))
            return type(f)(fresh, substitute(body, var, t))
        return type(f)(f.var, substitute(f.body, var, t))
    raise FormulaError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Alpha-equivalence: structural equality after canonical renaming of bound
# variables in traversal order, realized as a printable key.


def _term_key(t: Term, env: dict[str, str]) -> str:
    if isinstance(t, Var):
        return env.get(t.name, "." + t.name)
    return f"{t.function}({','.join(_term_key(a, env) for a in t.args)})"


def _formula_key(f: Formula, env: dict[str, str], depth: int) -> str:
    if isinstance(f, Bottom):
        return "#bot"
    if isinstance(f, Atom):
        return f"{f.predicate}({','.join(_term_key(a, env) for a in f.args)})"
    if isinstance(f, And):
        return f"(&{_formula_key(f.left, env, depth)}{_formula_key(f.right, env, depth)})"
    if isinstance(f, Or):
        return f"(|{_formula_key(f.left, env, depth)}{_formula_key(f.right, env, depth)})"
    if isinstance(f, Implies):
        return f"(>{_formula_key(f.left, env, depth)}{_formula_key(f.right, env, depth)})"
    if isinstance(f, (Forall, Exists)):
        q = "A" if isinstance(f, Forall) else "E"
        inner = dict(env)
        inner[f.var] = f"#{depth}"
        return f"({q}{_formula_key(f.body, inner, depth + 1)})"
    raise FormulaError(f"not a formula: {f!r}")


def canonical_key(f: Formula) -> str:
    """Key identifying f up to renaming of bound variables."""
    return _formula_key(f, {}, 0)


def alpha_eq(f: Formula, g: Formula) -> bool:
    return canonical_key(f) == canonical_key(g)


# ---------------------------------------------------------------------------
# Canonical variable enumeration v0, v1, ...


def variable_enumeration() -> Iterator[str]:
    i = 0
    while True:
        yield f"v{i}"
        i += 1


def first_fresh_variable(taken: set[str]) -> str:
    for name in variable_enumeration():
        if name not in taken:
            return name
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# Gentzen-subformula polarity, abstracted to predicate symbols


@dataclass(frozen=True)
class PolarityEntry:
    positive: bool
    negative: bool


@dataclass(frozen=True)
class PolarityTable:
    entries: tuple[tuple[str, PolarityEntry], ...]

    def entry(self, predicate: str) -> PolarityEntry:
        for name, e in self.entries:
            if name == predicate:
                return e
        return PolarityEntry(False, False)

    def predicates(self) -> list[str]:
        return [name for name, _ in self.entries]

    def both_polar(self) -> set[str]:
        return {name for name, e in self.entries if e.positive and e.negative}

    def positive_only(self) -> set[str]:
        return {name for name, e in self.entries if e.positive and not e.negative}

    def negative_only(self) -> set[str]:
        return {name for name, e in self.entries if e.negative and not e.positive}


def _collect_polarities(f: Formula, positive: bool, acc: dict[str, list[bool]]) -> None:
    if is_atomic(f):
        entry = acc.setdefault(atom_key(f), [False, False])
        entry[0 if positive else 1] = True
        return
    if isinstance(f, (And, Or)):
        _collect_polarities(f.left, positive, acc)
        _collect_polarities(f.right, positive, acc)
        return
    if isinstance(f, Implies):
        _collect_polarities(f.left, not positive, acc)
        _collect_polarities(f.right, positive, acc)
        return
    if isinstance(f, (Forall, Exists)):
        _collect_polarities(f.body, positive, acc)
        return
    raise FormulaError(f"not a formula: {f!r}")


def polarity_table(f: Formula) -> PolarityTable:
    """Which predicate symbols occur positively / negatively in f.

    Polarity flips across the left of an implication and is preserved
    elsewhere; quantifier bodies are traversed once, since instantiating a
    bound variable cannot change a predicate's polarity.  Bottom always has
    an entry, even when absent.
    """
    acc: dict[str, list[bool]] = {}
    _collect_polarities(f, True, acc)
    acc.setdefault(BOTTOM_NAME, [False, False])
    return PolarityTable(tuple((name, PolarityEntry(pos, negv))
                               for name, (pos, negv) in acc.items()))


# ---------------------------------------------------------------------------
# Structural occurrences and paths (left/right/body steps from the root)


def occurrences(f: Formula) -> Iterator[tuple[tuple[str, ...], Formula, bool]]:
    """All structural subformula occurrences as (path, subformula, is_positive)."""

    def walk(g: Formula, path: tuple[str, ...], positive: bool):
        yield path, g, positive
        if isinstance(g, (And, Or)):
            yield from walk(g.left, path + ("left",), positive)
            yield from walk(g.right, path + ("right",), positive)
        elif isinstance(g, Implies):
            yield from walk(g.left, path + ("left",), not positive)
            yield from walk(g.right, path + ("right",), positive)
        elif isinstance(g, (Forall, Exists)):
            yield from walk(g.body, path + ("body",), positive)

    yield from walk(f, (), True)


def subformula_at(f: Formula, path: tuple[str, ...]) -> Formula:
    g = f
    for step in path:
        if step == "left" and isinstance(g, (And, Or, Implies)):
            g = g.left
        elif step == "right" and isinstance(g, (And, Or, Implies)):
            g = g.right
        elif step == "body" and isinstance(g, (Forall, Exists)):
            g = g.body
        else:
            raise FormulaError(f"path step {step!r} does not apply to {g!r}")
    return g
