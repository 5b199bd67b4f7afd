from __future__ import annotations

import random

import pytest

from dialogic.formula import (
    And, App, Atom, Bottom, Exists, Forall, Implies, Or, Var,
    BOTTOM, ArityError, ParseError,
    alpha_eq, canonical_key, free_variables, occurrences, parse_formula,
    parse_formula_list, polarity_table, render_formula, subformula_at,
    substitute, first_fresh_variable,
)

from .oracles import db_form, db_substitute, random_formula

a, b, c = Atom("a"), Atom("b"), Atom("c")


def test_parse_precedence():
    assert parse_formula("a & b -> c") == Implies(And(a, b), c)
    assert parse_formula("a | b & c") == Or(a, And(b, c))
    assert parse_formula("a -> b -> c") == Implies(a, Implies(b, c))


def test_parse_negation_sugar():
    assert parse_formula("~a(x)") == Implies(Atom("a", (Var("x"),)), BOTTOM)
    assert parse_formula("a -> _|_") == Implies(a, BOTTOM)
    assert parse_formula("false") == BOTTOM


def test_parse_quantifiers_bind_tightly():
    f = parse_formula("forall x. a(x) | exists x. ~a(x)")
    ax = Atom("a", (Var("x"),))
    assert f == Or(Forall("x", ax), Exists("x", Implies(ax, BOTTOM)))


def test_parse_drinker_and_distribution():
    f = parse_formula("exists x. (a(x) -> forall y. a(y))")
    assert f == Exists("x", Implies(Atom("a", (Var("x"),)),
                                    Forall("y", Atom("a", (Var("y"),)))))
    g = parse_formula("forall x. (a(x) & b(x)) -> (forall x. a(x)) & (forall x. b(x))")
    assert isinstance(g, Implies) and isinstance(g.left, Forall) and isinstance(g.right, And)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as e:
        parse_formula("a & ")
    assert "position" in str(e.value)
    with pytest.raises(ParseError):
        parse_formula("a $ b")
    with pytest.raises(ArityError):
        parse_formula("a(x) & a(x,y)")


def test_zero_ary_function_spelled_with_parens():
    f = parse_formula("p(c())")
    assert f == Atom("p", (App("c", ()),))
    assert render_formula(f) == "p(c())"
    assert parse_formula("p(c)") == Atom("p", (Var("c"),))


def test_render_examples():
    assert render_formula(a) == "a"
    assert render_formula(Implies(a, BOTTOM)) == "~a"
    assert render_formula(Or(Forall("x", Atom("a", (Var("x"),))), b)) == "forall x. a(x) | b"
    assert render_formula(And(Or(a, b), c)) == "(a | b) & c"


def test_render_parse_round_trip_random():
    rng = random.Random(20240901)
    for _ in range(1000):
        f = random_formula(rng, rng.randint(0, 6))
        assert parse_formula(render_formula(f)) == f


def test_substitute_basic():
    assert substitute(Atom("a", (Var("x"),)), "x", Var("c")) == Atom("a", (Var("c"),))
    f = Forall("x", Atom("a", (Var("x"),)))
    assert substitute(f, "x", Var("c")) == f


def test_substitute_capture_avoiding():
    f = Exists("y", Atom("r", (Var("x"), Var("y"))))
    res = substitute(f, "x", App("f", (Var("y"),)))
    expected = Exists("y'", Atom("r", (App("f", (Var("y"),)), Var("y'"))))
    assert res == expected


def test_substitute_against_de_bruijn_reference():
    rng = random.Random(77)
    for _ in range(500):
        f = random_formula(rng, rng.randint(0, 4), ["x", "y"])
        var = rng.choice(["x", "y"])
        t = App("f", (Var(rng.choice(["x", "y", "z"])),))
        assert db_form(substitute(f, var, t)) == db_substitute(f, var, t)


def test_free_variables():
    assert free_variables(Forall("x", Atom("a", (Var("x"),)))) == set()
    assert free_variables(Atom("a", (Var("x"), Var("y")))) == {"x", "y"}
    f = Implies(Forall("x", Atom("r", (Var("x"), Var("y")))),
                Atom("r", (Var("x"), Var("x"))))
    assert free_variables(f) == {"x", "y"}


def fracas_unknown_formula():
    f1 = parse_formula(
        "exists x. exists y. (scandinave(x) & (prix_Nobel(y) & gagner(x,y)))")
    f2 = parse_formula("forall u. (suedois(u) -> scandinave(u))")
    f3 = parse_formula(
        "exists w. exists z. (suedois(w) & (prix_Nobel(z) & gagner(w,z)))")
    return Implies(And(f1, f2), f3)


def test_polarity_table_fracas_unknown():
    # suedois occurs positively twice (antecedent flip inside the universal
    # hypothesis, and the conclusion) and never negatively.
    table = polarity_table(fracas_unknown_formula())
    su = table.entry("suedois")
    assert su.positive and not su.negative
    sc = table.entry("scandinave")
    assert sc.negative and not sc.positive
    assert table.entry("prix_Nobel") == table.entry("gagner")
    assert table.entry("prix_Nobel").positive and table.entry("prix_Nobel").negative


def test_polarity_table_simple_flip():
    table = polarity_table(Implies(a, b))
    assert table.entry("a").negative and not table.entry("a").positive
    assert table.entry("b").positive and not table.entry("b").negative


def test_polarity_table_both_through_quantifiers():
    f = Exists("x", Implies(Atom("a", (Var("x"),)),
                            Forall("y", Atom("a", (Var("y"),)))))
    e = polarity_table(f).entry("a")
    assert e.positive and e.negative


def test_polarity_negation_flips_and_bottom_positive():
    rng = random.Random(5)
    for _ in range(200):
        f = random_formula(rng, rng.randint(0, 4))
        t = polarity_table(f)
        tn = polarity_table(Implies(f, BOTTOM))
        for name, entry in t.entries:
            if name == "_|_":
                continue
            flipped = tn.entry(name)
            assert flipped.positive == entry.negative
            assert flipped.negative == entry.positive
        assert tn.entry("_|_").positive


def test_polarity_table_sound_vs_structural_occurrences():
    rng = random.Random(6)
    for _ in range(300):
        f = random_formula(rng, rng.randint(0, 5))
        t = polarity_table(f)
        seen: dict[str, set[bool]] = {}
        for _path, sub, positive in occurrences(f):
            if isinstance(sub, (Atom, Bottom)):
                key = sub.predicate if isinstance(sub, Atom) else "_|_"
                seen.setdefault(key, set()).add(positive)
        for name, signs in seen.items():
            entry = t.entry(name)
            assert entry.positive == (True in signs)
            assert entry.negative == (False in signs)


def test_occurrence_paths_resolve():
    f = parse_formula("(a -> b) & forall x. a(x -> is_wrong)" if False else "(a -> b) & c")
    for path, sub, _pos in occurrences(f):
        assert subformula_at(f, path) == sub


def test_alpha_equivalence():
    f = Forall("x", Atom("a", (Var("x"),)))
    g = Forall("y", Atom("a", (Var("y"),)))
    assert alpha_eq(f, g)
    assert canonical_key(f) == canonical_key(g)
    assert not alpha_eq(f, Forall("x", Atom("a", (Var("z"),))))


def test_parse_formula_list():
    assert parse_formula_list("") == []
    out = parse_formula_list("a(x, y), b")
    assert out == [Atom("a", (Var("x"), Var("y"))), b]


def test_first_fresh_variable():
    assert first_fresh_variable(set()) == "v0"
    assert first_fresh_variable({"v0", "v1", "x"}) == "v2"
