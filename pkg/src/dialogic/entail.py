"""Textual-entailment verdicts: Yes / No / Unknown with checkable evidence.

The positive direction asks for a winning strategy for hypotheses -> conclusion,
the negative direction for hypotheses -> ~conclusion.  Before searching, a
polarity certificate can rule a direction out: abstract every predicate to
whether it occurs positively/negatively, make every Opponent-side atom true
and every Proponent-side atom true exactly when its predicate occurs with
both polarities (a Proponent atomic assertion must be a reprise of an
Opponent assertion, so single-polarity atoms are dead ends), and evaluate.
If the formula comes out false under this abstraction it has a countermodel,
so no winning strategy exists; the certificate names the blocking predicate.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .formula import (
    And, Exists, Forall, Formula, Implies, Or, atom_key, free_variables,
    is_atomic, neg, parse_formula, polarity_table, render_formula,
)
from .gkk import SearchLimits, TimeBudgetExceeded
from .strategy import Strategy, find_winning_strategy


class EntailError(Exception):
    pass


@dataclass(frozen=True)
class Problem:
    id: str
    hypotheses: tuple[Formula, ...]
    conclusion: Formula
    expected: str | None = None  # "yes" | "no" | "unknown"
    description: str | None = None

    def __post_init__(self):
        if not self.hypotheses:
            raise EntailError(f"{self.id}: at least one hypothesis required")
        for f in self.hypotheses + (self.conclusion,):
            if free_variables(f):
                raise EntailError(
                    f"{self.id}: open formula {render_formula(f)} rejected")
        if self.expected is not None and self.expected not in ("yes", "no", "unknown"):
            raise EntailError(f"{self.id}: bad expected value {self.expected!r}")


@dataclass(frozen=True)
class WinningStrategy:
    strategy: Strategy


@dataclass(frozen=True)
class RefutingStrategy:
    strategy: Strategy


@dataclass(frozen=True)
class PolarityCertificate:
    direction: str | None
    predicate: str


@dataclass(frozen=True)
class BoundsExhausted:
    timed_out: bool = False


Evidence = WinningStrategy | RefutingStrategy | PolarityCertificate | BoundsExhausted


@dataclass(frozen=True)
class Verdict:
    answer: str  # "yes" | "no" | "unknown"
    evidence: Evidence
    positive: Evidence | None = None
    negative: Evidence | None = None


def build_formula(p: Problem, direction: str) -> Formula:
    """hypotheses -> conclusion (positive) or -> ~conclusion (negative), with
    a right-nested hypothesis conjunction."""
    conj = p.hypotheses[-1]
    for h in reversed(p.hypotheses[:-1]):
        conj = And(h, conj)
    if direction == "positive":
        return Implies(conj, p.conclusion)
    if direction == "negative":
        return Implies(conj, neg(p.conclusion))
    raise EntailError(f"bad direction {direction!r}")


def _winnable(f: Formula) -> tuple[bool, str | None]:
    """Upper bound on 'a winning strategy exists', with a blocking predicate
    when the answer is no."""
    both = polarity_table(f).both_polar()

    def win(g: Formula) -> tuple[bool, str | None]:
        if is_atomic(g):
            k = atom_key(g)
            return (True, None) if k in both else (False, k)
        if isinstance(g, And):
            ok, w = win(g.left)
            if not ok:
                return False, w
            return win(g.right)
        if isinstance(g, Or):
            ok, w = win(g.left)
            if ok:
                return True, None
            ok2, _ = win(g.right)
            return (True, None) if ok2 else (False, w)
        if isinstance(g, Implies):
            ok_ref, _ = ref(g.left)
            if ok_ref:
                return True, None
            return win(g.right)
        if isinstance(g, (Forall, Exists)):
            return win(g.body)
        raise EntailError(f"not a formula: {g!r}")

    def ref(h: Formula) -> tuple[bool, str | None]:
        if is_atomic(h):
            return False, None
        if isinstance(h, And):
            ok, _ = ref(h.left)
            if ok:
                return True, None
            return ref(h.right)
        if isinstance(h, Or):
            ok, w = ref(h.left)
            if not ok:
                return False, w
            return ref(h.right)
        if isinstance(h, Implies):
            ok, w = win(h.left)
            if not ok:
                return False, w
            return ref(h.right)
        if isinstance(h, (Forall, Exists)):
            return ref(h.body)
        raise EntailError(f"not a formula: {h!r}")

    return win(f)


def polarity_precheck(f: Formula) -> PolarityCertificate | None:
    """Certificate that no winning strategy for f exists, or None.

    Sound: setting both-polar predicates true everywhere, the remaining
    positive-only predicates false and negative-only predicates true yields
    an interpretation whose value the abstract evaluation computes exactly;
    a false value is a countermodel.
    """
    ok, witness = _winnable(f)
    if ok:
        return None
    return PolarityCertificate(None, witness if witness is not None else "_|_")


def decide(p: Problem, limits: SearchLimits | None = None) -> Verdict:
    limits = limits or SearchLimits()
    evidence: dict[str, Evidence] = {}
    for direction, wrap in (("positive", WinningStrategy),
                            ("negative", RefutingStrategy)):
        f = build_formula(p, direction)
        cert = polarity_precheck(f)
        if cert is not None:
            evidence[direction] = replace(cert, direction=direction)
            continue
        try:
            strat = find_winning_strategy(f, limits)
        except TimeBudgetExceeded:
            evidence[direction] = BoundsExhausted(timed_out=True)
            continue
        if strat is not None:
            answer = "yes" if direction == "positive" else "no"
            ev = wrap(strat)
            return Verdict(answer, ev,
                           positive=ev if direction == "positive" else evidence.get("positive"),
                           negative=ev if direction == "negative" else None)
        evidence[direction] = BoundsExhausted()
    for direction in ("positive", "negative"):
        if isinstance(evidence[direction], PolarityCertificate):
            return Verdict("unknown", evidence[direction],
                           positive=evidence["positive"], negative=evidence["negative"])
    timed_out = any(isinstance(e, BoundsExhausted) and e.timed_out
                    for e in evidence.values())
    return Verdict("unknown", BoundsExhausted(timed_out),
                   positive=evidence["positive"], negative=evidence["negative"])


# ---------------------------------------------------------------------------
# Problem suites


@dataclass(frozen=True)
class SuiteResult:
    problem: Problem
    verdict: Verdict
    matched: bool | None
    seconds: float


@dataclass(frozen=True)
class SuiteSummary:
    results: tuple[SuiteResult, ...]

    @property
    def mismatches(self) -> int:
        return sum(1 for r in self.results if r.matched is False)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def problem_from_json(d: dict) -> Problem:
    try:
        return Problem(
            id=str(d["id"]),
            hypotheses=tuple(parse_formula(h) for h in d["hypotheses"]),
            conclusion=parse_formula(d["conclusion"]),
            expected=d.get("expected"),
            description=d.get("description"))
    except KeyError as e:
        raise EntailError(f"problem is missing field {e}") from e


def load_suite(path: str | Path) -> list[Problem]:
    text = Path(path).read_text()
    data = json.loads(text)  # JSONDecodeError carries line/column positions
    if not isinstance(data, list):
        raise EntailError("a suite file holds a JSON array of problems")
    return [problem_from_json(d) for d in data]


def run_suite(path: str | Path, limits: SearchLimits | None = None) -> SuiteSummary:
    results = []
    for problem in load_suite(path):
        started = time.monotonic()
        verdict = decide(problem, limits)
        elapsed = time.monotonic() - started
        matched = None if problem.expected is None else verdict.answer == problem.expected
        results.append(SuiteResult(problem, verdict, matched, elapsed))
    return SuiteSummary(tuple(results))


def bundled_corpus_path() -> Path:
    return Path(resources.files("dialogic").joinpath("data/fracas_subset.json"))
