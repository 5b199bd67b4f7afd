"""Answer textual-entailment problems with Yes / No / Unknown verdicts.

Yes comes with a winning strategy for hypotheses -> conclusion, No with one
for hypotheses -> ~conclusion, and Unknown with the strongest negative
evidence found - ideally a polarity certificate: if the Proponent would be
forced to assert an atom whose predicate never occurs with both polarities,
no winning strategy can exist, because Proponent atoms must repeat Opponent
concessions.
"""
from dialogic import (
    PolarityCertificate, bundled_corpus_path, decide, polarity_precheck,
    build_formula, render_formula,
)
from dialogic.entail import load_suite

problems = load_suite(bundled_corpus_path())
for p in problems:
    verdict = decide(p)
    print(f"{p.id}: {verdict.answer.upper()}")
    if p.description:
        print(f"   {p.description}")
    print(f"   evidence: {type(verdict.evidence).__name__}")
    print()

unknown = problems[-1]
f = build_formula(unknown, "positive")
print("Why is the last one unknowable? The positive-direction formula is")
print(" ", render_formula(f))
cert = polarity_precheck(f)
assert isinstance(cert, PolarityCertificate)
print(f"and any winning strategy would force the Proponent to assert a")
print(f"'{cert.predicate}' atom, whose predicate never occurs negatively -")
print("so the Opponent never concedes one and the branch cannot be won.")
