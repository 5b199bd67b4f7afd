"""Dialogical games, winning strategies, and a strategic sequent calculus
for classical first-order logic, with a textual-entailment harness on top."""

from .formula import (
    And, App, Atom, Bottom, BOTTOM, Exists, Forall, Formula, Implies, Or,
    Term, Var, free_variables, neg, parse_formula, polarity_table,
    render_formula, substitute,
)
from .dialogue import (
    AndLeft, AndRight, ExistsQuery, ForallAt, FormulaAttack, Game, Move,
    MoveDescriptor, OrQuery, attack_options, check_propositions,
    defence_options, extend_game, game_winner, legal_moves, new_game,
)
from .gkk import (
    Derivation, RuleApplication, SearchLimits, Sequent, TimeBudgetExceeded,
    is_strategic, parse_sequent, prove, term_universe, validate_derivation,
)
from .strategy import (
    Strategy, StrategyNode, find_winning_strategy, is_winning,
    strategy_isomorphic, validate_strategy,
)
from .translate import (
    derivation_to_strategy, fresh_variable_violations, label_sequents,
    strategize, strategy_to_derivation,
)
from .entail import (
    BoundsExhausted, PolarityCertificate, Problem, RefutingStrategy, Verdict,
    WinningStrategy, build_formula, bundled_corpus_path, decide,
    polarity_precheck, run_suite,
)

__version__ = "0.1.0"
