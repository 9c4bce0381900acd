"""Temporal-logic tasks for a king on a chessboard.

LTL formulas are compiled to limit-deterministic Büchi automata, accepting
runs are turned into sequences of Boolean reach/avoid formulas, and those
sequences are solved exactly (value iteration) or learned (tabular
Q-learning) in ChessWorld.
"""

from .automata import Ldba, accepts_lasso, build_ldba, ldba_step, universal_states
from .boolean import Universe
from .chessworld import Board, EnvState, load_board, possible_assignments
from .formula_cache import FormulaCache, TemplateParams, build_cache, lookup
from .lasso import LassoWord, satisfies_lasso
from .learner import QTable, greedy_policy, sample_curriculum, train
from .ltl import LtlError, LtlSyntaxError, UnknownPropositionError, normalize, parse_ltl, to_string
from .planner import (EpisodeResult, Planner, UnsatisfiableTaskError, build_sequence_mdp,
                      evaluate_suite, execute, select_run, value_iteration)
from .residual import UnsupportedFragmentError
from .runs import (EpsilonStep, FormulaSequence, InfeasibleRunError, Pair, RunPrefix,
                   accepting_runs, run_to_sequence)

__version__ = "0.1.0"

__all__ = [
    "Board", "EnvState", "EpisodeResult", "EpsilonStep", "FormulaCache", "FormulaSequence",
    "InfeasibleRunError", "LassoWord", "Ldba", "LtlError", "LtlSyntaxError", "Pair", "Planner",
    "QTable", "RunPrefix", "TemplateParams", "Universe", "UnknownPropositionError",
    "UnsatisfiableTaskError", "UnsupportedFragmentError", "accepting_runs", "accepts_lasso",
    "build_cache", "build_ldba", "build_sequence_mdp", "evaluate_suite", "execute",
    "greedy_policy", "ldba_step", "load_board", "lookup", "normalize", "parse_ltl",
    "possible_assignments", "run_to_sequence", "sample_curriculum", "satisfies_lasso",
    "select_run", "to_string", "train", "universal_states", "value_iteration",
]
