"""Nashian and perfect-prediction solution concepts for finite perfect-information games."""

from gtsolve.corpus import GeneratorConfig, builtin, random_game
from gtsolve.errors import GameError, StrictnessRequired
from gtsolve.model import (
    Decision,
    ExtensiveGame,
    Leaf,
    NormalFormGame,
    Path,
    StrategyProfile,
    check_strict_preferences,
    outcomes,
    pareto_optimal_outcomes,
    validate,
)
from gtsolve.nash import backward_induction, pure_nash, superrational, to_normal_form
from gtsolve.oracle import ppe_oracle
from gtsolve.ppe import compare, ppe, preemption_fixpoint
from gtsolve.text import (
    ParseError,
    export_dot,
    parse_extensive,
    parse_normal,
    serialize_extensive,
    serialize_normal,
)

__all__ = [
    "Decision", "ExtensiveGame", "GameError", "GeneratorConfig", "Leaf", "NormalFormGame",
    "ParseError", "Path", "StrategyProfile", "StrictnessRequired", "backward_induction",
    "builtin", "check_strict_preferences", "compare", "export_dot", "outcomes",
    "pareto_optimal_outcomes", "parse_extensive", "parse_normal", "ppe", "ppe_oracle",
    "preemption_fixpoint", "pure_nash", "random_game", "serialize_extensive",
    "serialize_normal", "superrational", "to_normal_form", "validate",
]
