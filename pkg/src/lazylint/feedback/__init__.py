"""Guideline-aware feedback generation."""

from .evolve import (
    Candidate,
    EvolutionError,
    EvolutionResult,
    GaConfig,
    Plan,
    candidate_request,
    crossover_request,
    generate_plan,
    parse_plan,
    plan_request,
    run_evolution,
    select_parents,
    selection_probabilities,
)
from .fitness import (
    FORBIDDEN_TERMS,
    FitnessBreakdown,
    FitnessConfig,
    FitnessError,
    count_forbidden,
    count_syllables,
    fitness,
    flesch_reading_ease,
    ngrams,
    tokens,
)
from .templates import COMMENT_SLOT, GENERIC_KEY, Template, TemplateError, TemplateRegistry

__all__ = [
    "Candidate",
    "EvolutionError",
    "EvolutionResult",
    "GaConfig",
    "Plan",
    "candidate_request",
    "crossover_request",
    "generate_plan",
    "parse_plan",
    "plan_request",
    "run_evolution",
    "select_parents",
    "selection_probabilities",
    "FORBIDDEN_TERMS",
    "FitnessBreakdown",
    "FitnessConfig",
    "FitnessError",
    "count_forbidden",
    "count_syllables",
    "fitness",
    "flesch_reading_ease",
    "ngrams",
    "tokens",
    "COMMENT_SLOT",
    "GENERIC_KEY",
    "Template",
    "TemplateError",
    "TemplateRegistry",
]
