"""Bradley-Terry ranking fits and flip attacks."""

import json

from ._core import (
    AttackResult,
    Dataset,
    DimensionError,
    DomainError,
    FitResult,
    IllConditionedError,
    IndexError,
    NonIdentifiableError,
    ParseError,
    attack,
    ballots_to_dataset,
    fit,
    generate,
    influence,
    kendall_tau,
)
from ._core import budget_sweep as _budget_sweep

__all__ = [
    "AttackResult",
    "Dataset",
    "DimensionError",
    "DomainError",
    "FitResult",
    "IllConditionedError",
    "IndexError",
    "NonIdentifiableError",
    "ParseError",
    "attack",
    "ballots_to_dataset",
    "budget_sweep",
    "fit",
    "generate",
    "influence",
    "kendall_tau",
]


def budget_sweep(dataset, algorithms, fractions, **kwargs):
    """Run a budget sweep and return the results table as a dict."""
    return json.loads(_budget_sweep(dataset, list(algorithms), list(fractions), **kwargs))
