"""Bayes factors, historical tables and decision rules around the Jeffreys-Lindley paradox."""

from .numcore import (
    BracketError,
    ConvergenceError,
    DomainError,
    EvidenceRatio,
    QuadratureError,
    SearchBudgetError,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "ConvergenceError",
    "DomainError",
    "EvidenceRatio",
    "QuadratureError",
    "SearchBudgetError",
    "__version__",
]
