"""
Error hierarchy for fuzzymetric.

Every error carries a human-readable ``detail`` and the process ``exit_code``
the command line maps it to.
"""
from typing import Optional


class FuzzyMetricError(Exception):
    exit_code = 2

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DomainError(FuzzyMetricError):
    """An operation was called outside its precondition."""


class RepresentationError(DomainError):
    """A level family does not describe a fuzzy set (cuts are not nested)."""


class BudgetError(FuzzyMetricError):
    """A finite window was too short for the requested construction."""

    def __init__(self, detail: str, stage: int):
        super().__init__(detail)
        self.stage = stage


class ConfigError(FuzzyMetricError):
    """Invalid parameters, environment values or input files."""

    def __init__(self, detail: str, line_number: Optional[int] = None):
        if line_number is not None:
            detail = f"line {line_number}: {detail}"
        super().__init__(detail)
        self.line_number = line_number
