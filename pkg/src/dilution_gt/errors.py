"""Exception hierarchy for dilution-gt."""

from typing import Optional


class DilutionGTError(Exception):
    """Base class for every error raised by the package."""


class UsageError(DilutionGTError, ValueError):
    """Invalid arguments: out-of-range indices, wrong lengths, mismatched fields."""


class DomainError(DilutionGTError, ArithmeticError):
    """A mathematically undefined request, such as inverting zero."""


class FormatError(UsageError):
    """Malformed packed outcome file."""


class BudgetExceededError(DilutionGTError):
    """Work or memory required by a request is above the configured budget."""

    def __init__(self, what: str, required: int, budget: int, hint: Optional[str] = None):
        self.what = what
        self.required = required
        self.budget = budget
        message = f"{what} too large: needs {required:,} but budget is {budget:,}"
        if hint:
            message += f" ({hint})"
        super().__init__(message)
