"""Exception hierarchy shared by every module."""

from __future__ import annotations

import os

DEFAULT_SEARCH_BUDGET = 10**6


def search_budget(requested: int | None = None) -> int:
    """Step budget for orbit-escape style searches, capped by ``BAIRE_BUDGET_CAP``."""
    budget = DEFAULT_SEARCH_BUDGET if requested is None else requested
    cap = os.environ.get("BAIRE_BUDGET_CAP")
    if cap:
        budget = min(budget, int(cap))
    return budget


class BaireError(Exception):
    pass


class StructuralError(BaireError):
    """Operands that do not belong together (wrong parent group, bad shape)."""


class ValidationError(BaireError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class EmbeddingError(ValidationError):
    def __init__(self, message: str, pair=None, line: int | None = None):
        self.pair = pair
        super().__init__(message, line)


class BudgetExceeded(BaireError):
    """A bounded search ran out of steps. Never means the object does not exist."""

    def __init__(self, message: str, obstruction=None):
        self.obstruction = obstruction
        super().__init__(message)


class InvariantViolation(BaireError):
    pass


class LedgerGap(BaireError):
    def __init__(self, message: str, element=None):
        self.element = element
        super().__init__(message)


class CertificateFailure(BaireError):
    pass
