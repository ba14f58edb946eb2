"""Constructive amenable, transitive and faithful actions of graph-of-groups fundamental groups."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BaireError,
    BudgetExceeded,
    CertificateFailure,
    EmbeddingError,
    InvariantViolation,
    LedgerGap,
    StructuralError,
    ValidationError,
)
from .groups import BaseElement, BaseGroup, Embedding, FiniteGroup, check_embedding  # noqa: E402
from .graph import GraphOfGroups, britton_reduce, coset_rep, parse, parse_word  # noqa: E402
from .composer import compose, plan, prepare_vertex_action  # noqa: E402

__all__ = [
    "BaireError",
    "BaseElement",
    "BaseGroup",
    "BudgetExceeded",
    "CertificateFailure",
    "EmbeddingError",
    "Embedding",
    "FiniteGroup",
    "GraphOfGroups",
    "InvariantViolation",
    "LedgerGap",
    "StructuralError",
    "ValidationError",
    "britton_reduce",
    "check_embedding",
    "compose",
    "coset_rep",
    "parse",
    "parse_word",
    "plan",
    "prepare_vertex_action",
]
