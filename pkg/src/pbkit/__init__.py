"""Tools for ``.pb`` participatory budgeting files: parsing, validation,
canonical serialization and the greedy aggregation rule."""

from pbkit.model import (
    MetaSection,
    MissingRequiredKey,
    Outcome,
    PbInstance,
    Project,
    VoteRecord,
    VoteType,
    resolve_defaults,
)
from pbkit.parser import Diagnostic, ParseResult, parse, parse_file, serialize_canonical
from pbkit.rules import (
    GreedyVariant,
    TieBreak,
    aggregate_scores,
    approval_scores,
    borda_scores,
    greedy_outcome,
    points_scores,
)
from pbkit.validator import Violation, is_strict_order, validate

__all__ = [
    "Diagnostic",
    "GreedyVariant",
    "MetaSection",
    "MissingRequiredKey",
    "Outcome",
    "ParseResult",
    "PbInstance",
    "Project",
    "TieBreak",
    "Violation",
    "VoteRecord",
    "VoteType",
    "aggregate_scores",
    "approval_scores",
    "borda_scores",
    "greedy_outcome",
    "is_strict_order",
    "parse",
    "parse_file",
    "points_scores",
    "resolve_defaults",
    "serialize_canonical",
    "validate",
]
