"""Domain types for participatory-budgeting instances stored as ``.pb`` files.

All values are frozen dataclasses. Money and points are :class:`decimal.Decimal`
so that sums and comparisons are exact; use :func:`exact` around any arithmetic
that may exceed the default 28-digit context.
"""

from __future__ import annotations

import contextlib
import decimal
import enum
from dataclasses import dataclass, field, replace
from decimal import Decimal
from typing import Iterator, Optional

INF = Decimal("Infinity")

_EXACT_CONTEXT = decimal.Context(
    prec=decimal.MAX_PREC,
    Emax=decimal.MAX_EMAX,
    Emin=decimal.MIN_EMIN,
    traps=[decimal.InvalidOperation, decimal.DivisionByZero, decimal.Overflow],
)


@contextlib.contextmanager
def exact() -> Iterator[decimal.Context]:
    """Decimal context in which addition and multiplication never round."""
    with decimal.localcontext(_EXACT_CONTEXT) as ctx:
        yield ctx


def dsum(values) -> Decimal:
    with exact():
        total = Decimal(0)
        for v in values:
            total += v
        return total


class VoteType(str, enum.Enum):
    APPROVAL = "approval"
    ORDINAL = "ordinal"
    CUMULATIVE = "cumulative"
    SCORING = "scoring"

    def __str__(self) -> str:
        return self.value


class MissingRequiredKey(ValueError):
    def __init__(self, key: str):
        super().__init__(f"missing required META key {key!r}")
        self.key = key


# Obligatory META keys, in canonical output order.
REQUIRED_META_KEYS = (
    "description",
    "country",
    "unit",
    "instance",
    "num_projects",
    "num_votes",
    "budget",
    "vote_type",
    "rule",
)

# Optional typed META keys, in canonical output order.
OPTIONAL_META_KEYS = (
    "subunit",
    "date_begin",
    "date_end",
    "language",
    "edition",
    "district",
    "comment",
    "min_length",
    "max_length",
    "min_sum_cost",
    "max_sum_cost",
    "scoring_fn",
    "min_points",
    "max_points",
    "min_sum_points",
    "max_sum_points",
    "default_score",
)

TYPED_META_KEYS = REQUIRED_META_KEYS + OPTIONAL_META_KEYS

# How each typed META key is read and written.
TEXT, COUNT, MONEY, NUMBER, VOTE_TYPE = "text", "count", "money", "number", "vote_type"
META_KEY_KINDS = {
    "description": TEXT,
    "country": TEXT,
    "unit": TEXT,
    "instance": TEXT,
    "num_projects": COUNT,
    "num_votes": COUNT,
    "budget": MONEY,
    "vote_type": VOTE_TYPE,
    "rule": TEXT,
    "subunit": TEXT,
    "date_begin": TEXT,
    "date_end": TEXT,
    "language": TEXT,
    "edition": TEXT,
    "district": TEXT,
    "comment": TEXT,
    "min_length": COUNT,
    "max_length": COUNT,
    "min_sum_cost": MONEY,
    "max_sum_cost": MONEY,
    "scoring_fn": TEXT,
    "min_points": NUMBER,
    "max_points": NUMBER,
    "min_sum_points": NUMBER,
    "max_sum_points": NUMBER,
    "default_score": NUMBER,
}

# Bound keys that carry meaning for each vote type.
VOTE_TYPE_KEYS = {
    VoteType.APPROVAL: ("min_length", "max_length", "min_sum_cost", "max_sum_cost"),
    VoteType.ORDINAL: ("min_length", "max_length", "scoring_fn"),
    VoteType.CUMULATIVE: (
        "min_length",
        "max_length",
        "min_points",
        "max_points",
        "min_sum_points",
        "max_sum_points",
    ),
    VoteType.SCORING: ("min_length", "max_length", "min_points", "max_points", "default_score"),
}

PROJECT_COLUMNS = ("project_id", "cost", "name", "category", "target")
VOTE_COLUMNS = ("voter_id", "age", "sex", "voting_method", "vote", "points")


@dataclass(frozen=True)
class MetaSection:
    """The META section. ``extra`` holds non-standard keys in file order.

    ``defaulted`` names the keys that were filled in by :func:`resolve_defaults`
    rather than read from a file; the serializer leaves them out.
    """

    description: Optional[str] = None
    country: Optional[str] = None
    unit: Optional[str] = None
    instance: Optional[str] = None
    num_projects: Optional[int] = None
    num_votes: Optional[int] = None
    budget: Optional[Decimal] = None
    vote_type: Optional[VoteType] = None
    rule: Optional[str] = None
    subunit: Optional[str] = None
    date_begin: Optional[str] = None
    date_end: Optional[str] = None
    language: Optional[str] = None
    edition: Optional[str] = None
    district: Optional[str] = None
    comment: Optional[str] = None
    min_length: Optional[int] = None
    max_length: Optional[int] = None
    min_sum_cost: Optional[Decimal] = None
    max_sum_cost: Optional[Decimal] = None
    scoring_fn: Optional[str] = None
    min_points: Optional[Decimal] = None
    max_points: Optional[Decimal] = None
    min_sum_points: Optional[Decimal] = None
    max_sum_points: Optional[Decimal] = None
    default_score: Optional[Decimal] = None
    extra: dict = field(default_factory=dict)
    defaulted: frozenset = frozenset()

    def __post_init__(self):
        clash = set(self.extra) & set(TYPED_META_KEYS)
        if clash:
            raise ValueError(f"extra META keys shadow typed keys: {sorted(clash)}")

    def explicit_items(self):
        """Typed keys that are set and were not defaulted, in canonical order."""
        for key in TYPED_META_KEYS:
            value = getattr(self, key)
            if value is not None and key not in self.defaulted:
                yield key, value


@dataclass(frozen=True)
class Project:
    project_id: str
    cost: Decimal
    name: Optional[str] = None
    category: Optional[tuple] = None
    target: Optional[tuple] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.project_id:
            raise ValueError("project_id must be non-empty")
        if self.cost < 0:
            raise ValueError(f"project {self.project_id}: negative cost {self.cost}")
        for labels in (self.category, self.target):
            if labels is not None and any(not lab.strip() for lab in labels):
                raise ValueError(f"project {self.project_id}: empty label")


@dataclass(frozen=True)
class VoteRecord:
    voter_id: str
    vote: tuple = ()
    points: Optional[tuple] = None
    age: Optional[int] = None
    sex: Optional[str] = None
    voting_method: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.voter_id:
            raise ValueError("voter_id must be non-empty")
        if len(set(self.vote)) != len(self.vote):
            raise ValueError(f"voter {self.voter_id}: duplicate project in vote")
        if self.points is not None and len(self.points) != len(self.vote):
            raise ValueError(f"voter {self.voter_id}: points and vote differ in length")
        if self.age is not None and self.age < 0:
            raise ValueError(f"voter {self.voter_id}: negative age")

    def points_for(self) -> dict:
        """Map of listed project id to its points (empty when points are absent)."""
        if self.points is None:
            return {}
        return dict(zip(self.vote, self.points))


@dataclass(frozen=True)
class PbInstance:
    meta: MetaSection
    projects: tuple
    votes: tuple
    project_header: tuple = ("project_id", "cost")
    vote_header: tuple = ("voter_id", "vote")

    def __post_init__(self):
        if tuple(self.project_header[:2]) != ("project_id", "cost"):
            raise ValueError("project header must begin with project_id, cost")
        if not self.vote_header or self.vote_header[0] != "voter_id" or "vote" not in self.vote_header:
            raise ValueError("vote header must begin with voter_id and contain vote")
        ids = [p.project_id for p in self.projects]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate project_id")
        voters = [v.voter_id for v in self.votes]
        if len(set(voters)) != len(voters):
            raise ValueError("duplicate voter_id")

    @property
    def project_map(self) -> dict:
        return {p.project_id: p for p in self.projects}

    @property
    def project_extra_columns(self) -> tuple:
        return tuple(c for c in self.project_header if c not in PROJECT_COLUMNS)

    @property
    def vote_extra_columns(self) -> tuple:
        return tuple(c for c in self.vote_header if c not in VOTE_COLUMNS)


@dataclass(frozen=True)
class Outcome:
    """Result of a greedy run. ``steps`` is the audit trail, one entry per
    project considered: ``(project_id, score, cost, remaining_before, action)``
    where action is ``funded``, ``unaffordable`` or ``not considered``."""

    scores: dict
    funded: tuple
    spent: Decimal
    remaining: Decimal
    skipped: tuple
    budget: Decimal
    variant: str
    tie_break: str
    ranking: tuple = ()
    steps: tuple = ()


def resolve_defaults(meta: MetaSection) -> MetaSection:
    """Fill in the declared default of every bound relevant to ``meta.vote_type``.

    Keys already present are left alone, and bounds belonging to other vote
    types stay absent. Raises :class:`MissingRequiredKey` when an obligatory key
    is missing (``max_sum_points`` is obligatory for cumulative votes).
    """
    for key in REQUIRED_META_KEYS:
        if getattr(meta, key) is None:
            raise MissingRequiredKey(key)
    vt = VoteType(meta.vote_type)
    if vt is VoteType.CUMULATIVE and meta.max_sum_points is None:
        raise MissingRequiredKey("max_sum_points")

    defaults = {"min_length": 1, "max_length": meta.num_projects}
    if vt is VoteType.APPROVAL:
        defaults.update(min_sum_cost=Decimal(0), max_sum_cost=INF)
    elif vt is VoteType.ORDINAL:
        defaults.update(scoring_fn="Borda")
    elif vt is VoteType.CUMULATIVE:
        defaults.update(
            min_points=Decimal(0),
            max_points=meta.max_sum_points,
            min_sum_points=Decimal(0),
        )
    else:
        defaults.update(min_points=-INF, max_points=INF, default_score=Decimal(0))

    changes = {k: v for k, v in defaults.items() if getattr(meta, k) is None}
    if not changes:
        return meta
    return replace(meta, defaulted=meta.defaulted | frozenset(changes), **changes)


