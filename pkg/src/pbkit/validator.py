"""Semantic checks of a parsed instance against the bounds declared in META.

Every check runs; nothing short-circuits. Violations come back in file order:
META first, then the project and vote headers, then projects, then votes.

Error codes (an error-free instance is safe to aggregate):

================== =============================================================
COUNT_PROJECTS     number of projects differs from ``num_projects``
COUNT_VOTES        number of votes differs from ``num_votes``
UNKNOWN_PROJECT_REF vote names a project id that is not defined
VOTE_LEN           vote length outside ``[min_length, max_length]``
SUM_COST           approval: total cost of approved projects outside
                   ``[min_sum_cost, max_sum_cost]``
POINTS_PRESENT     approval/ordinal vote carries points
POINTS_REQUIRED    cumulative/scoring vote without points
POINT_RANGE        a point outside ``[min_points, max_points]``; for cumulative
                   votes also a point that is not strictly positive
SUM_POINTS         cumulative: points total outside
                   ``[min_sum_points, max_sum_points]``
POINTS_ORDER       cumulative/scoring: projects not listed in non-increasing
                   order of points
================== =============================================================

Warning codes: META_UNKNOWN_KEY, IRRELEVANT_KEY, UNKNOWN_RULE, DATE_FORMAT,
UNREPRESENTABLE_VALUE, NONSTANDARD_COLUMN, EMPTY_CATEGORY, BUDGET_UNDERFUNDED.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional

from pbkit.model import (
    OPTIONAL_META_KEYS,
    VOTE_TYPE_KEYS,
    PbInstance,
    VoteType,
    dsum,
    resolve_defaults,
)

ERROR = "error"
WARNING = "warning"

ERROR_CODES = (
    "COUNT_PROJECTS",
    "COUNT_VOTES",
    "UNKNOWN_PROJECT_REF",
    "VOTE_LEN",
    "SUM_COST",
    "POINTS_PRESENT",
    "POINTS_REQUIRED",
    "POINT_RANGE",
    "SUM_POINTS",
    "POINTS_ORDER",
)

WARNING_CODES = (
    "META_UNKNOWN_KEY",
    "IRRELEVANT_KEY",
    "UNKNOWN_RULE",
    "DATE_FORMAT",
    "UNREPRESENTABLE_VALUE",
    "NONSTANDARD_COLUMN",
    "EMPTY_CATEGORY",
    "BUDGET_UNDERFUNDED",
)

# Error codes that can arise for each vote type.
CODES_BY_VOTE_TYPE = {
    VoteType.APPROVAL: ERROR_CODES[:4] + ("SUM_COST", "POINTS_PRESENT"),
    VoteType.ORDINAL: ERROR_CODES[:4] + ("POINTS_PRESENT",),
    VoteType.CUMULATIVE: ERROR_CODES[:4] + ("POINTS_REQUIRED", "POINT_RANGE", "SUM_POINTS", "POINTS_ORDER"),
    VoteType.SCORING: ERROR_CODES[:4] + ("POINTS_REQUIRED", "POINT_RANGE", "POINTS_ORDER"),
}

_DATE_SHAPES = [
    re.compile(p)
    for p in (
        r"\d{4}-\d{1,2}-\d{1,2}([ T]\d{1,2}:\d{2}(:\d{2})?)?\Z",
        r"\d{1,2}\.\d{1,2}\.\d{4}\Z",
        r"\d{1,2}/\d{1,2}/\d{4}\Z",
        r"\d{4}\Z",
        r"\d{4}-\d{1,2}\Z",
    )
]


_BOUND_KEYS = frozenset().union(*VOTE_TYPE_KEYS.values())


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Subject:
    kind: str  # "meta", "project" or "vote"
    ident: Optional[str] = None

    def __str__(self) -> str:
        if self.ident is None:
            return self.kind if self.kind == "meta" else f"{self.kind} header"
        return f"{self.kind} {self.ident}"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "id": self.ident}


META = Subject("meta")


@dataclass(frozen=True)
class Violation:
    code: str
    severity: str
    subject: Subject
    message: str

    def __str__(self) -> str:
        return f"{self.severity.upper()} {self.code} {self.subject}: {self.message}"

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "subject": self.subject.to_dict(),
            "message": self.message,
        }


def is_strict_order(vote, points) -> bool:
    """True iff ``points`` is non-increasing. Ties are allowed."""
    if len(vote) != len(points):
        raise LengthMismatch(f"{len(vote)} projects but {len(points)} points")
    return all(a >= b for a, b in zip(points, points[1:]))


def has_errors(violations) -> bool:
    return any(v.severity == ERROR for v in violations)


def _fmt(value) -> str:
    return format(value, "f") if hasattr(value, "is_infinite") and not value.is_infinite() else str(value)


def _unrepresentable(text: str, in_list: bool = False) -> bool:
    bad = ";\n\r" + ("," if in_list else "")
    return any(ch in text for ch in bad) or text != text.strip()


def validate(instance: PbInstance) -> list:
    """Return every violation found in ``instance``; never raises on bad data."""
    meta = resolve_defaults(instance.meta)
    if meta is not instance.meta:
        instance = replace(instance, meta=meta)
    out = []
    _check_meta(instance, out)
    _check_headers(instance, out)
    _check_projects(instance, out)
    projects = instance.project_map
    for vote in instance.votes:
        _check_vote(instance.meta, projects, vote, out)
    return out


def _check_meta(instance: PbInstance, out: list) -> None:
    meta = instance.meta
    vt = VoteType(meta.vote_type)
    if len(instance.projects) != meta.num_projects:
        out.append(
            Violation(
                "COUNT_PROJECTS",
                ERROR,
                META,
                f"num_projects is {meta.num_projects} but {len(instance.projects)} projects are listed",
            )
        )
    if len(instance.votes) != meta.num_votes:
        out.append(
            Violation("COUNT_VOTES", ERROR, META, f"num_votes is {meta.num_votes} but {len(instance.votes)} votes are listed")
        )
    for key in meta.extra:
        out.append(Violation("META_UNKNOWN_KEY", WARNING, META, f"non-standard key {key!r}"))
    for key in OPTIONAL_META_KEYS:
        if key in _BOUND_KEYS and key not in VOTE_TYPE_KEYS[vt] and getattr(meta, key) is not None:
            out.append(Violation("IRRELEVANT_KEY", WARNING, META, f"{key} has no meaning for {vt.value} votes"))
    if meta.rule != "greedy":
        out.append(Violation("UNKNOWN_RULE", WARNING, META, f"rule {meta.rule!r} is not supported; only 'greedy' is"))
    for key in ("date_begin", "date_end"):
        value = getattr(meta, key)
        if value is not None and not any(p.match(value) for p in _DATE_SHAPES):
            out.append(Violation("DATE_FORMAT", WARNING, META, f"{key} {value!r} does not look like a date"))
    texts = [(k, v) for k, v in meta.explicit_items() if isinstance(v, str)] + list(meta.extra.items())
    for key, value in texts:
        if _unrepresentable(key) or _unrepresentable(value):
            out.append(Violation("UNREPRESENTABLE_VALUE", WARNING, META, f"{key!r} cannot be written to a .pb file as is"))


def _check_headers(instance: PbInstance, out: list) -> None:
    for col in instance.project_extra_columns:
        out.append(Violation("NONSTANDARD_COLUMN", WARNING, Subject("project"), f"non-standard column {col!r}"))
    for col in instance.vote_extra_columns:
        out.append(Violation("NONSTANDARD_COLUMN", WARNING, Subject("vote"), f"non-standard column {col!r}"))


def _check_projects(instance: PbInstance, out: list) -> None:
    meta = instance.meta
    if instance.projects:
        cheapest = min(p.cost for p in instance.projects)
        if meta.budget < cheapest:
            out.append(
                Violation(
                    "BUDGET_UNDERFUNDED",
                    WARNING,
                    META,
                    f"budget {_fmt(meta.budget)} is below the cheapest project ({_fmt(cheapest)})",
                )
            )
    for project in instance.projects:
        subject = Subject("project", project.project_id)
        if project.category is not None and not project.category:
            out.append(Violation("EMPTY_CATEGORY", WARNING, subject, "category is empty"))
        values = [project.project_id, project.name or ""] + list(project.extra.values())
        lists = list(project.category or ()) + list(project.target or ())
        if any(_unrepresentable(v) for v in values) or any(_unrepresentable(v, True) for v in lists):
            out.append(Violation("UNREPRESENTABLE_VALUE", WARNING, subject, "a value cannot be written to a .pb file as is"))


def _check_vote(meta, projects: dict, vote, out: list) -> None:
    vt = VoteType(meta.vote_type)
    subject = Subject("vote", vote.voter_id)

    def err(code, message):
        out.append(Violation(code, ERROR, subject, message))

    texts = [vote.voter_id, vote.sex or "", vote.voting_method or ""] + list(vote.extra.values())
    if any(_unrepresentable(t) for t in texts) or any(_unrepresentable(p, True) for p in vote.vote):
        out.append(Violation("UNREPRESENTABLE_VALUE", WARNING, subject, "a value cannot be written to a .pb file as is"))

    unknown = [p for p in vote.vote if p not in projects]
    if unknown:
        err("UNKNOWN_PROJECT_REF", f"unknown project(s) {', '.join(unknown)}")

    n = len(vote.vote)
    if not meta.min_length <= n <= meta.max_length:
        err("VOTE_LEN", f"vote has {n} projects, allowed range is [{meta.min_length}, {meta.max_length}]")

    if vt in (VoteType.APPROVAL, VoteType.ORDINAL):
        if vote.points:
            err("POINTS_PRESENT", f"{vt.value} votes must not carry points")
        if vt is VoteType.APPROVAL:
            total = dsum(projects[p].cost for p in vote.vote if p in projects)
            if not meta.min_sum_cost <= total <= meta.max_sum_cost:
                err(
                    "SUM_COST",
                    f"approved projects cost {_fmt(total)}, allowed range is "
                    f"[{_fmt(meta.min_sum_cost)}, {_fmt(meta.max_sum_cost)}]",
                )
        return

    if vote.points is None:
        if vote.vote:
            err("POINTS_REQUIRED", f"{vt.value} votes must assign points to every listed project")
        return
    points = vote.points
    lo, hi = meta.min_points, meta.max_points
    if vt is VoteType.CUMULATIVE:
        bad = [p for p in points if not (lo <= p <= hi and p > 0)]
    else:
        bad = [p for p in points if not lo <= p <= hi]
    if bad:
        rule = f"[{_fmt(lo)}, {_fmt(hi)}]" + (" and positive" if vt is VoteType.CUMULATIVE else "")
        err("POINT_RANGE", f"points {', '.join(_fmt(p) for p in bad)} outside {rule}")
    if vt is VoteType.CUMULATIVE:
        total = dsum(points)
        if not meta.min_sum_points <= total <= meta.max_sum_points:
            err(
                "SUM_POINTS",
                f"points sum to {_fmt(total)}, allowed range is "
                f"[{_fmt(meta.min_sum_points)}, {_fmt(meta.max_sum_points)}]",
            )
    if not is_strict_order(vote.vote, points):
        err("POINTS_ORDER", "projects are not listed in non-increasing order of points")


def summarize_counts(violations) -> tuple:
    errors = sum(1 for v in violations if v.severity == ERROR)
    return errors, len(violations) - errors


def format_report(violations) -> str:
    lines = [str(v) for v in violations]
    errors, warnings = summarize_counts(violations)
    lines.append(f"{errors} error{'s' if errors != 1 else ''}, {warnings} warning{'s' if warnings != 1 else ''}")
    return "\n".join(lines) + "\n"
