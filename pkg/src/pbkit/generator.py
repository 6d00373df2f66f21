"""Seeded random ``.pb`` instances for property tests.

Without a mutation a generated instance passes validation with no errors.
A mutation named after a validator error code breaks exactly the constraint
behind that code (other codes may fire as a side effect).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Optional

from pbkit.model import MetaSection, PbInstance, Project, VoteRecord, VoteType, dsum, resolve_defaults
from pbkit.validator import CODES_BY_VOTE_TYPE, ERROR_CODES


class InfeasibleSpec(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    vote_type: VoteType = VoteType.APPROVAL
    num_projects: int = 5
    num_votes: int = 10
    budget_range: tuple = (0, 10000)
    cost_range: tuple = (1, 2000)
    cost_places: int = 0
    min_length: int = 1
    max_length: Optional[int] = None
    point_range: tuple = (1, 10)
    point_places: int = 0
    max_sum_points: Optional[int] = None
    seed: int = 0
    mutation: Optional[str] = None
    decorate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "vote_type", VoteType(self.vote_type))
        for name in ("budget_range", "cost_range", "point_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is empty: {lo} > {hi}")
        if self.num_projects < 1:
            raise ValueError("num_projects must be at least 1")
        if self.num_votes < 0:
            raise ValueError("num_votes must be non-negative")
        if self.cost_range[0] < 0 or self.budget_range[0] < 0:
            raise ValueError("costs and budgets must be non-negative")
        if self.cost_places < 0 or self.point_places < 0:
            raise ValueError("decimal places must be non-negative")
        if self.min_length < 0 or (self.max_length is not None and self.max_length < 0):
            raise ValueError("length bounds must be non-negative")
        if self.mutation is not None and self.mutation not in ERROR_CODES:
            raise ValueError(f"unknown mutation {self.mutation!r}; choose from {', '.join(ERROR_CODES)}")
        if self.mutation is not None and self.mutation not in CODES_BY_VOTE_TYPE[self.vote_type]:
            raise ValueError(f"mutation {self.mutation} does not apply to {self.vote_type.value} votes")


_WORDS = (
    "park", "school", "library", "bike", "lane", "garden", "playground", "bench",
    "łąka", "żłobek", "rue", "café", "plac", "zieleń", "senior", "youth",
)
_CATEGORIES = ("culture", "education", "sport", "health", "environmental protection", "public space", "public transit and roads")
_TARGETS = ("adults", "seniors", "children", "youth", "people with disabilities", "families with children", "animals")


def _decimal(rng: random.Random, lo, hi, places: int) -> Decimal:
    scale = 10**places
    lo_units = int(Decimal(lo) * scale)
    hi_units = int(Decimal(hi) * scale)
    return Decimal(rng.randint(lo_units, hi_units)).scaleb(-places)


def _phrase(rng: random.Random, n: int = 3) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(rng.randint(1, n)))


def _project_ids(rng: random.Random, n: int) -> list:
    style = rng.random()
    if style < 0.5:
        ids = [str(i) for i in range(1, n + 1)]
    elif style < 0.8:
        ids = [str(i) for i in sorted(rng.sample(range(1, 4 * n + 1), n))]
    else:
        ids = [f"P{i:03d}" for i in rng.sample(range(1, 4 * n + 1), n)]
    return ids


def _unit(places: int) -> Decimal:
    return Decimal(1).scaleb(-places)


def generate_random_instance(spec: GeneratorSpec) -> PbInstance:
    rng = random.Random(spec.seed)
    vt = spec.vote_type
    n = spec.num_projects
    max_length = n if spec.max_length is None else min(spec.max_length, n)
    if spec.min_length > max_length:
        raise InfeasibleSpec(f"min_length {spec.min_length} exceeds the largest possible vote ({max_length})")
    decorate = spec.decorate

    ids = _project_ids(rng, n)
    projects = []
    for pid in ids:
        projects.append(
            Project(
                project_id=pid,
                cost=_decimal(rng, *spec.cost_range, spec.cost_places),
                name=_phrase(rng).capitalize() if decorate else None,
                category=tuple(rng.sample(_CATEGORIES, rng.randint(0, 2))) if decorate else None,
                target=tuple(rng.sample(_TARGETS, rng.randint(1, 2))) if decorate else None,
                extra={"votes_in_2019": str(rng.randint(0, 500))} if decorate else {},
            )
        )
    project_header = ("project_id", "cost") + (("name", "category", "target", "votes_in_2019") if decorate else ())
    if decorate and rng.random() < 0.5:
        project_header = ("project_id", "cost", "votes_in_2019", "target", "name", "category")

    meta = {
        "description": f"Generated PB {spec.seed}",
        "country": rng.choice(["Poland", "France", "Netherlands", "Israel"]),
        "unit": _phrase(rng, 2).title(),
        "instance": str(rng.randint(2015, 2030)),
        "num_projects": n,
        "num_votes": spec.num_votes,
        "budget": _decimal(rng, *spec.budget_range, spec.cost_places),
        "vote_type": vt,
        "rule": "greedy",
    }
    if decorate:
        if rng.random() < 0.5:
            meta["subunit"] = _phrase(rng, 2)
        if rng.random() < 0.5:
            meta["date_begin"] = f"{rng.randint(2015, 2030)}-0{rng.randint(1, 9)}-1{rng.randint(0, 9)}"
        if rng.random() < 0.3:
            meta["comment"] = _phrase(rng, 6)
        if rng.random() < 0.5:
            meta["language"] = rng.choice(["polish", "french", "dutch"])
    if spec.min_length != 1 or rng.random() < 0.5:
        meta["min_length"] = spec.min_length
    if spec.max_length is not None or rng.random() < 0.5:
        meta["max_length"] = max_length

    # per-type point bounds
    unit = _unit(spec.point_places)
    lo_pts, hi_pts = Decimal(spec.point_range[0]), Decimal(spec.point_range[1])
    if vt is VoteType.CUMULATIVE:
        lo_pts = max(lo_pts, unit)
        if lo_pts > hi_pts:
            raise InfeasibleSpec("cumulative votes need a positive upper point bound")
        sum_cap = Decimal(spec.max_sum_points) if spec.max_sum_points is not None else hi_pts * max(max_length, 1)
        if spec.min_length * lo_pts > sum_cap:
            raise InfeasibleSpec("min_length votes at the lowest point value already exceed max_sum_points")
        hi_pts = min(hi_pts, sum_cap)
        meta["max_sum_points"] = sum_cap
        if rng.random() < 0.5:
            meta["max_points"] = hi_pts
        if rng.random() < 0.3:
            meta["min_points"] = Decimal(0)
    elif vt is VoteType.SCORING:
        if rng.random() < 0.6:
            meta["min_points"] = lo_pts
            meta["max_points"] = hi_pts
        if rng.random() < 0.4:
            meta["default_score"] = _decimal(rng, lo_pts, hi_pts, spec.point_places)
    elif vt is VoteType.ORDINAL and rng.random() < 0.3:
        meta["scoring_fn"] = "Borda"

    extra = {}
    if decorate and rng.random() < 0.4:
        extra["currency"] = rng.choice(["PLN", "EUR"])

    votes = []
    voter_ids = [str(i) for i in range(1, spec.num_votes + 1)]
    if rng.random() < 0.3:
        voter_ids = [f"v{i}" for i in rng.sample(range(1, 10 * spec.num_votes + 2), spec.num_votes)]
    for vid in voter_ids:
        length = rng.randint(spec.min_length, max_length)
        chosen = rng.sample(ids, length)
        points = None
        if vt is VoteType.CUMULATIVE:
            length = min(length, int(sum_cap // lo_pts))
            chosen = chosen[:length]
            points = _cumulative_points(rng, length, lo_pts, hi_pts, sum_cap, spec.point_places)
        elif vt is VoteType.SCORING:
            points = [_decimal(rng, lo_pts, hi_pts, spec.point_places) for _ in chosen]
        if points is not None:
            order = sorted(range(length), key=lambda i: points[i], reverse=True)
            chosen = [chosen[i] for i in order]
            points = tuple(points[i] for i in order)
        votes.append(
            VoteRecord(
                voter_id=vid,
                vote=tuple(chosen),
                points=points,
                age=rng.randint(16, 90) if decorate and rng.random() < 0.8 else None,
                sex=rng.choice(["f", "m", "x"]) if decorate and rng.random() < 0.8 else None,
                voting_method=rng.choice(["paper", "internet", "mail"]) if decorate else None,
                extra={"district": _phrase(rng, 1)} if decorate else {},
            )
        )
    vote_header = ["voter_id"]
    if decorate:
        vote_header += ["age", "sex", "voting_method", "district"]
    vote_header.append("vote")
    if vt in (VoteType.CUMULATIVE, VoteType.SCORING):
        vote_header.append("points")

    if vt is VoteType.APPROVAL and decorate and votes and rng.random() < 0.3:
        costs = {p.project_id: p.cost for p in projects}
        totals = [dsum(costs[p] for p in v.vote) for v in votes]
        meta["min_sum_cost"] = min(totals)
        meta["max_sum_cost"] = max(totals)

    instance = PbInstance(
        meta=resolve_defaults(MetaSection(extra=extra, **meta)),
        projects=tuple(projects),
        votes=tuple(votes),
        project_header=project_header,
        vote_header=tuple(vote_header),
    )
    if spec.mutation is not None:
        instance = mutate(instance, spec.mutation)
    return instance


def _cumulative_points(rng, length, lo, hi, cap, places) -> list:
    """``length`` values in ``[lo, hi]`` whose sum stays within ``cap``."""
    points = []
    left = cap
    for i in range(length):
        reserve = lo * (length - i - 1)
        top = min(hi, left - reserve)
        value = _decimal(rng, lo, top, places)
        points.append(value)
        left -= value
    rng.shuffle(points)
    return points


# -- mutations ----------------------------------------------------------------


def _set_meta(instance: PbInstance, **changes) -> PbInstance:
    meta = replace(instance.meta, defaulted=instance.meta.defaulted - frozenset(changes), **changes)
    return replace(instance, meta=meta)


def _replace_vote(instance: PbInstance, index: int, **changes) -> PbInstance:
    votes = list(instance.votes)
    votes[index] = replace(votes[index], **changes)
    return replace(instance, votes=tuple(votes))


def _ensure_vote(instance: PbInstance, predicate, distinct: bool = False):
    """Index of the first vote satisfying ``predicate``; when there is none, a
    vote naming one project (two with different points if ``distinct``) is
    appended and ``num_votes`` adjusted to match."""
    for i, vote in enumerate(instance.votes):
        if predicate(vote):
            return instance, i
    meta = instance.meta
    needed = 2 if distinct else 1
    if len(instance.projects) < needed:
        raise InfeasibleSpec("not enough projects to carry this mutation")
    ids = tuple(p.project_id for p in instance.projects[:needed])
    points = None
    vt = VoteType(meta.vote_type)
    if vt in (VoteType.CUMULATIVE, VoteType.SCORING):
        top = meta.max_points if meta.max_points is not None and meta.max_points.is_finite() else Decimal(1)
        points = (top, top / 2 if vt is VoteType.CUMULATIVE else top - 1)[:needed]
    taken = {v.voter_id for v in instance.votes}
    vid = "added"
    while vid in taken:
        vid += "_"
    vote = VoteRecord(voter_id=vid, vote=ids, points=points)
    instance = replace(instance, votes=instance.votes + (vote,))
    instance = _set_meta(instance, num_votes=len(instance.votes))
    return instance, len(instance.votes) - 1


def mutate(instance: PbInstance, code: str) -> PbInstance:
    """Break the constraint checked by validator error ``code``."""
    meta = instance.meta
    nonempty = lambda v: len(v.vote) > 0  # noqa: E731
    if code == "COUNT_PROJECTS":
        return _set_meta(instance, num_projects=meta.num_projects + 1)
    if code == "COUNT_VOTES":
        return _set_meta(instance, num_votes=meta.num_votes + 1)
    if code == "UNKNOWN_PROJECT_REF":
        known = {p.project_id for p in instance.projects}
        ghost = "999999"
        while ghost in known:
            ghost += "9"
        instance, i = _ensure_vote(instance, nonempty)
        vote = instance.votes[i]
        return _replace_vote(instance, i, vote=(ghost,) + vote.vote[1:])
    if code == "VOTE_LEN":
        instance, i = _ensure_vote(instance, nonempty)
        return _set_meta(instance, max_length=len(instance.votes[i].vote) - 1)
    if code == "SUM_COST":
        instance, _ = _ensure_vote(instance, lambda v: True)
        return _set_meta(instance, min_sum_cost=dsum(p.cost for p in instance.projects) + 1)
    if code == "POINTS_PRESENT":
        instance, i = _ensure_vote(instance, nonempty)
        vote = instance.votes[i]
        points = tuple(Decimal(len(vote.vote) - k) for k in range(len(vote.vote)))
        if "points" not in instance.vote_header:
            instance = replace(instance, vote_header=instance.vote_header + ("points",))
        return _replace_vote(instance, i, points=points)
    if code == "POINTS_REQUIRED":
        instance, i = _ensure_vote(instance, nonempty)
        return _replace_vote(instance, i, points=None)
    if code == "POINT_RANGE":
        instance, i = _ensure_vote(instance, nonempty)
        vote = instance.votes[i]
        if VoteType(meta.vote_type) is VoteType.CUMULATIVE:
            return _replace_vote(instance, i, points=vote.points[:-1] + (Decimal(0),))
        if instance.meta.max_points.is_infinite():
            instance = _set_meta(instance, max_points=max(vote.points))
        return _replace_vote(instance, i, points=(instance.meta.max_points + 1,) + vote.points[1:])
    if code == "SUM_POINTS":
        instance, i = _ensure_vote(instance, lambda v: True)
        return _set_meta(instance, min_sum_points=dsum(instance.votes[i].points or ()) + 1)
    if code == "POINTS_ORDER":
        instance, i = _ensure_vote(instance, lambda v: v.points is not None and len(set(v.points)) > 1, distinct=True)
        vote = instance.votes[i]
        return _replace_vote(instance, i, vote=vote.vote[::-1], points=vote.points[::-1])
    raise ValueError(f"unknown mutation {code!r}")
