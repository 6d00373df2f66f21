"""Score aggregation and the greedy allocation rule.

Scores are exact decimals. ``greedy_outcome`` ranks projects by total score
(highest first), breaks ties with a selectable deterministic key, and funds
down the ranking while money remains.
"""

from __future__ import annotations

import enum
from decimal import Decimal

from pbkit.model import Outcome, PbInstance, VoteType, exact
from pbkit.validator import ERROR, validate


class RuleError(Exception):
    pass


class WrongVoteType(RuleError):
    pass


class UnsupportedScoringFn(RuleError):
    def __init__(self, name):
        super().__init__(f"unsupported scoring_fn {name!r}; only Borda is implemented")
        self.name = name


class UnsupportedRule(RuleError):
    def __init__(self, name):
        super().__init__(f"unsupported rule {name!r}; only greedy is implemented")
        self.name = name


class ValidationRequired(RuleError):
    def __init__(self, violations):
        codes = sorted({v.code for v in violations})
        super().__init__(f"instance has validation errors: {', '.join(codes)}")
        self.violations = violations


class GreedyVariant(str, enum.Enum):
    SKIP_UNAFFORDABLE = "skip_unaffordable"
    STOP_AT_FIRST_UNAFFORDABLE = "stop_at_first_unaffordable"


class TieBreak(str, enum.Enum):
    BY_PROJECT_ID_ASCENDING = "by_project_id_ascending"
    BY_COST_ASCENDING_THEN_ID = "by_cost_ascending_then_id"
    BY_INPUT_ORDER = "by_input_order"


def id_key(project_id: str) -> tuple:
    """Sort key for project ids: digit strings numerically, ahead of all other
    ids, which compare as plain strings. Ties between ``"7"`` and ``"07"`` fall
    back to the raw text, so the key is a total order on distinct ids."""
    if project_id.isdigit() and project_id.isascii():
        return (0, int(project_id), project_id)
    return (1, 0, project_id)


def _check_type(instance: PbInstance, *allowed: VoteType) -> None:
    if VoteType(instance.meta.vote_type) not in allowed:
        names = "/".join(v.value for v in allowed)
        raise WrongVoteType(f"expected {names} votes, got {instance.meta.vote_type}")


def approval_scores(instance: PbInstance) -> dict:
    _check_type(instance, VoteType.APPROVAL)
    scores = {p.project_id: Decimal(0) for p in instance.projects}
    for vote in instance.votes:
        for pid in vote.vote:
            scores[pid] += 1
    return scores


def borda_scores(instance: PbInstance) -> dict:
    """The k-th ranked project of a vote gets ``num_projects - k`` points,
    however many projects that vote ranks."""
    _check_type(instance, VoteType.ORDINAL)
    m = instance.meta.num_projects
    counts = {p.project_id: 0 for p in instance.projects}
    for vote in instance.votes:
        for k, pid in enumerate(vote.vote, start=1):
            counts[pid] += m - k
    return {pid: Decimal(c) for pid, c in counts.items()}


def points_scores(instance: PbInstance) -> dict:
    _check_type(instance, VoteType.CUMULATIVE, VoteType.SCORING)
    scoring = VoteType(instance.meta.vote_type) is VoteType.SCORING
    default = instance.meta.default_score if scoring else None
    if scoring and default is None:
        default = Decimal(0)
    scores = {p.project_id: Decimal(0) for p in instance.projects}
    with exact():
        for vote in instance.votes:
            for pid, pts in zip(vote.vote, vote.points or ()):
                scores[pid] += pts
        if scoring and default:
            # every vote that leaves p unlisted adds default_score to p
            unlisted = {pid: len(instance.votes) for pid in scores}
            for vote in instance.votes:
                for pid in vote.vote:
                    unlisted[pid] -= 1
            for pid, n in unlisted.items():
                scores[pid] += default * n
    return scores


def aggregate_scores(instance: PbInstance) -> dict:
    vt = VoteType(instance.meta.vote_type)
    if vt is VoteType.APPROVAL:
        return approval_scores(instance)
    if vt is VoteType.ORDINAL:
        fn = instance.meta.scoring_fn or "Borda"
        if fn != "Borda":
            raise UnsupportedScoringFn(fn)
        return borda_scores(instance)
    return points_scores(instance)


def rank_projects(instance: PbInstance, scores: dict, tie_break=TieBreak.BY_PROJECT_ID_ASCENDING) -> list:
    """Project ids ordered by score (descending), then by the tie-break key."""
    tie_break = TieBreak(tie_break)
    if tie_break is TieBreak.BY_PROJECT_ID_ASCENDING:
        def secondary(i, p):
            return id_key(p.project_id)
    elif tie_break is TieBreak.BY_COST_ASCENDING_THEN_ID:
        def secondary(i, p):
            return (p.cost, id_key(p.project_id))
    else:
        def secondary(i, p):
            return i
    keyed = [((-scores[p.project_id], secondary(i, p)), p.project_id) for i, p in enumerate(instance.projects)]
    keyed.sort(key=lambda kp: kp[0])
    return [pid for _, pid in keyed]


def greedy_outcome(
    instance: PbInstance,
    variant=GreedyVariant.SKIP_UNAFFORDABLE,
    tie_break=TieBreak.BY_PROJECT_ID_ASCENDING,
) -> Outcome:
    variant = GreedyVariant(variant)
    tie_break = TieBreak(tie_break)
    if instance.meta.rule != "greedy":
        raise UnsupportedRule(instance.meta.rule)
    errors = [v for v in validate(instance) if v.severity == ERROR]
    if errors:
        raise ValidationRequired(errors)

    scores = aggregate_scores(instance)
    ranking = rank_projects(instance, scores, tie_break)
    costs = {p.project_id: p.cost for p in instance.projects}
    budget = instance.meta.budget

    funded, skipped, steps = [], [], []
    stopped = False
    with exact():
        remaining = budget
        for pid in ranking:
            cost = costs[pid]
            if stopped:
                action = "not considered"
            elif cost <= remaining:
                action = "funded"
            else:
                action = "unaffordable"
                if variant is GreedyVariant.STOP_AT_FIRST_UNAFFORDABLE:
                    stopped = True
            steps.append((pid, scores[pid], cost, remaining, action))
            if action == "funded":
                funded.append(pid)
                remaining -= cost
            else:
                skipped.append((pid, action))
        spent = budget - remaining

    return Outcome(
        scores=scores,
        funded=tuple(funded),
        spent=spent,
        remaining=remaining,
        skipped=tuple(skipped),
        budget=budget,
        variant=variant.value,
        tie_break=tie_break.value,
        ranking=tuple(ranking),
        steps=tuple(steps),
    )


def outcome_to_dict(outcome: Outcome) -> dict:
    """JSON-ready form; decimals are written as strings to stay exact."""
    def num(d):
        return format(d, "f")

    return {
        "rule": "greedy",
        "variant": outcome.variant,
        "tie_break": outcome.tie_break,
        "budget": num(outcome.budget),
        "scores": {pid: num(s) for pid, s in outcome.scores.items()},
        "ranking": list(outcome.ranking),
        "funded": list(outcome.funded),
        "spent": num(outcome.spent),
        "remaining": num(outcome.remaining),
        "skipped": [{"project_id": pid, "reason": why} for pid, why in outcome.skipped],
        "steps": [
            {
                "project_id": pid,
                "score": num(score),
                "cost": num(cost),
                "remaining_before": num(before),
                "action": action,
            }
            for pid, score, cost, before, action in outcome.steps
        ],
    }
