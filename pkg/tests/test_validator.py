import copy
from dataclasses import replace
from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pbkit.model import MetaSection, PbInstance, Project, VoteRecord, VoteType, resolve_defaults
from pbkit.parser import parse
from pbkit.validator import LengthMismatch, format_report, is_strict_order, validate

D = Decimal


def codes(violations):
    return [v.code for v in violations]


def make(vote_type, votes, costs=(("A", 3), ("B", 4), ("C", 5)), **meta_kw):
    meta = dict(
        description="t", country="c", unit="u", instance="1", num_projects=len(costs),
        num_votes=len(votes), budget=D(10), vote_type=VoteType(vote_type), rule="greedy",
    )
    meta.update(meta_kw)
    header = ("voter_id", "vote") + (("points",) if any(v.points is not None for v in votes) else ())
    return PbInstance(
        meta=resolve_defaults(MetaSection(**meta)),
        projects=tuple(Project(pid, D(c)) for pid, c in costs),
        votes=tuple(votes),
        vote_header=header,
    )


def test_golden_is_clean(wieliczka):
    assert validate(wieliczka) == []
    assert format_report([]) == "0 errors, 0 warnings\n"


def test_long_vote(wieliczka):
    votes = list(wieliczka.votes)
    votes[0] = replace(votes[0], vote=("1", "2", "4", "5"))
    violations = validate(replace(wieliczka, votes=tuple(votes)))
    assert codes(violations) == ["VOTE_LEN"]
    assert str(violations[0].subject) == "vote 1"
    assert str(violations[0]).startswith("ERROR VOTE_LEN vote 1: ")


def test_num_votes_mismatch(wieliczka_text):
    inst = parse(wieliczka_text.replace("num_votes; 10", "num_votes; 9")).instance
    assert codes(validate(inst)) == ["COUNT_VOTES"]
    inst = parse(wieliczka_text.replace("num_projects; 5", "num_projects; 6")).instance
    assert codes(validate(inst)) == ["COUNT_PROJECTS"]


def test_cumulative_sum_over_cap():
    vote = VoteRecord("1", vote=("A", "B"), points=(D(6), D(5)))
    inst = make("cumulative", [vote], max_sum_points=D(10))
    # oracle: direct summation
    assert sum(vote.points) == 11 > 10
    assert codes(validate(inst)) == ["SUM_POINTS"]


def test_cumulative_zero_and_range():
    inst = make("cumulative", [VoteRecord("1", vote=("A", "B"), points=(D(3), D(0)))], max_sum_points=D(10))
    assert codes(validate(inst)) == ["POINT_RANGE"]
    inst = make("cumulative", [VoteRecord("1", vote=("A",), points=(D(4),))], max_sum_points=D(10), max_points=D(3))
    assert codes(validate(inst)) == ["POINT_RANGE"]


def test_points_order():
    inst = make("scoring", [VoteRecord("1", vote=("A", "B"), points=(D(1), D(2)))])
    assert codes(validate(inst)) == ["POINTS_ORDER"]
    tied = make("scoring", [VoteRecord("1", vote=("A", "B"), points=(D(2), D(2)))])
    assert validate(tied) == []


def test_scoring_range_and_required():
    inst = make(
        "scoring",
        [VoteRecord("1", vote=("A",), points=(D(-3),)), VoteRecord("2", vote=("B",))],
        min_points=D(-2),
        max_points=D(2),
    )
    assert codes(validate(inst)) == ["POINT_RANGE", "POINTS_REQUIRED"]


def test_approval_points_and_cost():
    inst = make("approval", [VoteRecord("1", vote=("A", "C"), points=(D(1), D(1)))], max_sum_cost=D(7))
    assert codes(validate(inst)) == ["POINTS_PRESENT", "SUM_COST"]
    inst = make("ordinal", [VoteRecord("1", vote=("A",), points=(D(1),))])
    assert codes(validate(inst)) == ["POINTS_PRESENT"]


def test_empty_points_allowed_for_approval():
    assert validate(make("approval", [VoteRecord("1", vote=("A",)), VoteRecord("2", vote=(), points=())], min_length=0)) == []


def test_unknown_reference_is_reported():
    inst = make("approval", [VoteRecord("1", vote=("Z",))])
    assert "UNKNOWN_PROJECT_REF" in codes(validate(inst))


def test_zero_length_vote_needs_min_length_zero():
    assert codes(validate(make("ordinal", [VoteRecord("1")]))) == ["VOTE_LEN"]
    assert validate(make("ordinal", [VoteRecord("1")], min_length=0)) == []


def test_warnings():
    inst = make(
        "ordinal",
        [VoteRecord("1", vote=("A",))],
        budget=D(1),
        rule="equal-shares",
        date_begin="sometime in spring",
        max_sum_points=D(3),
        extra={"currency": "PLN"},
    )
    inst = replace(
        inst,
        projects=(Project("A", D(3), category=()), Project("B", D(4), name="x;y"), Project("C", D(5))),
        project_header=("project_id", "cost", "category", "name", "district"),
    )
    violations = validate(inst)
    assert all(v.severity == "warning" for v in violations)
    assert codes(violations) == [
        "META_UNKNOWN_KEY",
        "IRRELEVANT_KEY",
        "UNKNOWN_RULE",
        "DATE_FORMAT",
        "NONSTANDARD_COLUMN",
        "BUDGET_UNDERFUNDED",
        "EMPTY_CATEGORY",
        "UNREPRESENTABLE_VALUE",
    ]
    assert format_report(violations).endswith("0 errors, 8 warnings\n")


def test_report_ordering(wieliczka):
    votes = list(wieliczka.votes)
    votes[0] = replace(votes[0], vote=("1", "2", "4", "5"))
    votes[5] = replace(votes[5], vote=())
    inst = replace(wieliczka, votes=tuple(votes), meta=replace(wieliczka.meta, num_votes=3))
    assert [(v.code, str(v.subject)) for v in validate(inst)] == [
        ("COUNT_VOTES", "meta"),
        ("VOTE_LEN", "vote 1"),
        ("VOTE_LEN", "vote 6"),
    ]


def test_validate_is_deterministic_and_pure(wieliczka):
    votes = list(wieliczka.votes)
    votes[2] = replace(votes[2], vote=("1", "2", "4", "5"))
    inst = replace(wieliczka, votes=tuple(votes))
    before = copy.deepcopy(inst)
    assert validate(inst) == validate(inst)
    assert inst == before


@pytest.mark.parametrize(
    "points,expected",
    [([5, 3, 3, 1], True), ([3, 5], False), ([], True), ([1], True), ([2, 2, 2], True)],
)
def test_is_strict_order(points, expected):
    assert is_strict_order(list(range(len(points))), [D(p) for p in points]) is expected


def test_is_strict_order_length_mismatch():
    with pytest.raises(LengthMismatch):
        is_strict_order(["a"], [])


@given(st.lists(st.integers(-100, 100), max_size=12))
def test_sorted_points_are_ordered(values):
    pts = [D(v) for v in sorted(values, reverse=True)]
    assert is_strict_order(pts, pts)
    if len(set(values)) > 1:
        assert not is_strict_order(pts, pts[::-1])
