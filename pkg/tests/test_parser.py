from decimal import Decimal
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbkit.model import MetaSection, PbInstance, Project, VoteRecord, VoteType, resolve_defaults
from pbkit.parser import parse, serialize_canonical

GOLDEN = (Path(__file__).parent / "data" / "wieliczka.pb").read_text(encoding="utf-8")


def codes(result):
    return [d.code for d in result.diagnostics]


def test_golden_example(wieliczka_text):
    result = parse(wieliczka_text)
    assert result.diagnostics == ()
    inst = result.instance
    assert inst.meta.num_projects == 5 and inst.meta.num_votes == 10
    assert inst.meta.budget == Decimal(2500)
    assert inst.meta.vote_type is VoteType.APPROVAL
    assert inst.meta.description == "Municipal PB in Wieliczka"
    assert len(inst.projects) == 5 and len(inst.votes) == 10
    assert inst.votes[0].vote == ("1", "2", "4")
    assert inst.votes[0].age == 34 and inst.votes[0].sex == "f"
    assert inst.projects[0] == Project("1", Decimal(600), category=("culture", "education"))
    assert inst.project_header == ("project_id", "cost", "category")
    assert inst.vote_header == ("voter_id", "age", "sex", "vote")


def test_bytes_crlf_and_bom(wieliczka_text, wieliczka):
    data = b"\xef\xbb\xbf" + wieliczka_text.replace("\n", "\r\n").encode()
    assert parse(data).instance == wieliczka


def test_blank_lines_and_missing_final_newline(wieliczka_text, wieliczka):
    text = "\n\n" + wieliczka_text.replace("PROJECTS\n", "\nPROJECTS\n\n").rstrip("\n")
    assert parse(text).instance == wieliczka


def test_canonical_form_of_golden(wieliczka_text, wieliczka):
    canon = serialize_canonical(wieliczka)
    lines = canon.split("\n")
    assert lines[:2] == ["META", "key; value"]
    assert "project_id; cost; category" in lines
    assert "1; 600; culture,education" in lines
    assert "1; 34; f; 1,2,4" in lines
    assert all(line == line.rstrip() for line in lines)
    assert canon.endswith("\n") and not canon.endswith("\n\n")
    # obligatory keys in listing order, then the explicit optional ones
    keys = [line.split(";")[0] for line in lines[2 : lines.index("PROJECTS")]]
    assert keys == [
        "description", "country", "unit", "instance", "num_projects", "num_votes",
        "budget", "vote_type", "rule", "min_length", "max_length",
    ]
    assert parse(canon).instance == wieliczka
    assert serialize_canonical(parse(canon).instance) == canon


def test_vote_header_order_is_echoed():
    meta = resolve_defaults(
        MetaSection(
            description="d", country="c", unit="u", instance="1", num_projects=1, num_votes=1,
            budget=Decimal(5), vote_type=VoteType.APPROVAL, rule="greedy",
        )
    )
    header = ("voter_id", "neighbourhood", "vote", "voting_method", "age")
    inst = PbInstance(
        meta=meta,
        projects=(Project("a", Decimal(1)),),
        votes=(VoteRecord("v", vote=("a",), voting_method="paper", age=30, extra={"neighbourhood": "N"}),),
        vote_header=header,
    )
    text = serialize_canonical(inst)
    assert "voter_id; neighbourhood; vote; voting_method; age" in text.splitlines()
    assert "v; N; a; paper; 30" in text.splitlines()
    assert parse(text).instance == inst


def test_nonstandard_meta_key_is_kept(wieliczka_text):
    text = wieliczka_text.replace("rule; greedy", "rule; greedy\ncurrency; PLN\nfully_funded; 1")
    result = parse(text)
    assert result.instance.meta.extra == {"currency": "PLN", "fully_funded": "1"}
    assert codes(result) == ["MetaUnknownKey", "MetaUnknownKey"]
    assert all(d.severity == "warning" for d in result.diagnostics)
    canon = serialize_canonical(result.instance)
    assert canon.index("currency; PLN") > canon.index("max_length; 3")


def _bad(text, code):
    result = parse(text)
    assert result.instance is None
    assert code in codes(result), result.diagnostics
    return next(d for d in result.diagnostics if d.code == code)


def test_votes_before_projects(wieliczka_text):
    head, rest = wieliczka_text.split("PROJECTS\n")
    projects, votes = rest.split("VOTES\n")
    d = _bad(head + "VOTES\n" + votes + "PROJECTS\n" + projects, "SectionOutOfOrder")
    assert d.line == 14


def test_missing_section(wieliczka_text):
    d = _bad(wieliczka_text.split("VOTES")[0], "SectionMissing")
    assert d.line == 20


def test_repeated_section(wieliczka_text):
    _bad(wieliczka_text + "VOTES\nvoter_id; vote\n", "SectionOutOfOrder")


def test_content_before_meta(wieliczka_text):
    _bad("hello\n" + wieliczka_text, "ContentOutsideSection")


def test_missing_header_column(wieliczka_text):
    _bad(wieliczka_text.replace("project_id; cost; category", "project_id; category; cost"), "HeaderMissingRequiredColumn")
    _bad(wieliczka_text.replace("voter_id; age; sex; vote", "voter_id; age; sex; ballot"), "HeaderMissingRequiredColumn")
    _bad(wieliczka_text.replace("key; value", "name; value"), "HeaderMissingRequiredColumn")


def test_duplicate_column(wieliczka_text):
    _bad(wieliczka_text.replace("voter_id; age; sex; vote", "voter_id; age; age; vote"), "DuplicateColumn")


def test_row_arity_reports_position(wieliczka_text):
    d = _bad(wieliczka_text.replace("2; 800; sport", "2; 800"), "RowArityMismatch")
    assert d.line == 17


def test_duplicate_ids_and_keys(wieliczka_text):
    _bad(wieliczka_text.replace("4; 1400; culture", "1; 1400; culture"), "DuplicateProjectId")
    _bad(wieliczka_text.replace("10; 44; m; 4,5", "9; 44; m; 4,5"), "DuplicateVoterId")
    d = _bad(wieliczka_text.replace("budget; 2500", "budget; 2500\nbudget; 100"), "DuplicateMetaKey")
    assert d.line == 10 and d.column == 1


@pytest.mark.parametrize(
    "old,new",
    [
        ("budget; 2500", "budget; 2,500"),
        ("budget; 2500", "budget; +2500"),
        ("budget; 2500", "budget; Infinity"),
        ("budget; 2500", "budget; -5"),
        ("num_votes; 10", "num_votes; 10.0"),
        ("2; 800; sport", "2; ; sport"),
        ("2; 51; m; 1,2", "2; fifty; m; 1,2"),
    ],
)
def test_malformed_numbers(wieliczka_text, old, new):
    _bad(wieliczka_text.replace(old, new), "MalformedNumber")


def test_malformed_number_column(wieliczka_text):
    d = _bad(wieliczka_text.replace("2; 800; sport", "2; 8O0; sport"), "MalformedNumber")
    assert (d.line, d.column) == (17, 4)


def test_unknown_vote_type(wieliczka_text):
    _bad(wieliczka_text.replace("vote_type; approval", "vote_type; quadratic"), "UnknownVoteType")


def test_missing_required_key(wieliczka_text):
    d = _bad(wieliczka_text.replace("country; Poland\n", ""), "MissingRequiredKey")
    assert d.line == 1
    _bad(wieliczka_text.replace("vote_type; approval", "vote_type; cumulative"), "MissingRequiredKey")


def test_vote_reference_errors(wieliczka_text):
    _bad(wieliczka_text.replace("8; 27; f; 4", "8; 27; f; 3"), "UnknownProjectRef")
    _bad(wieliczka_text.replace("8; 27; f; 4", "8; 27; f; 4,4"), "DuplicateVoteEntry")
    _bad(wieliczka_text.replace("8; 27; f; 4", "8; 27; f; 4,,5"), "EmptyListItem")
    _bad(wieliczka_text.replace("8; 27; f; 4", "; 27; f; 4"), "EmptyIdentifier")


def test_points_length_mismatch(wieliczka_text):
    text = wieliczka_text.replace("voter_id; age; sex; vote", "voter_id; age; sex; vote; points")
    text = text.replace("2; 51; m; 1,2", "2; 51; m; 1,2; 3").replace("; 4,5\n", "; 4,5; 2,1\n")
    lines = []
    for line in text.splitlines():
        if line.count(";") == 3 and line[0].isdigit() and "VOTES" in text.split(line)[0]:
            line += ";"
        lines.append(line)
    _bad("\n".join(lines) + "\n", "PointsLengthMismatch")


def test_points_column_parsed(wieliczka_text):
    text = wieliczka_text.replace("vote_type; approval", "vote_type; scoring")
    text = text.replace("voter_id; age; sex; vote", "voter_id; age; sex; vote; points")
    body = []
    in_votes = False
    for line in text.splitlines():
        if line == "VOTES":
            in_votes = True
        elif in_votes and line[0].isdigit():
            n = len(line.split(";")[-1].split(","))
            line += "; " + ",".join(str(-k / 2) for k in range(n))
        body.append(line)
    inst = parse("\n".join(body)).instance
    assert inst.votes[0].points == (Decimal("-0.0"), Decimal("-0.5"), Decimal("-1.0"))
    canon = serialize_canonical(inst)
    assert "1; 34; f; 1,2,4; 0.0,-0.5,-1.0" in canon.splitlines()
    assert parse(canon).instance == inst


def test_empty_points_cell():
    text = (
        "META\nkey;value\ndescription;d\ncountry;c\nunit;u\ninstance;1\nnum_projects;2\n"
        "num_votes;2\nbudget;10\nvote_type;cumulative\nrule;greedy\nmax_sum_points;5\nmin_length;0\n"
        "PROJECTS\nproject_id;cost\na;1\nb;2\nVOTES\nvoter_id;vote;points\n1;a,b;\n2;;\n"
    )
    inst = parse(text).instance
    assert inst.votes[0].points is None
    assert inst.votes[1].vote == () and inst.votes[1].points == ()


def test_invalid_utf8(wieliczka_text):
    data = wieliczka_text.encode().replace(b"Poland", b"Pol\xffand")
    d = _bad(data, "InvalidUtf8")
    assert (d.line, d.column) == (4, 13)


def test_empty_optional_values_are_absent(wieliczka_text):
    text = wieliczka_text.replace("rule; greedy", "rule; greedy\ncomment;")
    inst = parse(text).instance
    assert inst.meta.comment is None


def test_category_empty_cell():
    text = (
        "META\nkey; value\ndescription; d\ncountry; c\nunit; u\ninstance; 1\nnum_projects; 1\n"
        "num_votes; 0\nbudget; 10\nvote_type; approval\nrule; greedy\n"
        "PROJECTS\nproject_id; cost; category; name\na; 1; ;\nVOTES\nvoter_id; vote\n"
    )
    inst = parse(text).instance
    assert inst.projects[0].category == () and inst.projects[0].name is None
    assert "a; 1; ;" in serialize_canonical(inst).splitlines()


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=400))
def test_parse_never_raises_on_bytes(data):
    result = parse(data)
    if result.instance is None:
        assert result.errors
        assert all(d.line >= 1 for d in result.diagnostics)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_parse_never_raises_on_edited_file(data):
    lines = GOLDEN.splitlines()
    i = data.draw(st.integers(0, len(lines) - 1))
    lines[i] = data.draw(st.text(alphabet=";,\n META PROJECTSVOTES0123456789.-abc", max_size=30))
    result = parse("\n".join(lines))
    assert (result.instance is None) == bool(result.errors)
    for d in result.diagnostics:
        assert 1 <= d.line <= len("\n".join(lines).split("\n")) + 1
