"""Reading and writing ``.pb`` files.

A file has three sections, ``META``, ``PROJECTS`` and ``VOTES``, each
introduced by its keyword alone on a line and followed by a header row.
Fields are separated by ``;`` and multi-valued cells by ``,``; whitespace
around every field and item is ignored. There is no quoting.

Diagnostic codes emitted by :func:`parse`:

=========================== ========= ==========================================
code                        severity  trigger
=========================== ========= ==========================================
InvalidUtf8                 error     a line is not valid UTF-8
ContentOutsideSection       error     data before the ``META`` keyword
SectionMissing              error     a section keyword never appears
SectionOutOfOrder           error     a section keyword is repeated or misplaced
HeaderMissingRequiredColumn error     header lacks a mandatory column
DuplicateColumn             error     a header names a column twice, or an
                                      empty column
RowArityMismatch            error     row has a different field count than its
                                      header
EmptyIdentifier             error     empty META key, project_id or voter_id
EmptyListItem               error     ``a,,b`` in a multi-valued cell
DuplicateMetaKey            error     META key given twice
DuplicateProjectId          error     project_id given twice
DuplicateVoterId            error     voter_id given twice
DuplicateVoteEntry          error     a vote lists the same project twice
UnknownProjectRef           error     a vote names a project not in PROJECTS
MalformedNumber             error     a typed column holds an invalid number
PointsLengthMismatch        error     points and vote differ in length
UnknownVoteType             error     vote_type outside the four known types
MissingRequiredKey          error     obligatory META key absent
MetaUnknownKey              warning   non-standard META key (kept in ``extra``)
=========================== ========= ==========================================
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional, Union

from pbkit.model import (
    COUNT,
    META_KEY_KINDS,
    MONEY,
    NUMBER,
    PROJECT_COLUMNS,
    REQUIRED_META_KEYS,
    TEXT,
    VOTE_COLUMNS,
    MetaSection,
    PbInstance,
    Project,
    VoteRecord,
    VoteType,
    resolve_defaults,
)

SECTIONS = ("META", "PROJECTS", "VOTES")

ERROR = "error"
WARNING = "warning"

_COUNT_RE = re.compile(r"\d+\Z")
_MONEY_RE = re.compile(r"\d+(\.\d+)?\Z")
_NUMBER_RE = re.compile(r"-?\d+(\.\d+)?\Z")


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int
    column: Optional[int]
    code: str
    message: str

    def __str__(self) -> str:
        pos = f"{self.line}" if self.column is None else f"{self.line}:{self.column}"
        return f"{pos}: {self.severity} {self.code}: {self.message}"


@dataclass(frozen=True)
class ParseResult:
    instance: Optional[PbInstance]
    diagnostics: tuple

    @property
    def ok(self) -> bool:
        return self.instance is not None

    @property
    def errors(self) -> list:
        return [d for d in self.diagnostics if d.severity == ERROR]


class _Cell:
    __slots__ = ("text", "column")

    def __init__(self, text: str, column: int):
        self.text = text
        self.column = column


def _split(text: str, sep: str, start_column: int = 1) -> list:
    """Split on ``sep`` and trim, keeping the 1-based column of each piece."""
    cells = []
    offset = 0
    for piece in text.split(sep):
        stripped = piece.strip()
        lead = len(piece) - len(piece.lstrip())
        cells.append(_Cell(stripped, start_column + offset + lead))
        offset += len(piece) + len(sep)
    return cells


class _Parser:
    def __init__(self):
        self.diagnostics = []

    def error(self, line, column, code, message):
        self.diagnostics.append(Diagnostic(ERROR, line, column, code, message))

    def warning(self, line, column, code, message):
        self.diagnostics.append(Diagnostic(WARNING, line, column, code, message))

    # -- lines and sections ---------------------------------------------------

    def decode_lines(self, data: bytes) -> list:
        raw_lines = data.split(b"\n")
        if raw_lines and raw_lines[-1] == b"":
            raw_lines.pop()
        lines = []
        for lineno, raw in enumerate(raw_lines, start=1):
            if raw.endswith(b"\r"):
                raw = raw[:-1]
            if lineno == 1 and raw.startswith(b"\xef\xbb\xbf"):
                raw = raw[3:]
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                col = len(raw[: exc.start].decode("utf-8", errors="replace")) + 1
                self.error(lineno, col, "InvalidUtf8", f"invalid UTF-8 byte at offset {exc.start}")
                text = None
            lines.append((lineno, text))
        return lines

    def split_sections(self, lines: list) -> Optional[dict]:
        sections = {}
        current = None
        expected = 0
        last_line = lines[-1][0] if lines else 1
        for lineno, text in lines:
            if text is None:
                continue
            stripped = text.strip()
            if not stripped:
                continue
            if stripped in SECTIONS:
                if stripped in sections or SECTIONS.index(stripped) != expected:
                    if stripped in sections:
                        msg = f"section {stripped} appears more than once"
                    else:
                        msg = f"section {stripped} found where {SECTIONS[expected]} was expected"
                    self.error(lineno, 1, "SectionOutOfOrder", msg)
                    return None
                current = stripped
                expected += 1
                sections[current] = (lineno, [])
                continue
            if current is None:
                self.error(lineno, 1, "ContentOutsideSection", "content before the META section")
                return None
            sections[current][1].append((lineno, text))
        for name in SECTIONS:
            if name not in sections:
                self.error(last_line, None, "SectionMissing", f"section {name} is missing")
        if len(sections) != len(SECTIONS):
            return None
        return sections

    def header(self, section: str, start: int, rows: list, required_prefix, required_any=()):
        if not rows:
            self.error(start, None, "HeaderMissingRequiredColumn", f"section {section} has no header row")
            return None, []
        lineno, text = rows[0]
        cells = _split(text, ";")
        names = [c.text for c in cells]
        ok = True
        if tuple(names[: len(required_prefix)]) != tuple(required_prefix):
            self.error(
                lineno,
                1,
                "HeaderMissingRequiredColumn",
                f"{section} header must begin with {', '.join(required_prefix)}",
            )
            ok = False
        for name in required_any:
            if name not in names:
                self.error(lineno, 1, "HeaderMissingRequiredColumn", f"{section} header lacks column {name!r}")
                ok = False
        seen = set()
        for cell in cells:
            if not cell.text or cell.text in seen:
                what = "empty column name" if not cell.text else f"column {cell.text!r} repeated"
                self.error(lineno, cell.column, "DuplicateColumn", what)
                ok = False
            seen.add(cell.text)
        return (names if ok else None), rows[1:]

    def row_cells(self, lineno: int, text: str, width: int) -> Optional[list]:
        cells = _split(text, ";")
        if len(cells) != width:
            self.error(lineno, 1, "RowArityMismatch", f"expected {width} fields, found {len(cells)}")
            return None
        return cells

    # -- values ---------------------------------------------------------------

    def number(self, lineno: int, cell: _Cell, kind: str, what: str):
        pattern = {COUNT: _COUNT_RE, MONEY: _MONEY_RE, NUMBER: _NUMBER_RE}[kind]
        if not pattern.match(cell.text):
            self.error(lineno, cell.column, "MalformedNumber", f"{what}: {cell.text!r} is not a valid number")
            return None
        return int(cell.text) if kind == COUNT else Decimal(cell.text)

    def items(self, lineno: int, cell: _Cell, what: str) -> Optional[tuple]:
        if not cell.text:
            return ()
        parts = _split(cell.text, ",", cell.column)
        for part in parts:
            if not part.text:
                self.error(lineno, part.column, "EmptyListItem", f"{what}: empty item")
                return None
        return tuple(p.text for p in parts)

    # -- sections -------------------------------------------------------------

    def meta(self, start: int, rows: list) -> Optional[MetaSection]:
        names, rows = self.header("META", start, rows, ("key", "value"))
        if names is None:
            return None
        if len(names) != 2:
            self.error(rows[0][0] if rows else start, 1, "RowArityMismatch", "META header must be 'key; value'")
            return None
        values = {}
        extra = {}
        seen = {}
        ok = True
        for lineno, text in rows:
            if not text.strip():
                continue
            cells = self.row_cells(lineno, text, 2)
            if cells is None:
                ok = False
                continue
            key, value = cells
            if not key.text:
                self.error(lineno, key.column, "EmptyIdentifier", "empty META key")
                ok = False
                continue
            if key.text in seen:
                self.error(lineno, key.column, "DuplicateMetaKey", f"key {key.text!r} already given on line {seen[key.text]}")
                ok = False
                continue
            seen[key.text] = lineno
            kind = META_KEY_KINDS.get(key.text)
            if kind is None:
                self.warning(lineno, key.column, "MetaUnknownKey", f"non-standard META key {key.text!r}")
                extra[key.text] = value.text
            elif kind == TEXT:
                if value.text or key.text in REQUIRED_META_KEYS:
                    values[key.text] = value.text
            elif kind == "vote_type":
                try:
                    values[key.text] = VoteType(value.text)
                except ValueError:
                    self.error(lineno, value.column, "UnknownVoteType", f"unknown vote_type {value.text!r}")
                    ok = False
            else:
                parsed = self.number(lineno, value, kind, key.text)
                if parsed is None:
                    ok = False
                else:
                    values[key.text] = parsed
        if not ok:
            return None
        for key in REQUIRED_META_KEYS:
            if key not in values:
                self.error(start, None, "MissingRequiredKey", f"obligatory META key {key!r} is missing")
                ok = False
        if ok and values["vote_type"] is VoteType.CUMULATIVE and "max_sum_points" not in values:
            self.error(start, None, "MissingRequiredKey", "cumulative votes require max_sum_points")
            ok = False
        if not ok:
            return None
        return resolve_defaults(MetaSection(extra=extra, **values))

    def projects(self, start: int, rows: list):
        names, rows = self.header("PROJECTS", start, rows, ("project_id", "cost"))
        if names is None:
            return None, None
        projects = []
        seen = {}
        ok = True
        for lineno, text in rows:
            if not text.strip():
                continue
            cells = self.row_cells(lineno, text, len(names))
            if cells is None:
                ok = False
                continue
            row = dict(zip(names, cells))
            pid = row["project_id"]
            if not pid.text:
                self.error(lineno, pid.column, "EmptyIdentifier", "empty project_id")
                ok = False
                continue
            if pid.text in seen:
                self.error(lineno, pid.column, "DuplicateProjectId", f"project {pid.text!r} already defined on line {seen[pid.text]}")
                ok = False
                continue
            seen[pid.text] = lineno
            cost = self.number(lineno, row["cost"], MONEY, "cost")
            category = self.items(lineno, row["category"], "category") if "category" in row else None
            target = self.items(lineno, row["target"], "target") if "target" in row else None
            if cost is None or ("category" in row and category is None) or ("target" in row and target is None):
                ok = False
                continue
            projects.append(
                Project(
                    project_id=pid.text,
                    cost=cost,
                    name=row["name"].text or None if "name" in row else None,
                    category=category,
                    target=target,
                    extra={k: c.text for k, c in row.items() if k not in PROJECT_COLUMNS},
                )
            )
        if not ok:
            return None, names
        return projects, names

    def votes(self, start: int, rows: list, known_projects):
        names, rows = self.header("VOTES", start, rows, ("voter_id",), ("vote",))
        if names is None:
            return None, None
        votes = []
        seen = {}
        ok = True
        for lineno, text in rows:
            if not text.strip():
                continue
            cells = self.row_cells(lineno, text, len(names))
            if cells is None:
                ok = False
                continue
            row = dict(zip(names, cells))
            vid = row["voter_id"]
            if not vid.text:
                self.error(lineno, vid.column, "EmptyIdentifier", "empty voter_id")
                ok = False
                continue
            if vid.text in seen:
                self.error(lineno, vid.column, "DuplicateVoterId", f"voter {vid.text!r} already defined on line {seen[vid.text]}")
                ok = False
                continue
            seen[vid.text] = lineno
            if not self.vote_row(lineno, row, known_projects, votes):
                ok = False
        return (votes if ok else None), names

    def vote_row(self, lineno, row, known_projects, out) -> bool:
        vote_cell = row["vote"]
        vote = self.items(lineno, vote_cell, "vote")
        if vote is None:
            return False
        ok = True
        if len(set(vote)) != len(vote):
            self.error(lineno, vote_cell.column, "DuplicateVoteEntry", "vote lists a project more than once")
            ok = False
        if known_projects is not None:
            for pid in vote:
                if pid not in known_projects:
                    self.error(lineno, vote_cell.column, "UnknownProjectRef", f"vote names unknown project {pid!r}")
                    ok = False
        points = None
        if "points" in row:
            cell = row["points"]
            if cell.text:
                points = []
                for part in _split(cell.text, ",", cell.column):
                    value = self.number(lineno, part, NUMBER, "points")
                    if value is None:
                        ok = False
                    points.append(value)
                points = tuple(points)
                if ok and len(points) != len(vote):
                    self.error(
                        lineno,
                        cell.column,
                        "PointsLengthMismatch",
                        f"{len(points)} points for {len(vote)} projects",
                    )
                    ok = False
            elif not vote:
                points = ()
        age = None
        if "age" in row and row["age"].text:
            age = self.number(lineno, row["age"], COUNT, "age")
            ok = ok and age is not None
        if not ok:
            return False
        out.append(
            VoteRecord(
                voter_id=row["voter_id"].text,
                vote=vote,
                points=points,
                age=age,
                sex=row["sex"].text or None if "sex" in row else None,
                voting_method=row["voting_method"].text or None if "voting_method" in row else None,
                extra={k: c.text for k, c in row.items() if k not in VOTE_COLUMNS},
            )
        )
        return True

    def run(self, data: bytes) -> ParseResult:
        lines = self.decode_lines(data)
        sections = self.split_sections(lines)
        if sections is None:
            return ParseResult(None, tuple(self.diagnostics))
        meta = self.meta(*sections["META"])
        projects, project_header = self.projects(*sections["PROJECTS"])
        known = {p.project_id for p in projects} if projects is not None else None
        votes, vote_header = self.votes(*sections["VOTES"], known)
        if any(d.severity == ERROR for d in self.diagnostics):
            return ParseResult(None, tuple(self.diagnostics))
        instance = PbInstance(
            meta=meta,
            projects=tuple(projects),
            votes=tuple(votes),
            project_header=tuple(project_header),
            vote_header=tuple(vote_header),
        )
        return ParseResult(instance, tuple(self.diagnostics))


def parse(text: Union[str, bytes]) -> ParseResult:
    """Parse ``.pb`` content. Never raises on malformed input; problems are
    reported as positioned diagnostics and ``instance`` is then ``None``."""
    data = text.encode("utf-8", errors="surrogatepass") if isinstance(text, str) else bytes(text)
    return _Parser().run(data)


def parse_file(path) -> ParseResult:
    with open(path, "rb") as fh:
        return parse(fh.read())


# -- writing ------------------------------------------------------------------


def format_value(value) -> str:
    if isinstance(value, Decimal):
        return format(value, "f")
    if isinstance(value, (tuple, list)):
        return ",".join(format_value(v) for v in value)
    if isinstance(value, VoteType):
        return value.value
    return str(value)


def _line(fields) -> str:
    return "; ".join(fields).rstrip()


def _project_cell(project: Project, column: str) -> str:
    if column in PROJECT_COLUMNS:
        value = getattr(project, column)
        return "" if value is None else format_value(value)
    return project.extra.get(column, "")


def _vote_cell(vote: VoteRecord, column: str) -> str:
    if column in VOTE_COLUMNS:
        value = getattr(vote, column)
        return "" if value is None else format_value(value)
    return vote.extra.get(column, "")


def serialize_canonical(instance: PbInstance) -> str:
    """Write ``instance`` in canonical form.

    Obligatory META keys come first, then other typed keys that were given
    explicitly, then non-standard keys in their original order. Defaulted and
    infinite bounds are omitted since the parser restores them.
    """
    out = ["META", "key; value"]
    for key, value in instance.meta.explicit_items():
        if isinstance(value, Decimal) and value.is_infinite():
            continue
        out.append(_line([key, format_value(value)]))
    for key, value in instance.meta.extra.items():
        out.append(_line([key, value]))
    out.append("PROJECTS")
    out.append(_line(instance.project_header))
    for project in instance.projects:
        out.append(_line([_project_cell(project, c) for c in instance.project_header]))
    out.append("VOTES")
    out.append(_line(instance.vote_header))
    for vote in instance.votes:
        out.append(_line([_vote_cell(vote, c) for c in instance.vote_header]))
    return "\n".join(out) + "\n"
