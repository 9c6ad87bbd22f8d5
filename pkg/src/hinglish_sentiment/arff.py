"""Dense ARFF reading and writing.

Only ``numeric``, ``string`` and nominal attributes are supported.  String
values are always written single-quoted; the reader accepts single-quoted,
double-quoted and bare values.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

from .corpus import Sentiment, TextRow
from .errors import (
    ArityMismatch,
    BadAttributeDeclaration,
    BadValue,
    MissingData,
    MissingRelation,
    NominalValueUnknown,
    RowArityMismatch,
    SinkWriteFailure,
    UnquotedComma,
)

NUMERIC = "numeric"
STRING = "string"
NOMINAL = "nominal"

MISSING = None

Value = Union[int, float, str, None]

_NEEDS_QUOTES = set(" \t,{}'\"%\\")
_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"n": "\n", "r": "\r", "t": "\t"}


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str
    values: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (NUMERIC, STRING, NOMINAL):
            raise BadAttributeDeclaration(f"unsupported attribute kind {self.kind!r}")
        if self.kind == NOMINAL:
            if not self.values:
                raise BadAttributeDeclaration(f"nominal attribute {self.name!r} has no values")
            if len(set(self.values)) != len(self.values):
                raise BadAttributeDeclaration(f"nominal attribute {self.name!r} repeats a value")
        elif self.values:
            raise BadAttributeDeclaration(f"{self.kind} attribute {self.name!r} cannot list values")


@dataclass(frozen=True)
class ArffHeader:
    relation: str
    attributes: tuple[Attribute, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise BadAttributeDeclaration("attribute names must be unique")


TWEET_HEADER = ArffHeader(
    "twitter",
    (
        Attribute("id", NUMERIC),
        Attribute("tweet", STRING),
        Attribute("subtask_a", NOMINAL, ("neutral", "negative", "positive")),
    ),
)


def tweet_rows(rows: Iterable[TextRow]) -> list[tuple[Value, ...]]:
    return [(r.uid, r.text, r.sentiment.value if r.sentiment else MISSING) for r in rows]


def text_rows_from_arff(header: ArffHeader, rows: Sequence[Sequence[Value]]) -> list[TextRow]:
    """Convert rows of the tweet schema back into ``TextRow`` objects."""
    if [(a.name, a.kind) for a in header.attributes] != [
        (a.name, a.kind) for a in TWEET_HEADER.attributes
    ]:
        raise BadAttributeDeclaration("ARFF file does not use the id/tweet/subtask_a schema")
    out = []
    for uid, text, label in rows:
        if not isinstance(uid, int) or uid < 0:
            raise BadValue(f"id {uid!r} is not an unsigned integer")
        sentiment = Sentiment(label) if label is not None else None
        out.append(TextRow(uid, sentiment, text if text is not None else ""))
    return out


# -- writing ------------------------------------------------------------------

def quote(text: str) -> str:
    return "'" + "".join(_ESCAPES.get(c, c) for c in text) + "'"


def _maybe_quote(text: str) -> str:
    if text == "" or text == "?" or any(c in _NEEDS_QUOTES or c.isspace() for c in text):
        return quote(text)
    return text


def format_number(x: Union[int, float]) -> str:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise BadValue(f"{x!r} is not numeric")
    if isinstance(x, int):
        return str(x)
    if not math.isfinite(x):
        raise BadValue(f"{x!r} cannot be written to ARFF")
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _format_value(attr: Attribute, value: Value) -> str:
    if value is MISSING:
        return "?"
    if attr.kind == NUMERIC:
        return format_number(value)
    if not isinstance(value, str):
        raise BadValue(f"attribute {attr.name!r} expects text, got {value!r}")
    if attr.kind == STRING:
        return quote(value)
    if value not in attr.values:
        raise NominalValueUnknown(f"{value!r} is not declared for attribute {attr.name!r}")
    return _maybe_quote(value)


def format_header(header: ArffHeader) -> str:
    lines = [f"@relation {_maybe_quote(header.relation)}"]
    for attr in header.attributes:
        if attr.kind == NOMINAL:
            kind = "{" + ", ".join(_maybe_quote(v) for v in attr.values) + "}"
        else:
            kind = attr.kind
        lines.append(f"@attribute {_maybe_quote(attr.name)} {kind}")
    lines.append("@data")
    return "\n".join(lines) + "\n"


def format_arff(header: ArffHeader, rows: Iterable[Sequence[Value]]) -> str:
    parts = [format_header(header)]
    n = len(header.attributes)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ArityMismatch(f"row {i} has {len(row)} values, header declares {n}")
        parts.append(",".join(_format_value(a, v) for a, v in zip(header.attributes, row)) + "\n")
    return "".join(parts)


def write_arff(header: ArffHeader, rows: Iterable[Sequence[Value]], sink) -> int:
    """Write an ARFF file to ``sink`` (a path or a writable stream).

    Returns the number of bytes written (UTF-8).
    """
    text = format_arff(header, rows)
    data = text.encode("utf-8")
    try:
        if isinstance(sink, (str, os.PathLike)):
            Path(sink).write_bytes(data)
        elif isinstance(sink, io.TextIOBase):
            sink.write(text)
        else:
            sink.write(data)
    except OSError as exc:
        raise SinkWriteFailure(str(exc)) from exc
    return len(data)


# -- parsing ------------------------------------------------------------------

def _scan(line: str, pos: int, stops: str) -> tuple[str, int, bool]:
    """Read one token starting at ``pos``; return (token, next position, quoted)."""
    n = len(line)
    while pos < n and line[pos] in " \t":
        pos += 1
    if pos < n and line[pos] in "'\"":
        q = line[pos]
        pos += 1
        buf = []
        while pos < n:
            c = line[pos]
            if c == "\\" and pos + 1 < n:
                nxt = line[pos + 1]
                buf.append(_UNESCAPES.get(nxt, nxt))
                pos += 2
                continue
            if c == q:
                return "".join(buf), pos + 1, True
            buf.append(c)
            pos += 1
        raise BadValue(f"unterminated quote in {line!r}")
    start = pos
    while pos < n and line[pos] not in stops:
        pos += 1
    return line[start:pos].strip(), pos, False


def _skip_ws(line: str, pos: int) -> int:
    while pos < len(line) and line[pos] in " \t":
        pos += 1
    return pos


def _parse_nominal(spec: str, line: str) -> tuple[str, ...]:
    if not spec.endswith("}"):
        raise BadAttributeDeclaration(f"unterminated value list: {line!r}")
    body = spec[1:-1]
    values = []
    pos = 0
    while True:
        tok, pos, quoted = _scan(body, pos, ",")
        if not tok and not quoted:
            raise BadAttributeDeclaration(f"empty nominal value in {line!r}")
        values.append(tok)
        pos = _skip_ws(body, pos)
        if pos >= len(body):
            break
        if body[pos] != ",":
            raise BadAttributeDeclaration(f"bad nominal value list: {line!r}")
        pos += 1
    return tuple(values)


def _parse_attribute(line: str) -> Attribute:
    rest = line[len("@attribute"):]
    try:
        name, pos, quoted = _scan(rest, 0, " \t")
    except BadValue as exc:
        raise BadAttributeDeclaration(str(exc)) from None
    if not name and not quoted:
        raise BadAttributeDeclaration(f"attribute without a name: {line!r}")
    spec = rest[pos:].strip()
    if not spec:
        raise BadAttributeDeclaration(f"attribute {name!r} has no type: {line!r}")
    if spec.startswith("{"):
        try:
            return Attribute(name, NOMINAL, _parse_nominal(spec, line))
        except BadValue as exc:
            raise BadAttributeDeclaration(str(exc)) from None
    kind = spec.lower()
    if kind in ("numeric", "real", "integer"):
        return Attribute(name, NUMERIC)
    if kind == STRING:
        return Attribute(name, STRING)
    raise BadAttributeDeclaration(f"unsupported attribute type {spec!r}")


def _parse_number(token: str) -> Union[int, float]:
    try:
        return int(token)
    except ValueError:
        pass
    try:
        x = float(token)
    except ValueError:
        raise BadValue(f"{token!r} is not numeric") from None
    if not math.isfinite(x):
        raise BadValue(f"{token!r} is not a finite number")
    return x


def _parse_row(line: str, header: ArffHeader, lineno: int) -> tuple[Value, ...]:
    if line.lstrip().startswith("{"):
        raise BadValue(f"line {lineno}: sparse rows are not supported")
    values: list[Value] = []
    attrs = header.attributes
    pos = 0
    while True:
        tok, pos, quoted = _scan(line, pos, ",")
        if not quoted and tok == "":
            raise UnquotedComma(f"line {lineno}: empty unquoted value")
        if len(values) >= len(attrs):
            raise RowArityMismatch(f"line {lineno}: more values than attributes")
        attr = attrs[len(values)]
        if not quoted and tok == "?":
            values.append(MISSING)
        elif attr.kind == NUMERIC:
            values.append(_parse_number(tok))
        elif attr.kind == NOMINAL:
            if tok not in attr.values:
                raise NominalValueUnknown(f"line {lineno}: {tok!r} not declared for {attr.name!r}")
            values.append(tok)
        else:
            values.append(tok)
        pos = _skip_ws(line, pos)
        if pos >= len(line):
            break
        if line[pos] != ",":
            raise BadValue(f"line {lineno}: junk after value: {line[pos:]!r}")
        pos += 1
    if len(values) != len(attrs):
        raise RowArityMismatch(f"line {lineno}: {len(values)} values, expected {len(attrs)}")
    return tuple(values)


def parse_arff_lines(lines: Iterable[str]) -> tuple[ArffHeader, list[tuple[Value, ...]]]:
    relation = None
    attributes: list[Attribute] = []
    header = None
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        if header is not None:
            rows.append(_parse_row(line, header, lineno))
            continue
        keyword = stripped.split(None, 1)[0].lower()
        if keyword == "@relation":
            try:
                relation, _, quoted = _scan(stripped[len("@relation"):], 0, " \t")
            except BadValue as exc:
                raise MissingRelation(str(exc)) from None
            if not relation and not quoted:
                raise MissingRelation(f"line {lineno}: @relation without a name")
        elif keyword == "@attribute":
            if relation is None:
                raise MissingRelation(f"line {lineno}: @attribute before @relation")
            attributes.append(_parse_attribute(stripped))
        elif keyword == "@data":
            if relation is None:
                raise MissingRelation("no @relation declaration")
            header = ArffHeader(relation, tuple(attributes))
        else:
            raise BadAttributeDeclaration(f"line {lineno}: unexpected header line {stripped!r}")
    if relation is None:
        raise MissingRelation("no @relation declaration")
    if header is None:
        raise MissingData("no @data section")
    return header, rows


def loads_arff(text: str) -> tuple[ArffHeader, list[tuple[Value, ...]]]:
    return parse_arff_lines(text.split("\n"))


def parse_arff(source: Union[str, os.PathLike, IO[str]]) -> tuple[ArffHeader, list[tuple[Value, ...]]]:
    """Parse an ARFF file given as a path or an open text stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            return parse_arff_lines(fh)
    return parse_arff_lines(source)

