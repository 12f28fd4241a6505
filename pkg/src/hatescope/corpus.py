"""Loading labeled text corpora from CSV/JSONL files, plus activity timelines."""

from __future__ import annotations

import csv
import io
import json
import re
import statistics
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Iterator, Sequence, Union

from hatescope.errors import DataError, ParameterError

Column = Union[str, int]

JSONL_KEYS = ("id", "text", "label", "timestamp", "source", "lang")

_RFC3339 = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})[Tt ](\d{2}):(\d{2}):(\d{2})(\.\d+)?"
    r"([Zz]|[+-]\d{2}:\d{2})$"
)
_DATE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: str | None = None
    timestamp: datetime | None = None
    source: str | None = None
    lang: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "label": self.label,
            "timestamp": format_timestamp(self.timestamp) if self.timestamp else None,
            "source": self.source,
            "lang": self.lang,
        }


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        seen = set()
        for doc in self.documents:
            if not doc.id:
                raise DataError("document id must be non-empty")
            if doc.id in seen:
                raise DataError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    @property
    def label_set(self) -> frozenset[str]:
        return frozenset(d.label for d in self.documents if d.label is not None)

    @property
    def texts(self) -> list[str]:
        return [d.text for d in self.documents]

    @classmethod
    def from_texts(cls, texts: Sequence[str], labels: Sequence[str] | None = None) -> "Corpus":
        """Build an in-memory corpus with ids "1", "2", ..."""
        labels = labels if labels is not None else [None] * len(texts)
        return cls(tuple(Document(str(i + 1), t, lab) for i, (t, lab) in enumerate(zip(texts, labels))))

    def to_jsonl(self) -> str:
        """Serialize as JSONL, one object per document, keys in fixed order."""
        return "".join(json.dumps(d.to_dict(), ensure_ascii=False) + "\n" for d in self.documents)


@dataclass(frozen=True)
class ColumnMapping:
    """Where each Document field lives in a record.

    Columns are header names or zero-based indices (CSV), or object keys
    (JSONL). ``label_prefixes`` drops records whose label does not start with
    one of the prefixes, like the ``r[8].startswith(('left', 'right'))`` idiom.
    """

    text: Column = "text"
    id: Column | None = "id"
    label: Column | None = "label"
    timestamp: Column | None = "timestamp"
    source: Column | None = "source"
    lang: Column | None = "lang"
    header: bool = True
    label_prefixes: tuple[str, ...] | None = None
    allow_empty: bool = False

    @classmethod
    def indexed(cls, text: int, label: int | None = None, **kw) -> "ColumnMapping":
        """Mapping by column index with every other field unset."""
        base = dict(id=None, label=label, timestamp=None, source=None, lang=None)
        base.update(kw)
        return cls(text=text, **base)


@dataclass(frozen=True)
class Timeline:
    buckets: tuple[tuple[str, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "buckets", tuple((str(k), int(c)) for k, c in self.buckets))
        keys = [k for k, _ in self.buckets]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise ParameterError("timeline keys must be strictly increasing")
        if any(c < 0 for _, c in self.buckets):
            raise ParameterError("timeline counts must be non-negative")

    def __len__(self):
        return len(self.buckets)

    def __iter__(self):
        return iter(self.buckets)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.buckets)

    def to_list(self) -> list[dict]:
        return [{"period": k, "count": c} for k, c in self.buckets]


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 date-time or a bare ``YYYY-MM-DD`` date into UTC."""
    value = value.strip()
    m = _DATE.match(value)
    if m:
        return datetime(*map(int, m.groups()), tzinfo=timezone.utc)
    m = _RFC3339.match(value)
    if not m:
        raise ValueError(f"unrecognized timestamp {value!r}")
    y, mo, d, h, mi, s, frac, off = m.groups()
    micro = int(round(float(frac) * 1e6)) if frac else 0
    if off in ("Z", "z"):
        tz = timezone.utc
    else:
        sign = 1 if off[0] == "+" else -1
        tz = timezone(sign * timedelta(hours=int(off[1:3]), minutes=int(off[4:6])))
    dt = datetime(int(y), int(mo), int(d), int(h), int(mi), int(s), min(micro, 999999), tzinfo=tz)
    return dt.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    ts = ts.astimezone(timezone.utc)
    if ts.microsecond:
        return ts.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return ts.strftime("%Y-%m-%dT%H:%M:%SZ")


def _keep(label, prefixes) -> bool:
    if not prefixes:
        return True
    return label is not None and label.startswith(tuple(prefixes))


def _build(fields: dict, line: int, mapping: ColumnMapping) -> Document | None:
    text = fields.get("text")
    if text is None:
        raise DataError("missing text field", line)
    if not isinstance(text, str):
        raise DataError("text must be a string", line)
    label = fields.get("label")
    if not _keep(label, mapping.label_prefixes):
        return None
    if text == "" and not mapping.allow_empty:
        raise DataError("empty text", line)
    ts = fields.get("timestamp")
    if ts in (None, ""):
        ts = None
    else:
        try:
            ts = parse_timestamp(str(ts))
        except ValueError as exc:
            raise DataError(str(exc), line) from None
    doc_id = fields.get("id")
    doc_id = str(line) if doc_id in (None, "") else str(doc_id)

    def opt(key):
        v = fields.get(key)
        return None if v in (None, "") else str(v)

    return Document(doc_id, text, opt("label"), ts, opt("source"), opt("lang"))


def _resolve(col: Column | None, header: list[str] | None, line: int) -> int | None:
    if col is None:
        return None
    if isinstance(col, int):
        return col
    if header is None:
        raise DataError(f"column {col!r} given by name but the file has no header", line)
    try:
        return header.index(col)
    except ValueError:
        return None


def _iter_csv(stream, mapping: ColumnMapping):
    reader = csv.reader(stream, delimiter=",", quotechar='"', doublequote=True, strict=True)
    header = None
    width = None
    cols = None
    try:
        for row in reader:
            line = reader.line_num
            if header is None and mapping.header and cols is None:
                header = row
                width = len(row)
                cols = _csv_columns(mapping, header, line)
                continue
            if cols is None:
                cols = _csv_columns(mapping, None, line)
            if not row:
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DataError(f"expected {width} columns, got {len(row)}", line)
            fields = {}
            for name, idx in cols.items():
                if idx is None:
                    continue
                if idx >= len(row):
                    raise DataError(f"column index {idx} out of range", line)
                fields[name] = row[idx]
            yield line, fields
    except csv.Error as exc:
        raise DataError(f"malformed CSV: {exc}", reader.line_num) from None


def _csv_columns(mapping: ColumnMapping, header, line) -> dict[str, int | None]:
    cols = {}
    for name in JSONL_KEYS:
        col = getattr(mapping, name)
        idx = _resolve(col, header, line)
        if name == "text" and idx is None:
            raise DataError(f"text column {col!r} not found", line)
        cols[name] = idx
    return cols


def _iter_jsonl(stream, mapping: ColumnMapping):
    for line, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid JSON: {exc.msg}", line) from None
        if not isinstance(obj, dict):
            raise DataError("expected a JSON object", line)
        fields = {}
        for name in JSONL_KEYS:
            key = getattr(mapping, name)
            if key is None:
                continue
            value = obj.get(key) if isinstance(key, str) else None
            if value is not None and name != "text" and not isinstance(value, str):
                value = str(value)
            fields[name] = value
        yield line, fields


def read_corpus(stream, format: str = "jsonl", mapping: ColumnMapping | None = None) -> Corpus:
    """Like :func:`load_corpus`, over an already-open text stream."""
    mapping = mapping or ColumnMapping()
    if format == "csv":
        records = _iter_csv(stream, mapping)
    elif format == "jsonl":
        records = _iter_jsonl(stream, mapping)
    else:
        raise ParameterError(f"unknown corpus format {format!r}")
    docs = []
    seen = {}
    for line, fields in records:
        doc = _build(fields, line, mapping)
        if doc is None:
            continue
        if doc.id in seen:
            raise DataError(f"duplicate id {doc.id!r} (first seen on line {seen[doc.id]})", line)
        seen[doc.id] = line
        docs.append(doc)
    return Corpus(tuple(docs))


def load_corpus(path, format: str | None = None, mapping: ColumnMapping | None = None) -> Corpus:
    """Load a corpus file.

    Args:
        path: CSV or JSONL file, UTF-8 encoded.
        format: ``"csv"`` or ``"jsonl"``; guessed from the extension when None.
        mapping: field locations; defaults to the standard JSONL keys
            (or CSV header names).

    Raises:
        OSError: the file cannot be read.
        DataError: a record is malformed; the message names the line.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() in (".csv", ".tsv") else "jsonl"
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        line = raw[: exc.start].count(b"\n") + 1
        raise DataError("file is not valid UTF-8", line) from None
    return read_corpus(io.StringIO(text, newline=""), format, mapping)


def _month_key(d: date) -> str:
    return f"{d.year:04d}-{d.month:02d}"


def monthly_timeline(corpus: Corpus) -> Timeline:
    """Documents per calendar month, zero-filled between first and last month."""
    stamps = [d.timestamp for d in corpus if d.timestamp is not None]
    if not stamps:
        return Timeline()
    counts: dict[str, int] = {}
    for ts in stamps:
        key = _month_key(ts)
        counts[key] = counts.get(key, 0) + 1
    lo, hi = min(stamps), max(stamps)
    y, m = lo.year, lo.month
    buckets = []
    while (y, m) <= (hi.year, hi.month):
        key = f"{y:04d}-{m:02d}"
        buckets.append((key, counts.get(key, 0)))
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    return Timeline(tuple(buckets))


def daily_timeline(corpus: Corpus) -> Timeline:
    """Documents per UTC day, zero-filled between first and last day."""
    days = [d.timestamp.date() for d in corpus if d.timestamp is not None]
    if not days:
        return Timeline()
    counts: dict[date, int] = {}
    for d in days:
        counts[d] = counts.get(d, 0) + 1
    lo, hi = min(days), max(days)
    buckets = []
    while lo <= hi:
        buckets.append((lo.isoformat(), counts.get(lo, 0)))
        lo += timedelta(days=1)
    return Timeline(tuple(buckets))


def detect_spikes(daily: Timeline, factor: float = 3.0) -> list[tuple[str, int, float]]:
    """Days whose count reaches ``factor`` times the median of the other days
    in the same calendar month.

    When that median is 0, any day with a positive count is flagged.
    Returns ``(day, count, baseline)`` triples in timeline order.
    """
    if not factor > 0:
        raise ParameterError("factor must be positive")
    if len(daily) < 2:
        return []
    by_month: dict[str, list[tuple[str, int]]] = {}
    for key, count in daily:
        by_month.setdefault(key[:7], []).append((key, count))
    spikes = []
    for key, count in daily:
        month = by_month[key[:7]]
        others = [c for k, c in month if k != key]
        if not others:
            continue
        baseline = statistics.median(others)
        if baseline == 0:
            if count > 0:
                spikes.append((key, count, float(baseline)))
        elif count >= factor * baseline:
            spikes.append((key, count, float(baseline)))
    return spikes
