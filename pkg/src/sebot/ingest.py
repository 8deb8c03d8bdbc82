"""Loading user behaviour records and turning them into per-user features.

Engagement averages (``avg_*_recv``) are taken per *original* tweet, as
precomputed by whoever exported the corpus; raw tweet-level data is not read.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import unicodedata
from dataclasses import asdict, dataclass, fields
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

LABELS = ("human", "bot")

COUNT_FIELDS = ("n_original", "n_retweet", "n_comment", "n_following", "n_followers")
AVG_FIELDS = ("avg_comments_recv", "avg_likes_recv", "avg_retweets_recv")


class RecordError(ValueError):
    """A row that cannot be turned into a UserRecord."""

    def __init__(self, message: str, row: Optional[int] = None, field: Optional[str] = None):
        self.row = row
        self.field = field
        where = []
        if row is not None:
            where.append(f"row {row}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class SkipUser(ValueError):
    """Raised by extract_features for accounts with no authored posts."""


@dataclass(frozen=True)
class UserRecord:
    id: str
    n_original: int
    n_retweet: int
    n_comment: int
    avg_comments_recv: float
    avg_likes_recv: float
    avg_retweets_recv: float
    n_following: int
    n_followers: int
    truth_label: Optional[str] = None


@dataclass(frozen=True)
class BehaviorFeatures:
    pt: np.ndarray  # original / retweet / comment proportions
    inf: float
    ff: float


FIELD_NAMES = tuple(f.name for f in fields(UserRecord))


def _as_count(value, row, name) -> int:
    if isinstance(value, bool):
        raise RecordError("expected a non-negative integer", row, name)
    if isinstance(value, str):
        value = value.strip()
        try:
            value = int(value)
        except ValueError:
            try:
                as_float = float(value)
            except ValueError:
                raise RecordError(f"not a number: {value!r}", row, name) from None
            if not as_float.is_integer():
                raise RecordError(f"not an integer: {value!r}", row, name)
            value = int(as_float)
    elif isinstance(value, float):
        if not value.is_integer():
            raise RecordError(f"not an integer: {value!r}", row, name)
        value = int(value)
    elif not isinstance(value, int):
        raise RecordError(f"expected a non-negative integer, got {value!r}", row, name)
    if value < 0:
        raise RecordError("negative count", row, name)
    return value


def _as_avg(value, row, name) -> float:
    if isinstance(value, bool):
        raise RecordError("expected a number", row, name)
    try:
        out = float(value.strip() if isinstance(value, str) else value)
    except (TypeError, ValueError):
        raise RecordError(f"not a number: {value!r}", row, name) from None
    if not np.isfinite(out) or out < 0:
        raise RecordError(f"must be finite and >= 0, got {out!r}", row, name)
    return out


def record_from_mapping(obj: dict, row: int) -> UserRecord:
    """Validate one parsed row. ``row`` is 1-based and only used for messages."""
    if not isinstance(obj, dict):
        raise RecordError("expected an object", row)
    for name in FIELD_NAMES:
        if name == "truth_label":
            continue
        if name not in obj or obj[name] is None or obj[name] == "":
            raise RecordError("missing mandatory field", row, name)
    uid = obj["id"]
    if not isinstance(uid, str):
        if isinstance(uid, int) and not isinstance(uid, bool):
            uid = str(uid)
        else:
            raise RecordError(f"id must be a string, got {uid!r}", row, "id")

    label = obj.get("truth_label")
    if label == "" or label is None:
        label = None
    elif label not in LABELS:
        raise RecordError(f"truth_label must be one of {LABELS}, got {label!r}", row, "truth_label")

    values = {name: _as_count(obj[name], row, name) for name in COUNT_FIELDS}
    values.update({name: _as_avg(obj[name], row, name) for name in AVG_FIELDS})
    return UserRecord(id=uid, truth_label=label, **values)


def _rows_jsonl(text: str) -> Iterator[tuple[int, dict]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordError(f"invalid JSON ({exc.msg})", lineno) from None


def _rows_csv(text: str) -> Iterator[tuple[int, dict]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return
    # row numbers count the header as line 1
    for row in reader:
        if None in row:
            raise RecordError("too many cells", reader.line_num)
        yield reader.line_num, row


def parse_user_records(source: Union[bytes, str, IO], format: str = "jsonl") -> list[UserRecord]:
    """Parse JSONL or CSV user records, keeping input order.

    Raises RecordError on the first malformed row or duplicate id.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise RecordError(f"input is not valid UTF-8 ({exc.reason})") from None
    if format == "jsonl":
        rows = _rows_jsonl(source)
    elif format == "csv":
        rows = _rows_csv(source)
    else:
        raise ValueError(f"unknown format {format!r}")

    records: list[UserRecord] = []
    seen: dict[str, int] = {}
    for lineno, obj in rows:
        rec = record_from_mapping(obj, lineno)
        if rec.id in seen:
            raise RecordError(f"duplicate id {rec.id!r} (first seen at row {seen[rec.id]})", lineno, "id")
        seen[rec.id] = lineno
        records.append(rec)
    return records


def serialize_records(records: Iterable[UserRecord], format: str = "jsonl") -> str:
    if format == "jsonl":
        lines = []
        for r in records:
            obj = asdict(r)
            if obj["truth_label"] is None:
                del obj["truth_label"]
            lines.append(json.dumps(obj))
        return "".join(line + "\n" for line in lines)
    if format == "csv":
        for r in records:
            if any(unicodedata.category(ch) == "Cc" for ch in r.id):
                raise ValueError(f"id {r.id!r} has control characters; use jsonl")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=FIELD_NAMES, lineterminator="\n")
        writer.writeheader()
        for r in records:
            obj = asdict(r)
            obj["truth_label"] = obj["truth_label"] or ""
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in obj.items()})
        return buf.getvalue()
    raise ValueError(f"unknown format {format!r}")


def extract_features(r: UserRecord) -> BehaviorFeatures:
    total = r.n_original + r.n_retweet + r.n_comment
    if total == 0:
        raise SkipUser(f"user {r.id!r} has no authored posts")
    pt = np.array([r.n_original, r.n_retweet, r.n_comment], dtype=float) / total
    inf = r.avg_comments_recv + r.avg_likes_recv + r.avg_retweets_recv
    ff = (r.n_following + 1) / (r.n_followers + 1)
    return BehaviorFeatures(pt=pt, inf=float(inf), ff=float(ff))


def features_for(records: Sequence[UserRecord]) -> tuple[list[UserRecord], list[BehaviorFeatures]]:
    """Extract features, dropping (and logging) users without posts."""
    kept, feats = [], []
    for r in records:
        try:
            f = extract_features(r)
        except SkipUser as exc:
            logger.warning("skipping %s", exc)
            continue
        kept.append(r)
        feats.append(f)
    return kept, feats
