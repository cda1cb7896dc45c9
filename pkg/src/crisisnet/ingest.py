"""Tweet and follower-edge ingestion: parsing, relevance filtering, activity counts.

Tweet files are line-delimited, either JSON objects with keys ``user_id``,
``text`` and optional ``lang`` / ``timestamp``, or TSV columns in that order.
Edge files are either ``follower_id,followee_id`` CSV rows or adjacency lines
``user_id: followee1 followee2 ...``.

Parsing is streaming and stateless per line, so inputs may be sharded by
line ranges and the resulting activity tables merged by addition.
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import InputFormatError

TWEET_FORMATS = ("jsonl", "tsv")
EDGE_FORMATS = ("csv", "adj")


@dataclass(frozen=True)
class TweetRecord:
    user_id: str
    text: str
    lang: str | None = None
    timestamp: float | None = None


@dataclass(frozen=True)
class EdgeRecord:
    follower: str
    followee: str

    @property
    def is_self_edge(self) -> bool:
        return self.follower == self.followee


@dataclass(frozen=True)
class FilterSpec:
    """Relevance filter: case-insensitive keyword substring plus language code.

    Records without a ``lang`` field are retained unless ``require_lang`` is
    set (strict mode); the keyword is matched as a substring of the
    NFC-normalized, case-folded text.
    """

    keyword: str = "sandy"
    language: str = "en"
    require_lang: bool = False

    def __post_init__(self):
        if not self.keyword:
            raise ValueError("FilterSpec.keyword must be non-empty")


@dataclass
class ParseStats:
    """Line bookkeeping for one parse pass."""

    lines: int = 0
    parsed: int = 0
    skipped: int = 0


@dataclass
class ActivityTable:
    """Per-user count of relevant tweets (activity frequency, AF >= 1)."""

    entries: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        bad = [u for u, af in self.entries.items() if af < 1]
        if bad:
            raise ValueError(f"activity table has entries with AF < 1: {bad[:3]}")

    def __len__(self) -> int:
        return len(self.entries)

    def total(self) -> int:
        """Sum of AF values; equals the number of relevant tweets counted."""
        return sum(self.entries.values())

    def merge(self, other: "ActivityTable") -> "ActivityTable":
        """Combine shard counts by addition."""
        merged = Counter(self.entries)
        merged.update(other.entries)
        return ActivityTable(dict(merged))

    def active_users(self, threshold: int) -> list[str]:
        """Users with AF >= threshold, ascending by id."""
        return sorted(u for u, af in self.entries.items() if af >= threshold)

    def to_csv(self, path: str | Path) -> None:
        """Write ``user_id,af`` rows sorted by AF descending, ties by id ascending."""
        rows = sorted(self.entries.items(), key=lambda kv: (-kv[1], kv[0]))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("user_id,af\n")
            for user, af in rows:
                fh.write(f"{user},{af}\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "ActivityTable":
        entries: dict[str, int] = {}
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().rstrip("\r\n")
            if header != "user_id,af":
                raise InputFormatError(f"{path}: expected header 'user_id,af', got {header!r}")
            for line in fh:
                line = line.rstrip("\r\n")
                if not line:
                    continue
                user, _, af = line.rpartition(",")
                if not user or not af.isdigit():
                    raise InputFormatError(f"{path}: bad activity row {line!r}")
                entries[user] = int(af)
        return cls(entries)


def _open_lines(source: str | Path | IO[str]) -> IO[str]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", errors="replace")
    return source


def _tweet_from_json(line: str) -> TweetRecord | None:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        return None
    if not isinstance(obj, dict):
        return None
    user = obj.get("user_id")
    text = obj.get("text")
    if isinstance(user, int):
        user = str(user)
    if not isinstance(user, str) or not user or not isinstance(text, str) or not text:
        return None
    lang = obj.get("lang")
    if lang is not None and not isinstance(lang, str):
        lang = None
    ts = obj.get("timestamp")
    if not isinstance(ts, (int, float)) or isinstance(ts, bool):
        ts = None
    return TweetRecord(user, text, lang, ts)


def _tweet_from_tsv(line: str) -> TweetRecord | None:
    cols = line.split("\t")
    if len(cols) < 2 or len(cols) > 4:
        return None
    user, text = cols[0], cols[1]
    if not user or not text:
        return None
    lang = cols[2] if len(cols) > 2 and cols[2] else None
    ts: float | None = None
    if len(cols) > 3 and cols[3]:
        try:
            ts = float(cols[3])
        except ValueError:
            ts = None
    return TweetRecord(user, text, lang, ts)


def parse_tweets(
    source: str | Path | IO[str],
    fmt: str = "jsonl",
    stats: ParseStats | None = None,
) -> Iterator[TweetRecord]:
    """Yield one TweetRecord per well-formed line; count and skip the rest.

    Raises InputFormatError after the stream is exhausted if more than half
    of the non-blank lines were malformed.  An unreadable source raises the
    underlying OSError.
    """
    if fmt not in TWEET_FORMATS:
        raise ValueError(f"unknown tweet format {fmt!r}; expected one of {TWEET_FORMATS}")
    make = _tweet_from_json if fmt == "jsonl" else _tweet_from_tsv
    if stats is None:
        stats = ParseStats()
    fh = _open_lines(source)
    close = isinstance(source, (str, Path))
    try:
        for raw in fh:
            line = raw.rstrip("\r\n")
            if not line:
                continue
            stats.lines += 1
            rec = make(line)
            if rec is None:
                stats.skipped += 1
            else:
                stats.parsed += 1
                yield rec
    finally:
        if close:
            fh.close()
    if stats.lines and stats.skipped * 2 > stats.lines:
        raise InputFormatError(
            f"{stats.skipped} of {stats.lines} lines malformed; wrong tweet format?"
        )


def filter_relevant(
    records: Iterable[TweetRecord], spec: FilterSpec
) -> Iterator[TweetRecord]:
    """Keep records matching the language filter whose text contains the keyword.

    Idempotent: filtering an already-filtered stream changes nothing.
    """
    needle = unicodedata.normalize("NFC", spec.keyword).casefold()
    for rec in records:
        if rec.lang is None:
            if spec.require_lang:
                continue
        elif rec.lang != spec.language:
            continue
        text = unicodedata.normalize("NFC", rec.text).casefold()
        if needle in text:
            yield rec


def compute_activity(records: Iterable[TweetRecord]) -> ActivityTable:
    """Count tweets per user; users with no records are absent from the table."""
    counts = Counter(rec.user_id for rec in records)
    return ActivityTable(dict(counts))


def _edges_from_csv(line: str) -> list[EdgeRecord]:
    follower, sep, followee = line.partition(",")
    follower = follower.strip()
    followee = followee.strip()
    if not sep or not follower or not followee or "," in followee:
        return []
    return [EdgeRecord(follower, followee)]


def _edges_from_adjacency(line: str) -> list[EdgeRecord]:
    user, sep, rest = line.partition(":")
    user = user.strip()
    if not sep or not user:
        return []
    return [EdgeRecord(user, followee) for followee in rest.split()]


def parse_edges(
    source: str | Path | IO[str],
    fmt: str = "csv",
    stats: ParseStats | None = None,
) -> Iterator[EdgeRecord]:
    """Yield (follower, followee) pairs from a CSV or adjacency-list edge file.

    Duplicate rows and self-edges are passed through; the graph builder
    drops them.  Malformed lines are counted and skipped.
    """
    if fmt not in EDGE_FORMATS:
        raise ValueError(f"unknown edge format {fmt!r}; expected one of {EDGE_FORMATS}")
    expand = _edges_from_csv if fmt == "csv" else _edges_from_adjacency
    if stats is None:
        stats = ParseStats()
    fh = _open_lines(source)
    close = isinstance(source, (str, Path))
    first = True
    try:
        for raw in fh:
            line = raw.rstrip("\r\n")
            if not line:
                continue
            if first:
                first = False
                if fmt == "csv" and line == "follower_id,followee_id":
                    continue
            stats.lines += 1
            records = expand(line)
            if records:
                stats.parsed += 1
                yield from records
            elif fmt == "adj" and line.rstrip().endswith(":"):
                # a user with zero followees is a valid adjacency row
                stats.parsed += 1
            else:
                stats.skipped += 1
    finally:
        if close:
            fh.close()
