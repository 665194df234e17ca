"""Tweet ingestion, cleaning, sentence segmentation, and per-day partitioning.

Cleaning contract, applied in order to each tweet:

1. strip URLs, emoji, and a leading ``"RT "`` marker from the raw text;
2. segment into sentences at ``.``, ``!``, ``?``, and newlines;
3. drop any sentence in which a whitespace-delimited unit starts with ``#``
   or ``@`` (the whole sentence goes, not just the token);
4. lowercase surviving sentences and tokenize on non-alphanumeric runs,
   keeping tokens of length >= 2 plus bare numerals;
5. drop sentences that end up with zero tokens.

Stopword removal is a separate, later concern: it feeds frequency reports
and keyword extraction, never the embedding input.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path

from .errors import ParseError, ValidationError

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_EMOJI_RE = re.compile(
    "["
    "\U0001f000-\U0001faff"  # symbols, pictographs, emoticons
    "\U00002600-\U000027bf"  # misc symbols, dingbats
    "\U0001f1e6-\U0001f1ff"  # regional indicators
    "\U0000fe0e-\U0000fe0f"  # variation selectors
    "\U0000200d"             # zero-width joiner
    "]+"
)
_SENTENCE_SPLIT_RE = re.compile(r"[.!?\n]+")
_TOKEN_SPLIT_RE = re.compile(r"[\W_]+", re.UNICODE)


@dataclass(frozen=True)
class Tweet:
    id: str
    timestamp: datetime
    text: str

    @property
    def day(self) -> date:
        return self.timestamp.astimezone(timezone.utc).date()


@dataclass(frozen=True)
class Sentence:
    tweet_id: str
    day: date
    ordinal: int
    raw: str
    tokens: tuple[str, ...]

    @property
    def key(self) -> tuple[str, int]:
        return (self.tweet_id, self.ordinal)

    @property
    def sentence_id(self) -> str:
        return f"{self.tweet_id}:{self.ordinal}"


@dataclass(frozen=True)
class DayPartition:
    day: date
    sentence_ids: tuple[tuple[str, int], ...]


def _parse_timestamp(value: str, where: str) -> datetime:
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except (ValueError, AttributeError, TypeError):
        raise ParseError(f"{where}: bad created_at {value!r}, expected ISO-8601")
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _make_tweet(record: dict, where: str) -> Tweet:
    for field in ("id", "created_at", "text"):
        if field not in record or record[field] is None:
            raise ParseError(f"{where}: missing field {field!r}")
    tweet_id = str(record["id"]).strip()
    if not tweet_id:
        raise ParseError(f"{where}: empty id")
    text = record["text"]
    if not isinstance(text, str):
        raise ParseError(f"{where}: text must be a string")
    return Tweet(id=tweet_id, timestamp=_parse_timestamp(record["created_at"], where), text=text)


def ingest(path: str | Path, format: str = "jsonl") -> list[Tweet]:
    """Load tweets from a JSONL or CSV file, in file order.

    JSONL records need ``id``, ``created_at`` (ISO-8601), and ``text``
    fields; CSV files need exactly that header. Duplicate ids are rejected.
    """
    path = Path(path)
    if format == "jsonl":
        tweets = _ingest_jsonl(path)
    elif format == "csv":
        tweets = _ingest_csv(path)
    else:
        raise ValueError(f"unknown ingest format {format!r}, expected 'jsonl' or 'csv'")

    seen: set[str] = set()
    for tweet in tweets:
        if tweet.id in seen:
            raise ValidationError(f"duplicate tweet id {tweet.id!r} in {path}")
        seen.add(tweet.id)
    return tweets


def _ingest_jsonl(path: Path) -> list[Tweet]:
    tweets = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{where}: invalid JSON ({exc.msg})")
            if not isinstance(record, dict):
                raise ParseError(f"{where}: expected a JSON object")
            tweets.append(_make_tweet(record, where))
    return tweets


def _ingest_csv(path: Path) -> list[Tweet]:
    tweets = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return []
        if header != ["id", "created_at", "text"]:
            raise ParseError(f"{path}:1: expected header id,created_at,text, got {header}")
        for row in reader:
            where = f"{path}:{reader.line_num}"
            if len(row) != 3:
                raise ParseError(f"{where}: expected 3 fields, got {len(row)}")
            record = dict(zip(("id", "created_at", "text"), row))
            tweets.append(_make_tweet(record, where))
    return tweets


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs; keep len>=2 tokens and numerals."""
    parts = _TOKEN_SPLIT_RE.split(text.lower())
    return [t for t in parts if t and (len(t) >= 2 or t.isdigit())]


def clean_and_segment(tweet: Tweet) -> list[Sentence]:
    """Clean one tweet and return its retained, tokenized sentences.

    An empty result is valid: tweets made only of hashtag/mention sentences,
    URLs, or punctuation clean away to nothing.
    """
    text = _URL_RE.sub(" ", tweet.text)
    text = _EMOJI_RE.sub(" ", text)

    sentences = []
    ordinal = 0
    for segment in _SENTENCE_SPLIT_RE.split(text):
        segment = segment.strip()
        if segment.startswith("RT "):
            segment = segment[3:].strip()
        if not segment:
            continue
        if any(unit.startswith(("#", "@")) for unit in segment.split()):
            continue
        tokens = tokenize(segment)
        if not tokens:
            continue
        sentences.append(
            Sentence(
                tweet_id=tweet.id,
                day=tweet.day,
                ordinal=ordinal,
                raw=segment,
                tokens=tuple(tokens),
            )
        )
        ordinal += 1
    return sentences


def clean_corpus(tweets: list[Tweet]) -> list[Sentence]:
    """clean_and_segment over a whole corpus, preserving file order."""
    out: list[Sentence] = []
    for tweet in tweets:
        out.extend(clean_and_segment(tweet))
    return out


def remove_stopwords(tokens, stoplist) -> list[str]:
    """Order-preserving stopword filter (reporting/keywords only)."""
    return [t for t in tokens if t not in stoplist]


def index_sentences(sentences: list[Sentence]) -> dict[tuple[str, int], Sentence]:
    index = {}
    for s in sentences:
        if s.key in index:
            raise ValidationError(f"duplicate sentence key {s.key}")
        index[s.key] = s
    return index


def partition_by_day(sentences: list[Sentence]) -> list[DayPartition]:
    """Group sentences into per-day partitions, dates ascending.

    Within a partition the sentence order follows the input order, which for
    a cleaned corpus is (tweet file order, sentence ordinal).
    """
    by_day: dict[date, list[tuple[str, int]]] = {}
    for s in sentences:
        by_day.setdefault(s.day, []).append(s.key)
    return [
        DayPartition(day=day, sentence_ids=tuple(keys))
        for day, keys in sorted(by_day.items(), key=lambda item: item[0])
    ]


def word_frequencies(
    partition: DayPartition,
    index: dict[tuple[str, int], Sentence],
    stoplist,
) -> list[tuple[str, int]]:
    """Token counts over the stopword-filtered partition.

    Sorted by count descending; ties broken lexicographically ascending.
    """
    counts: dict[str, int] = {}
    for key in partition.sentence_ids:
        sentence = index[key]
        if sentence.day != partition.day:
            raise ValidationError(
                f"sentence {sentence.sentence_id} has day {sentence.day}, "
                f"partition is {partition.day}"
            )
        for token in remove_stopwords(sentence.tokens, stoplist):
            counts[token] = counts.get(token, 0) + 1
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


def write_frequencies_csv(
    partitions: list[DayPartition],
    index: dict[tuple[str, int], Sentence],
    stoplist,
    path: str | Path,
    dedup_days: bool = False,
) -> None:
    """Export per-day frequencies as ``day,token,count`` rows.

    With ``dedup_days`` a token is reported only on the first day it occurs,
    mirroring the day-over-day novelty view some visualizations want.
    """
    seen: set[str] = set()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["day", "token", "count"])
        for partition in partitions:
            rows = word_frequencies(partition, index, stoplist)
            if dedup_days:
                rows = [(t, c) for t, c in rows if t not in seen]
                seen.update(t for t, _ in rows)
            for token, count in rows:
                writer.writerow([partition.day.isoformat(), token, count])


def write_sentences_tsv(sentences: list[Sentence], path: str | Path) -> None:
    """Export cleaned sentences as ``id<TAB>text`` lines for external encoders."""
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            text = s.raw.replace("\t", " ").replace("\n", " ")
            fh.write(f"{s.sentence_id}\t{text}\n")
