import csv
import json
from datetime import datetime, timezone

import pytest

from daytopics import (
    ParseError,
    Tweet,
    ValidationError,
    clean_and_segment,
    clean_corpus,
    index_sentences,
    ingest,
    partition_by_day,
    remove_stopwords,
    word_frequencies,
)
from daytopics.corpus import write_frequencies_csv, write_sentences_tsv
from daytopics.stopwords import ENGLISH_STOPWORDS


def _tweet(text, tid="t1", ts="2020-03-29T10:00:00+00:00"):
    return Tweet(id=tid, timestamp=datetime.fromisoformat(ts), text=text)


def _write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")


class TestIngest:
    def test_jsonl_in_order(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        _write_jsonl(
            path,
            [
                {"id": "a", "created_at": "2020-03-29T00:00:00Z", "text": "one"},
                {"id": "b", "created_at": "2020-03-30T00:00:00Z", "text": "two"},
                {"id": "c", "created_at": "2020-03-31T00:00:00Z", "text": "three"},
            ],
        )
        tweets = ingest(path, "jsonl")
        assert [t.id for t in tweets] == ["a", "b", "c"]
        assert tweets[0].timestamp.tzinfo is not None

    def test_empty_file(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        path.write_text("")
        assert ingest(path, "jsonl") == []

    def test_missing_text_names_line(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        _write_jsonl(
            path,
            [
                {"id": "a", "created_at": "2020-03-29T00:00:00Z", "text": "fine"},
                {"id": "b", "created_at": "2020-03-29T00:00:00Z"},
            ],
        )
        with pytest.raises(ParseError, match=r":2"):
            ingest(path, "jsonl")

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        _write_jsonl(
            path,
            [
                {"id": "a", "created_at": "2020-03-29T00:00:00Z", "text": "x"},
                {"id": "a", "created_at": "2020-03-29T00:00:00Z", "text": "y"},
            ],
        )
        with pytest.raises(ValidationError, match="duplicate"):
            ingest(path, "jsonl")

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "tweets.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "created_at", "text"])
            writer.writerow(["a", "2020-03-29T01:00:00+00:00", 'hello, "world"'])
        tweets = ingest(path, "csv")
        assert tweets[0].text == 'hello, "world"'

    def test_csv_bad_header(self, tmp_path):
        path = tmp_path / "tweets.csv"
        path.write_text("id,time,text\na,2020-03-29,x\n")
        with pytest.raises(ParseError, match="header"):
            ingest(path, "csv")

    def test_bad_timestamp(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        _write_jsonl(path, [{"id": "a", "created_at": "yesterday", "text": "x"}])
        with pytest.raises(ParseError, match="created_at"):
            ingest(path, "jsonl")


class TestCleanAndSegment:
    def test_hashtag_sentence_dropped(self):
        sentences = clean_and_segment(_tweet("Stay home! #covid19 is real"))
        assert len(sentences) == 1
        assert list(sentences[0].tokens) == ["stay", "home"]

    def test_empty_text(self):
        assert clean_and_segment(_tweet("")) == []

    def test_two_sentences(self):
        sentences = clean_and_segment(_tweet("Stay home. Wash hands."))
        assert [list(s.tokens) for s in sentences] == [["stay", "home"], ["wash", "hands"]]
        assert [s.ordinal for s in sentences] == [0, 1]

    def test_mention_sentence_dropped(self):
        sentences = clean_and_segment(_tweet("@who said so. Masks work."))
        assert len(sentences) == 1
        assert list(sentences[0].tokens) == ["masks", "work"]

    def test_url_stripped_before_segmentation(self):
        sentences = clean_and_segment(_tweet("Read this https://x.co/a.b?c=1 now"))
        assert len(sentences) == 1
        assert list(sentences[0].tokens) == ["read", "this", "now"]

    def test_rt_prefix_stripped(self):
        sentences = clean_and_segment(_tweet("RT staying strong together"))
        assert list(sentences[0].tokens) == ["staying", "strong", "together"]

    def test_emoji_stripped(self):
        sentences = clean_and_segment(_tweet("so scary \U0001f637 stay safe"))
        assert list(sentences[0].tokens) == ["so", "scary", "stay", "safe"]

    def test_short_tokens_dropped_numerals_kept(self):
        sentences = clean_and_segment(_tweet("I got 5 masks a day"))
        assert list(sentences[0].tokens) == ["got", "5", "masks", "day"]

    def test_day_follows_timestamp(self):
        s = clean_and_segment(_tweet("late night", ts="2020-03-29T23:59:00+00:00"))[0]
        assert s.day.isoformat() == "2020-03-29"
        s = clean_and_segment(_tweet("offset day", ts="2020-03-30T01:30:00+02:00"))[0]
        assert s.day.isoformat() == "2020-03-29"

    def test_cleaning_idempotent_on_retained(self):
        tweets = [
            _tweet("Stay home! Wash hands, please... #tag junk"),
            _tweet("numbers 5 and 10 rising fast. RT nonsense"),
        ]
        for tweet in tweets:
            for s in clean_and_segment(tweet):
                again = clean_and_segment(_tweet(s.raw, tid=s.tweet_id))
                assert len(again) == 1
                assert again[0].tokens == s.tokens

    def test_no_marker_tokens_survive(self):
        corpus = clean_corpus(
            [
                _tweet("good stuff #yes", tid="a"),
                _tweet("hello @you. bye now", tid="b"),
                _tweet("plain text here", tid="c"),
            ]
        )
        for s in corpus:
            assert not any(t.startswith(("#", "@")) for t in s.tokens)


class TestStopwords:
    def test_filter_preserves_order(self):
        assert remove_stopwords(["the", "virus", "is", "deadly"], ENGLISH_STOPWORDS) == [
            "virus",
            "deadly",
        ]

    def test_empty(self):
        assert remove_stopwords([], ENGLISH_STOPWORDS) == []

    def test_all_stopwords(self):
        assert remove_stopwords(["the", "is", "of"], ENGLISH_STOPWORDS) == []


class TestPartition:
    def _sentences(self):
        tweets = [
            _tweet("first day words", tid="a", ts="2020-03-29T08:00:00+00:00"),
            _tweet("second day words", tid="b", ts="2020-03-30T08:00:00+00:00"),
            _tweet("third day words", tid="c", ts="2020-03-31T08:00:00+00:00"),
            _tweet("more first day", tid="d", ts="2020-03-29T09:00:00+00:00"),
        ]
        return clean_corpus(tweets)

    def test_dates_ascending(self):
        parts = partition_by_day(self._sentences())
        days = [p.day.isoformat() for p in parts]
        assert days == ["2020-03-29", "2020-03-30", "2020-03-31"]

    def test_single_day(self):
        tweets = [_tweet("alpha beta gamma", tid="a"), _tweet("delta epsilon", tid="b")]
        parts = partition_by_day(clean_corpus(tweets))
        assert len(parts) == 1
        assert len(parts[0].sentence_ids) == 2

    def test_empty(self):
        assert partition_by_day([]) == []

    def test_sizes_sum_to_total(self):
        sentences = self._sentences()
        parts = partition_by_day(sentences)
        assert sum(len(p.sentence_ids) for p in parts) == len(sentences)

    def test_order_within_partition(self):
        sentences = self._sentences()
        parts = partition_by_day(sentences)
        first = parts[0]
        assert [key[0] for key in first.sentence_ids] == ["a", "d"]


class TestWordFrequencies:
    def test_counts_and_tie_order(self):
        tweets = [_tweet("virus virus virus death death help help")]
        sentences = clean_corpus(tweets)
        part = partition_by_day(sentences)[0]
        freqs = word_frequencies(part, index_sentences(sentences), ENGLISH_STOPWORDS)
        assert freqs == [("virus", 3), ("death", 2), ("help", 2)]

    def test_empty_partition(self):
        tweets = [_tweet("the of and")]  # all stopwords
        sentences = clean_corpus(tweets)
        part = partition_by_day(sentences)[0]
        assert word_frequencies(part, index_sentences(sentences), ENGLISH_STOPWORDS) == []

    def test_brute_force_recount_on_fixture(self):
        # independent hash-map recount over a generated 1k-sentence fixture
        import numpy as np

        rng = np.random.default_rng(5)
        vocab = [f"w{i}" for i in range(50)]
        tweets = []
        for i in range(500):
            words = [vocab[int(j)] for j in rng.integers(0, 50, size=6)]
            tweets.append(_tweet(" ".join(words) + ". " + " ".join(words), tid=f"t{i}"))
        sentences = clean_corpus(tweets)
        index = index_sentences(sentences)
        part = partition_by_day(sentences)[0]

        expected = {}
        for s in sentences:
            for tok in s.tokens:
                if tok not in ENGLISH_STOPWORDS:
                    expected[tok] = expected.get(tok, 0) + 1
        result = word_frequencies(part, index, ENGLISH_STOPWORDS)
        assert dict(result) == expected
        assert sum(c for _, c in result) == sum(expected.values())
        counts = [c for _, c in result]
        assert counts == sorted(counts, reverse=True)


class TestExports:
    def test_sentences_tsv(self, tmp_path):
        sentences = clean_corpus([_tweet("stay home. wash hands")])
        path = tmp_path / "sentences.tsv"
        write_sentences_tsv(sentences, path)
        lines = path.read_text().splitlines()
        assert lines[0].split("\t") == ["t1:0", "stay home"]
        assert lines[1].split("\t") == ["t1:1", "wash hands"]

    def test_frequencies_csv_dedup(self, tmp_path):
        tweets = [
            _tweet("virus virus help", tid="a", ts="2020-03-29T01:00:00+00:00"),
            _tweet("virus death", tid="b", ts="2020-03-30T01:00:00+00:00"),
        ]
        sentences = clean_corpus(tweets)
        parts = partition_by_day(sentences)
        index = index_sentences(sentences)

        plain = tmp_path / "freq.csv"
        write_frequencies_csv(parts, index, ENGLISH_STOPWORDS, plain)
        rows = list(csv.DictReader(open(plain)))
        assert {(r["day"], r["token"]) for r in rows} == {
            ("2020-03-29", "virus"),
            ("2020-03-29", "help"),
            ("2020-03-30", "virus"),
            ("2020-03-30", "death"),
        }

        dedup = tmp_path / "freq_dedup.csv"
        write_frequencies_csv(parts, index, ENGLISH_STOPWORDS, dedup, dedup_days=True)
        rows = list(csv.DictReader(open(dedup)))
        assert {(r["day"], r["token"]) for r in rows} == {
            ("2020-03-29", "virus"),
            ("2020-03-29", "help"),
            ("2020-03-30", "death"),
        }
