import dataclasses
import json
from datetime import date
from pathlib import Path

import numpy as np
import pytest

import synthcorpus
from daytopics import (
    ConfigError,
    RunConfig,
    StageError,
    evaluate_run,
    load_external,
    parse_config,
    reservoir_sample,
    run_baseline,
    run_pipeline,
    write_emb1,
)
from daytopics.cli import main as cli_main
from daytopics.corpus import clean_corpus, ingest
from daytopics.encoders import EncoderSpec, encode_sentences
from daytopics.pipeline import LDA_STAGES, PIPELINE_STAGES


@pytest.fixture(scope="module")
def small_corpus(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("corpus")
    records, gold = synthcorpus.generate(
        n_days=2, tweets_per_day=120, filler_pool_size=80, seed=515
    )
    synthcorpus.write_corpus(records, tmp / "tweets.jsonl")
    synthcorpus.write_gold(gold, tmp / "gold.json")
    return tmp


def _config(small_corpus, out, **kwargs):
    defaults = dict(
        input=str(small_corpus / "tweets.jsonl"),
        out=str(out),
        k=8,
        top_clusters=6,
        seed=1,
    )
    defaults.update(kwargs)
    return RunConfig(**defaults)


class TestConfig:
    def test_defaults_match_reference_hyperparameters(self):
        config = RunConfig()
        d = config.to_dict()
        assert d["k"] == 30
        assert d["max_iter"] == 300
        assert d["dim"] == 512
        assert d["word_cap"] == 20
        assert d["metric_k"] == 10

    def test_parse_round_trip(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text(
            "# a comment\n"
            "input = tweets.jsonl\n"
            "format = jsonl\n"
            "k = 12\n"
            "tol = 1e-3\n"
            "ngram_orders = 1,2\n"
            "dedup_days = true\n"
            "days = 2020-03-29..2020-03-30\n"
        )
        config = parse_config(path)
        assert config.input == "tweets.jsonl"
        assert config.k == 12
        assert config.tol == pytest.approx(1e-3)
        assert config.ngram_orders == (1, 2)
        assert config.dedup_days is True

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("clusters = 30\n")
        with pytest.raises(ConfigError, match="unknown config key"):
            parse_config(path)

    def test_bad_value_rejected(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("k = lots\n")
        with pytest.raises(ConfigError, match="bad value"):
            parse_config(path)

    def test_min_size_rule(self):
        config = RunConfig()
        assert config.effective_min_size(100) == 5
        assert config.effective_min_size(4000) == 20
        assert dataclasses.replace(config, min_size=3).effective_min_size(4000) == 3


class TestReservoirSample:
    def test_deterministic_and_ordered(self):
        items = list(range(100))
        a = reservoir_sample(items, 0.2, seed=5)
        b = reservoir_sample(items, 0.2, seed=5)
        assert a == b
        assert len(a) == 20
        assert a == sorted(a)

    def test_full_fraction(self):
        assert reservoir_sample([1, 2, 3], 1.0, seed=0) == [1, 2, 3]

    def test_empty(self):
        assert reservoir_sample([], 0.5, seed=0) == []

    def test_fraction_validation(self):
        with pytest.raises(ValueError):
            reservoir_sample([1], 0.0, seed=0)
        with pytest.raises(ValueError):
            reservoir_sample([1], 1.5, seed=0)


class TestRunPipeline:
    def test_fixture_run_produces_artifacts(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "run")
        manifest = run_pipeline(config)
        assert len(manifest.days) == 2
        assert manifest.method == "builtin"
        assert manifest.stages == PIPELINE_STAGES
        out = Path(config.out)
        for name in ("manifest.json", "sentences.tsv", "frequencies.csv", "summaries.json"):
            assert (out / name).exists()
        for day in ("2020-03-29", "2020-03-30"):
            assert (out / "clusters" / f"{day}.json").exists()
            assert (out / "assignments" / f"{day}.csv").exists()
            assert (out / "projection" / f"{day}.tsv").exists()

        summaries = json.loads((out / "summaries.json").read_text())
        assert summaries
        days = {s["day"] for s in summaries}
        assert days == {"2020-03-29", "2020-03-30"}
        for s in summaries:
            assert s["keywords"]
            assert s["word_count"] <= config.word_cap or s["truncated"]

    def test_counts_reconcile(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "run")
        manifest = run_pipeline(config)
        out = Path(config.out)
        for day_entry in manifest.days:
            clusters = json.loads((out / "clusters" / f"{day_entry['day']}.json").read_text())
            assert sum(clusters["sizes"]) == day_entry["sentences"]
            assert day_entry["sentences"] <= day_entry["tweets"] * 3
            survivors = sum(1 for s in clusters["sizes"] if s > 0)
            assert survivors == day_entry["clusters_after"]

    def test_empty_input(self, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        config = RunConfig(input=str(empty), out=str(tmp_path / "out"), k=5)
        manifest = run_pipeline(config)
        assert manifest.days == []
        assert manifest.warnings
        assert (tmp_path / "out" / "manifest.json").exists()

    def test_k_too_large_names_stage_and_day(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "run", k=10_000)
        with pytest.raises(StageError) as err:
            run_pipeline(config)
        assert err.value.stage == "cluster"
        assert "2020-03-29" in str(err.value)
        manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
        assert manifest["partial"] is True
        assert manifest["failed_stage"] == "cluster"

    def test_determinism_byte_identical(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "run")
        run_pipeline(config)
        out = Path(config.out)
        files = sorted(p for p in out.rglob("*") if p.is_file())
        first = {p: p.read_bytes() for p in files}

        run_pipeline(config)
        for p, data in first.items():
            if p.name == "manifest.json":
                a = json.loads(data)
                b = json.loads(p.read_bytes())
                a.pop("timings"), b.pop("timings")
                assert a == b
            else:
                assert p.read_bytes() == data, f"{p} changed between runs"

    def test_days_filter(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "run", days="2020-03-30..2020-03-30")
        manifest = run_pipeline(config)
        assert [d["day"] for d in manifest.days] == ["2020-03-30"]

    def test_sample_flag(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "run", sample=0.5, k=5)
        manifest = run_pipeline(config)
        total_tweets = sum(d["tweets"] for d in manifest.days)
        assert total_tweets == 120  # half of 240, in file order

    def test_inline_eval(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "run", gold=str(small_corpus / "gold.json"))
        manifest = run_pipeline(config)
        assert "eval" in manifest.artifacts
        assert (tmp_path / "run" / "eval.csv").exists()


class TestExternalEncoder:
    def test_external_matches_builtin_rows(self, small_corpus, tmp_path):
        tweets = ingest(small_corpus / "tweets.jsonl", "jsonl")
        sentences = clean_corpus(tweets)
        matrix = encode_sentences(sentences, EncoderSpec(dim=64, seed=1))
        emb_path = tmp_path / "ext.emb1"
        write_emb1(matrix, emb_path)

        config = _config(
            small_corpus, tmp_path / "run",
            encoder="external", embeddings=str(emb_path), dim=64,
        )
        manifest = run_pipeline(config)
        assert manifest.method == "external"
        assert len(manifest.days) == 2

    def test_missing_ids_fail_embed_stage(self, small_corpus, tmp_path):
        tweets = ingest(small_corpus / "tweets.jsonl", "jsonl")
        sentences = clean_corpus(tweets)[:5]
        matrix = encode_sentences(sentences, EncoderSpec(dim=32, seed=1))
        emb_path = tmp_path / "partial.emb1"
        write_emb1(matrix, emb_path)
        config = _config(
            small_corpus, tmp_path / "run",
            encoder="external", embeddings=str(emb_path), dim=32,
        )
        with pytest.raises(StageError) as err:
            run_pipeline(config)
        assert err.value.stage == "embed"


class TestBaselines:
    def test_tfidf_stage_parity_and_tag(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "out")
        manifest = run_baseline(config, "tfidf")
        assert manifest.method == "tfidf"
        assert manifest.stages == PIPELINE_STAGES
        out = Path(config.out) / "tfidf"
        assert (out / "manifest.json").exists()
        assert (out / "summaries.json").exists()

    def test_tfidf_vocab_export(self, small_corpus, tmp_path):
        import csv as csv_mod

        config = _config(small_corpus, tmp_path / "out")
        run_baseline(config, "tfidf")
        vocab_csv = Path(config.out) / "tfidf" / "vocab" / "2020-03-29.csv"
        assert vocab_csv.exists()
        rows = list(csv_mod.DictReader(open(vocab_csv)))
        assert rows
        assert set(rows[0]) == {"term", "index", "idf"}
        assert all(float(r["idf"]) >= 1.0 for r in rows)

    def test_lda_model_export(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "out", lda_topics=2, lda_sweeps=10)
        run_baseline(config, "lda")
        model_json = Path(config.out) / "lda" / "model" / "2020-03-29.json"
        payload = json.loads(model_json.read_text())
        assert payload["T"] == 2
        assert payload["sweeps"] == 10
        assert len(payload["topics"]) == 2
        for topic in payload["topics"]:
            assert len(topic["keywords"]) == len(topic["phi_top"])
            assert all(0.0 <= p <= 1.0 for p in topic["phi_top"])

    def test_lda_baseline_produces_topic_keywords(self, small_corpus, tmp_path):
        config = _config(
            small_corpus, tmp_path / "out",
            lda_topics=2, lda_sweeps=20,
        )
        manifest = run_baseline(config, "lda")
        assert manifest.method == "lda"
        assert manifest.stages == LDA_STAGES
        records = json.loads((Path(config.out) / "lda" / "summaries.json").read_text())
        by_day = {}
        for r in records:
            by_day.setdefault(r["day"], []).append(r)
        assert set(by_day) == {"2020-03-29", "2020-03-30"}
        for day_records in by_day.values():
            assert len(day_records) == 2  # one per topic
            for r in day_records:
                assert r["keywords"]
                assert r["summary"] == []

    def test_unknown_method(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "out")
        with pytest.raises(ValueError, match="unknown baseline"):
            run_baseline(config, "lsa")


class TestEvaluateRun:
    def test_three_methods_sorted(self, small_corpus, tmp_path):
        config = _config(small_corpus, tmp_path / "out", lda_topics=6, lda_sweeps=30)
        run_pipeline(config)
        run_baseline(config, "tfidf")
        run_baseline(config, "lda")
        manifests = [
            tmp_path / "out" / "manifest.json",
            tmp_path / "out" / "tfidf" / "manifest.json",
            tmp_path / "out" / "lda" / "manifest.json",
        ]
        reports = evaluate_run(manifests, small_corpus / "gold.json", k=10)
        assert len(reports) == 3
        f1s = [r.macro_f1 for r in reports]
        assert f1s == sorted(f1s, reverse=True)
        assert {r.method for r in reports} == {"builtin", "tfidf", "lda"}

    def test_metrics_equal_manual_recomputation(self, small_corpus, tmp_path):
        from daytopics.evaluation import evaluate_method, load_gold

        config = _config(small_corpus, tmp_path / "out")
        run_pipeline(config)
        (report,) = evaluate_run(
            [tmp_path / "out" / "manifest.json"], small_corpus / "gold.json", k=10
        )
        records = json.loads((tmp_path / "out" / "summaries.json").read_text())
        by_day = {}
        for r in records:
            by_day.setdefault(date.fromisoformat(r["day"]), []).append(r["keywords"])
        expected = evaluate_method("builtin", by_day, load_gold(small_corpus / "gold.json"), 10)
        assert report.macro_f1 == pytest.approx(expected.macro_f1, abs=1e-12)
        assert [d.f1 for d in report.per_day] == [d.f1 for d in expected.per_day]

    def test_missing_artifact_names_manifest(self, tmp_path):
        bad = tmp_path / "manifest.json"
        bad.write_text(json.dumps({"method": "x", "artifacts": {}}))
        gold = tmp_path / "gold.json"
        gold.write_text(json.dumps([{"day": "2020-03-29", "topics": [{"label": "l", "words": ["w"]}]}]))
        with pytest.raises(Exception, match="manifest"):
            evaluate_run([bad], gold, k=10)


class TestCli:
    def test_ingest_command(self, small_corpus, tmp_path, capsys):
        rc = cli_main(
            [
                "ingest",
                "--input", str(small_corpus / "tweets.jsonl"),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert rc == 0
        assert (tmp_path / "out" / "sentences.tsv").exists()
        captured = capsys.readouterr()
        assert "retained sentences" in captured.out

    def test_run_and_eval_commands(self, small_corpus, tmp_path, capsys):
        rc = cli_main(
            [
                "run",
                "--input", str(small_corpus / "tweets.jsonl"),
                "--out", str(tmp_path / "out"),
                "--seed", "1",
                "--config", str(self._write_config(tmp_path)),
            ]
        )
        assert rc == 0
        rc = cli_main(
            [
                "eval",
                str(tmp_path / "out" / "manifest.json"),
                "--gold", str(small_corpus / "gold.json"),
                "--out", str(tmp_path / "evalout"),
            ]
        )
        assert rc == 0
        captured = capsys.readouterr()
        assert "builtin" in captured.out
        assert (tmp_path / "evalout" / "comparison.csv").exists()

    def _write_config(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("k = 8\ntop_clusters = 6\n")
        return path

    def test_report_command(self, small_corpus, tmp_path):
        rc = cli_main(
            [
                "report",
                "--input", str(small_corpus / "tweets.jsonl"),
                "--out", str(tmp_path / "out"),
                "--dedup",
            ]
        )
        assert rc == 0
        assert (tmp_path / "out" / "frequencies.csv").exists()

    def test_project_command(self, small_corpus, tmp_path, capsys):
        rc = cli_main(
            [
                "project",
                "--input", str(small_corpus / "tweets.jsonl"),
                "--out", str(tmp_path / "out"),
                "--config", str(self._write_config(tmp_path)),
            ]
        )
        assert rc == 0
        assert (tmp_path / "out" / "projection" / "2020-03-29.tsv").exists()

    def test_error_exit_code(self, tmp_path, capsys):
        rc = cli_main(["run", "--input", str(tmp_path / "missing.jsonl"), "--out", str(tmp_path / "o")])
        assert rc == 1
        captured = capsys.readouterr()
        assert "error:" in captured.err

    def test_baseline_command(self, small_corpus, tmp_path):
        rc = cli_main(
            [
                "baseline", "tfidf",
                "--input", str(small_corpus / "tweets.jsonl"),
                "--out", str(tmp_path / "out"),
                "--config", str(self._write_config(tmp_path)),
            ]
        )
        assert rc == 0
        assert (tmp_path / "out" / "tfidf" / "manifest.json").exists()
