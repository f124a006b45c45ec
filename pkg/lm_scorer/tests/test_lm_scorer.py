import json

import pytest

from lm_scorer import (
    CacheLM,
    InvalidConfigError,
    InvalidCorpusError,
    ScorerConfig,
    StartupError,
    load_backend,
    read_corpus,
    score_corpus,
    score_pair,
)
from lm_scorer.cli import main

from lm_helpers import PROBE_PAIRS, write_probe_corpus


@pytest.fixture
def cache_config():
    return ScorerConfig(model="cache")


@pytest.fixture
def cache_lm(cache_config):
    texts = [s for pair in PROBE_PAIRS for s in pair]
    return CacheLM(cache_config, texts)


class TestConfig:
    def test_defaults_to_gpt2_large(self):
        assert ScorerConfig().model == "gpt2-large"

    def test_bad_order_rejected(self):
        with pytest.raises(InvalidConfigError):
            ScorerConfig(order="sideways")

    def test_bad_batch_size_rejected(self):
        with pytest.raises(InvalidConfigError):
            ScorerConfig(batch_size=0)


class TestCacheLM:
    def test_deterministic(self, cache_lm):
        text = "The cat sat on the mat by the door."
        a = cache_lm.score([text])[0]
        b = cache_lm.score([text])[0]
        assert a == b

    def test_log_probs_negative(self, cache_lm):
        for score in cache_lm.score([s for pair in PROBE_PAIRS for s in pair]):
            assert score.log_prob < 0

    def test_repetition_is_cheaper_than_novelty(self, cache_lm):
        repeated = "the cat the cat the cat"
        novel = "the cat sat on every mat"
        rep, nov = cache_lm.score([repeated, novel])
        assert rep.log_prob > nov.log_prob

    def test_truncation_flagged(self):
        config = ScorerConfig(model="cache", max_seq_len=4)
        lm = CacheLM(config, ["one two three four five six"])
        score = lm.score(["one two three four five six"])[0]
        assert score.truncated
        assert score.n_tokens == 4

    def test_empty_corpus_rejected(self, cache_config):
        with pytest.raises(StartupError):
            CacheLM(cache_config, ["..."])


class TestScorePair:
    def test_copied_beats_unrelated(self, cache_lm, cache_config):
        for summary, unrelated in PROBE_PAIRS:
            copied = score_pair(cache_lm, summary, summary, cache_config)
            other = score_pair(cache_lm, summary, unrelated, cache_config)
            assert copied > other

    def test_symmetric_order_invariant(self, cache_lm):
        config = ScorerConfig(model="cache", order="symmetric")
        for summary, other in PROBE_PAIRS:
            forward = score_pair(cache_lm, summary, other, config)
            backward = score_pair(cache_lm, other, summary, config)
            assert forward == pytest.approx(backward, abs=1e-6)

    def test_asymmetric_orders_differ_in_general(self, cache_lm, cache_config):
        s = "the cat sat on the mat"
        d = "a cat slept near the mat"
        forward = score_pair(cache_lm, s, d, cache_config)
        backward = score_pair(cache_lm, s, d, ScorerConfig(model="cache", order="d_then_s"))
        assert forward != backward


class TestCorpus:
    def test_raw_text_fields_are_segmented(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            json.dumps(
                {
                    "instance_id": "raw/a:0",
                    "summary_text": "First point. Second point.",
                    "documents": [{"doc_id": "d0", "text": "Only sentence here."}],
                }
            )
            + "\n"
        )
        (instance,) = read_corpus(path)
        assert instance.summary_sentences == ("First point.", "Second point.")

    def test_bad_line_reports_location(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text("{broken\n")
        with pytest.raises(InvalidCorpusError) as err:
            read_corpus(path)
        assert ":1:" in str(err.value)


class TestScoreCorpus:
    def test_writes_files_and_manifest(self, tmp_path, cache_config):
        corpus = write_probe_corpus(tmp_path / "corpus.jsonl")
        written = score_corpus(corpus, tmp_path / "out", cache_config)
        assert len(written) == 5
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["schema"] == "spider-lm-manifest/1"
        assert manifest["params"]["segmenter"] == "rule/1"
        assert manifest["truncated_pairs"] == 0
        assert not list((tmp_path / "out").glob("*.tmp"))

    def test_rerun_is_byte_identical(self, tmp_path, cache_config):
        corpus = write_probe_corpus(tmp_path / "corpus.jsonl")
        for out in ("a", "b"):
            score_corpus(corpus, tmp_path / out, cache_config)
        for pa, pb in zip(sorted((tmp_path / "a").iterdir()), sorted((tmp_path / "b").iterdir())):
            assert pa.read_bytes() == pb.read_bytes()

    def test_truncation_counted_in_manifest(self, tmp_path):
        corpus = write_probe_corpus(tmp_path / "corpus.jsonl")
        config = ScorerConfig(model="cache", max_seq_len=6)
        score_corpus(corpus, tmp_path / "out", config)
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["truncated_pairs"] > 0


class TestBackendSelection:
    def test_unknown_model_is_startup_error(self, monkeypatch):
        monkeypatch.setenv("HF_HUB_OFFLINE", "1")
        with pytest.raises(StartupError):
            load_backend(ScorerConfig(model="definitely/not-a-model"), ["text"])


class TestCli:
    def test_score_subcommand(self, tmp_path):
        corpus = write_probe_corpus(tmp_path / "corpus.jsonl")
        code = main(
            ["score", str(corpus), "--out-dir", str(tmp_path / "out"), "--model", "cache"]
        )
        assert code == 0
        assert len(list((tmp_path / "out").glob("*.pmi.json"))) == 5

    def test_startup_failure_is_exit_2(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HF_HUB_OFFLINE", "1")
        corpus = write_probe_corpus(tmp_path / "corpus.jsonl")
        code = main(
            [
                "score",
                str(corpus),
                "--out-dir",
                str(tmp_path / "out"),
                "--model",
                "definitely/not-a-model",
            ]
        )
        assert code == 2
