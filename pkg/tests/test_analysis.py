import numpy as np
import pytest

from spider_pid import (
    CannotGenerateError,
    EmptyReportError,
    Instance,
    InstanceDocument,
    InvalidInputError,
    NormalizedPid,
    ResultRecord,
    aggregate,
    build_report,
    format_mean_std,
    label_comparison,
    make_unrelated,
    reservoir_sample,
    top_unique_histogram,
    unique_variance,
)


def record(instance_id="x", unique=(0.3, 0.3), redundancy=0.4, union=1.0, synergy=0.0, label=None):
    return ResultRecord(
        instance_id=instance_id,
        n_sources=len(unique),
        label=label,
        normalized=NormalizedPid(
            redundancy=redundancy,
            union=union,
            synergy=synergy,
            unique=tuple(unique),
            normalizer=1.0,
        ),
    )


def simple_instance(instance_id, summary="What is it? A thing.", label=None):
    return Instance(
        instance_id=instance_id,
        summary_sentences=(summary,),
        documents=(InstanceDocument("d0", ("Some source sentence.",)),),
        label=label,
    )


class TestAggregate:
    def test_mean_and_population_std(self):
        records = [record("ds/a", redundancy=0.4), record("ds/b", redundancy=0.6)]
        (report,) = aggregate(records, "dataset")
        assert report.group_key == "ds"
        assert report.count == 2
        assert report.mean["redundancy"] == pytest.approx(0.5, abs=1e-12)
        assert report.std["redundancy"] == pytest.approx(0.1, abs=1e-12)

    def test_identical_records_zero_std(self):
        records = [record("a"), record("b"), record("c")]
        (report,) = aggregate(records, "n_sources")
        assert all(report.std[c] == pytest.approx(0.0, abs=1e-15) for c in report.std)

    def test_rendering_matches_convention(self):
        assert format_mean_std(0.48, 0.2) == "0.48 (±0.2)"

    def test_unique_summary_is_mean_of_unique(self):
        (report,) = aggregate([record("a", unique=(0.2, 0.4))], "dataset")
        assert report.mean["unique_summary"] == pytest.approx(0.3, abs=1e-12)

    def test_order_invariant(self):
        records = [record("g/1", redundancy=0.1), record("g/2", redundancy=0.9)]
        fwd = aggregate(records, "dataset")
        rev = aggregate(list(reversed(records)), "dataset")
        assert [r.to_dict() for r in fwd] == [r.to_dict() for r in rev]

    def test_empty_rejected(self):
        with pytest.raises(EmptyReportError):
            aggregate([], "dataset")

    def test_label_grouping_requires_labels(self):
        with pytest.raises(InvalidInputError):
            aggregate([record("a")], "label")


class TestUniqueVariance:
    def test_equal_contributions_zero_percent(self):
        table = unique_variance([record(unique=(0.3, 0.3))])
        assert table.by_n_sources[2] == pytest.approx(0.0, abs=1e-12)

    def test_unequal_contributions(self):
        table = unique_variance([record(unique=(0.2, 0.4))])
        assert table.by_n_sources[2] == pytest.approx(1.0, abs=1e-9)

    def test_group_mean_of_variances(self):
        # variances 0.01 and 0.03 -> mean 0.02 -> 2.0%
        r1 = record("a", unique=(0.2, 0.4))  # var 0.01
        u = np.sqrt(0.03)
        r2 = record("b", unique=(0.5 - u, 0.5 + u))  # var 0.03
        table = unique_variance([r1, r2])
        assert table.by_n_sources[2] == pytest.approx(2.0, abs=1e-9)

    def test_single_source_records_skipped(self):
        table = unique_variance([record(unique=(0.5,)), record(unique=(0.2, 0.4))])
        assert table.skipped == 1
        assert set(table.by_n_sources) == {2}

    def test_permutation_invariance(self):
        a = unique_variance([record(unique=(0.1, 0.5, 0.2))]).by_n_sources[3]
        b = unique_variance([record(unique=(0.5, 0.2, 0.1))]).by_n_sources[3]
        assert a == pytest.approx(b, abs=1e-15)


class TestTopUniqueHistogram:
    def test_single_record(self):
        hist = top_unique_histogram([record(unique=(0.1, 0.5, 0.2))])
        assert hist[3] == [0.0, 1.0, 0.0]

    def test_counting(self):
        records = [
            record("a", unique=(0.9, 0.0, 0.0)),
            record("b", unique=(0.8, 0.1, 0.0)),
            record("c", unique=(0.0, 0.1, 0.9)),
        ]
        hist = top_unique_histogram(records)
        assert hist[3] == pytest.approx([2 / 3, 0.0, 1 / 3], abs=1e-12)

    def test_tie_goes_to_lowest_index(self):
        hist = top_unique_histogram([record(unique=(0.4, 0.4))])
        assert hist[2] == [1.0, 0.0]

    def test_frequencies_sum_to_one(self):
        rng = np.random.default_rng(5)
        records = [
            record(f"r{i}", unique=tuple(rng.uniform(0, 1, size=int(rng.integers(2, 5)))))
            for i in range(50)
        ]
        for freqs in top_unique_histogram(records).values():
            assert sum(freqs) == pytest.approx(1.0, abs=1e-12)


class TestMakeUnrelated:
    def test_two_paragraph_corpus_swaps_summaries(self):
        corpus = [simple_instance("p1:q1", "First question? One."),
                  simple_instance("p2:q1", "Second question? Two.")]
        out = make_unrelated(corpus, seed=7)
        assert out[0].summary_sentences == corpus[1].summary_sentences
        assert out[1].summary_sentences == corpus[0].summary_sentences
        assert all(inst.label == "unrelated" for inst in out)

    def test_deterministic(self):
        corpus = [simple_instance(f"p{i}:q", f"Question {i}? Answer.") for i in range(6)]
        a = make_unrelated(corpus, seed=3)
        b = make_unrelated(corpus, seed=3)
        assert a == b

    def test_never_samples_own_paragraph(self):
        corpus = [
            simple_instance(f"p{i % 3}:q{i}", f"Question {i}? Answer {i}.") for i in range(12)
        ]
        summaries = {inst.summary_sentences: inst.instance_id for inst in corpus}
        for seed in range(10):
            for src, out in zip(corpus, make_unrelated(corpus, seed=seed)):
                donor_id = summaries[out.summary_sentences]
                assert donor_id.split(":")[0] != src.instance_id.split(":")[0]

    def test_single_paragraph_rejected(self):
        corpus = [simple_instance("p1:q1"), simple_instance("p1:q2")]
        with pytest.raises(CannotGenerateError):
            make_unrelated(corpus, seed=1)


class TestLabelComparison:
    def test_ordering_flag_true(self):
        records = [
            record("a", synergy=0.28, label="correct"),
            record("b", synergy=0.26, label="incorrect"),
            record("c", synergy=0.24, label="unrelated"),
        ]
        comparison = label_comparison(records)
        assert comparison.synergy_ordering is True

    def test_ordering_flag_false_on_ties(self):
        records = [
            record("a", synergy=0.2, label="correct"),
            record("b", synergy=0.2, label="incorrect"),
            record("c", synergy=0.2, label="unrelated"),
        ]
        assert label_comparison(records).synergy_ordering is False

    def test_flag_not_applicable_with_missing_labels(self):
        comparison = label_comparison([record("a", label="correct")])
        assert comparison.synergy_ordering is None
        assert len(comparison.reports) == 1

    def test_unlabeled_rejected(self):
        with pytest.raises(InvalidInputError):
            label_comparison([record("a")])


class TestReservoirSample:
    def test_smaller_population_kept_whole(self):
        assert reservoir_sample(range(3), 10, seed=0) == [0, 1, 2]

    def test_deterministic_and_bounded(self):
        a = reservoir_sample(range(1000), 100, seed=42)
        b = reservoir_sample(range(1000), 100, seed=42)
        assert a == b
        assert len(a) == 100

    def test_roughly_uniform(self):
        hits = np.zeros(50)
        for seed in range(400):
            for v in reservoir_sample(range(50), 10, seed=seed):
                hits[v] += 1
        # each item expected 80 times
        assert hits.min() > 40 and hits.max() < 130


class TestBuildReport:
    def test_report_contains_all_sections(self):
        records = [record("ds/a", unique=(0.2, 0.4)), record("ds/b", unique=(0.3, 0.3))]
        report = build_report(records, "dataset")
        assert report["groups"][0]["formatted"]["redundancy"] == "0.40 (±0.0)"
        assert report["unique_variance"]["by_n_sources"]["2"] == pytest.approx(0.5)
        assert report["top_unique_histogram"]["2"] == [0.5, 0.5]

    def test_label_report_includes_comparison(self):
        records = [
            record("a", synergy=0.28, label="correct"),
            record("b", synergy=0.26, label="incorrect"),
            record("c", synergy=0.24, label="unrelated"),
        ]
        report = build_report(records, "label")
        assert report["label_comparison"][
            "synergy_ordering_correct_gt_incorrect_gt_unrelated"
        ] is True


class TestResultRecord:
    def test_rejects_raw_only(self):
        with pytest.raises(InvalidInputError):
            ResultRecord.from_result_dict(
                {"instance_id": "a", "n_sources": 2, "normalized": None}
            )

    def test_rejects_mismatched_unique_length(self):
        with pytest.raises(InvalidInputError):
            record(unique=(0.1, 0.2)).__class__(
                instance_id="a",
                n_sources=3,
                label=None,
                normalized=record().normalized,
            )
