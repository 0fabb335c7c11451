import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autodataset.descextract import (
    DescriptionResult,
    HeuristicSentenceBackend,
    SentenceBackend,
    SentenceVerdict,
    aggregate_description,
    build_window,
    classify_sentences,
    export_training_windows,
    generate_training_windows,
    heuristic_sentence_score,
)
from autodataset.docparse import ParsedDocument, ParseSource, Sentence
from oracles import naive_build_window, naive_training_walk


def sentences_from(tokens, texts=None):
    return [
        Sentence(i, texts[i] if texts else f"Sentence number {i}.", None, tk)
        for i, tk in enumerate(tokens)
    ]


def doc_from(texts, tokens=None):
    sents = [
        Sentence(i, t, None, tokens[i] if tokens else max(1, len(t.split())))
        for i, t in enumerate(texts)
    ]
    return ParsedDocument("p1", sents, ParseSource.STRUCTURED_SERVICE)


class TestBuildWindow:
    def test_single_sentence_document(self):
        w = build_window(sentences_from([3]), 0, token_budget=512)
        assert (w.left, w.right) == (0, 0)

    def test_whole_document_fits(self):
        # hand expansion: seed [3,7]=250; alternate adds 2,8,1,9,0 -> 500
        w = build_window(sentences_from([50] * 10), 5, token_budget=512)
        assert (w.left, w.right, w.token_total) == (0, 9, 500)

    def test_expansion_stops_when_neither_side_fits(self):
        # seed [3,7]=250; adding either neighbor reaches 300 > 260
        w = build_window(sentences_from([50] * 10), 5, token_budget=260)
        assert (w.left, w.right, w.token_total) == (3, 7, 250)

    def test_over_budget_target_flagged(self):
        w = build_window(sentences_from([10, 600, 10]), 1, token_budget=100)
        assert (w.left, w.right) == (1, 1)
        assert w.over_budget is True
        assert w.token_total == 600

    def test_over_budget_seed_shrinks_dropping_right_on_ties(self):
        # seed [0,4]=630 > 512; drops: right(4), left(0), right(3) -> [1,2]
        w = build_window(sentences_from([10, 300, 10, 300, 10]), 2, token_budget=512)
        assert (w.left, w.right, w.token_total) == (1, 2, 310)

    def test_blocked_side_lets_other_side_continue(self):
        # left neighbor too big; right side keeps filling to the bound
        w = build_window(sentences_from([500, 10, 10, 10, 10, 10]), 2,
                         token_budget=100, seed_radius=1)
        assert (w.left, w.right, w.token_total) == (1, 5, 50)

    def test_bad_target_raises(self):
        with pytest.raises(IndexError):
            build_window(sentences_from([5]), 3)

    @given(
        tokens=st.lists(st.integers(1, 120), min_size=1, max_size=40),
        budget=st.integers(1, 600),
        radius=st.integers(1, 4),
        data=st.data(),
    )
    @settings(max_examples=200, deadline=None)
    def test_matches_naive_oracle(self, tokens, budget, radius, data):
        target = data.draw(st.integers(0, len(tokens) - 1))
        w = build_window(sentences_from(tokens), target, budget, radius)
        lo, hi, total, flagged = naive_build_window(tokens, target, budget, radius)
        assert (w.left, w.right, w.token_total, w.over_budget) == (lo, hi, total, flagged)

    @given(
        tokens=st.lists(st.integers(1, 120), min_size=1, max_size=40),
        budget=st.integers(1, 600),
        data=st.data(),
    )
    @settings(max_examples=200, deadline=None)
    def test_budget_safety(self, tokens, budget, data):
        target = data.draw(st.integers(0, len(tokens) - 1))
        w = build_window(sentences_from(tokens), target, budget)
        assert w.over_budget or w.token_total <= budget
        assert w.left <= target <= w.right


class TestGenerateTrainingWindows:
    def test_empty_document(self):
        assert generate_training_windows([], [], 512) == []

    def test_all_negative_whole_document_two_targets(self):
        # window covers all 10 sentences; stride 10//2=5 exhausts in 2 targets
        windows = generate_training_windows(sentences_from([10] * 10), [False] * 10, 512)
        assert [w.target_index for w in windows] == [0, 5]
        assert all((w.left, w.right) == (0, 9) for w in windows)

    def test_positive_window_uses_smaller_stride(self):
        # every window spans the whole doc and contains index 4 -> stride 3
        labels = [False] * 4 + [True] + [False] * 5
        windows = generate_training_windows(sentences_from([10] * 10), labels, 512)
        assert [w.target_index for w in windows] == [0, 3, 6, 9]

    def test_labels_attached_to_targets(self):
        labels = [False] * 4 + [True] + [False] * 5
        windows = generate_training_windows(sentences_from([10] * 10), labels, 512)
        assert [w.label for w in windows] == [False, False, False, False]

    def test_uncovered_positive_gets_appended_window(self):
        # frozen adversarial case: the stride walk never covers index 8
        tokens = [200, 999, 5, 10, 10, 10, 50, 10, 200, 50]
        labels = [False] * 8 + [True, False]
        windows = generate_training_windows(sentences_from(tokens), labels,
                                            token_budget=100, seed_radius=1)
        assert windows[-1].target_index == 8
        assert windows[-1].label is True
        covered = set()
        for w in windows:
            covered.update(range(w.left, w.right + 1))
        assert 8 in covered

    def test_label_length_mismatch_raises(self):
        with pytest.raises(ValueError):
            generate_training_windows(sentences_from([5]), [True, False], 512)

    @given(
        tokens=st.lists(st.integers(1, 120), min_size=1, max_size=40),
        budget=st.integers(1, 600),
        radius=st.integers(1, 3),
        data=st.data(),
    )
    @settings(max_examples=150, deadline=None)
    def test_walk_matches_naive_oracle(self, tokens, budget, radius, data):
        labels = data.draw(
            st.lists(st.booleans(), min_size=len(tokens), max_size=len(tokens)))
        windows = generate_training_windows(sentences_from(tokens), labels, budget, radius)
        expected = naive_training_walk(tokens, labels, budget, radius)
        assert [(w.target_index, w.left, w.right) for w in windows] == expected
        covered = set()
        for w in windows:
            covered.update(range(w.left, w.right + 1))
        assert all(i in covered for i, lab in enumerate(labels) if lab)


class TestExport:
    def test_jsonl_fields(self):
        buf = io.StringIO()
        count = export_training_windows("p9", sentences_from([10] * 10),
                                        [False] * 10, buf, token_budget=512)
        lines = [json.loads(line) for line in buf.getvalue().splitlines()]
        assert count == len(lines) == 2
        assert lines[0] == {"paper_id": "p9", "target_index": 0, "left": 0,
                            "right": 9, "label": False}


class StubSentenceBackend(SentenceBackend):
    name = "stub"

    def __init__(self, scores):
        self.scores = scores
        self.calls = []

    def score(self, target, left_context, right_context):
        self.calls.append((target, left_context, right_context))
        return self.scores[len(self.calls) - 1]


class TestClassifySentences:
    def test_empty_document(self):
        doc = ParsedDocument("p1", [], ParseSource.STRUCTURED_SERVICE)
        assert classify_sentences(doc, HeuristicSentenceBackend()) == []

    def test_heuristic_marks_only_dataset_sentence(self):
        doc = doc_from([
            "We study retrieval models.",
            "Prior work focuses on ranking.",
            "Our dataset contains 12,000 annotated images.",
            "We train with a standard recipe.",
            "Results improve over baselines.",
        ])
        verdicts = classify_sentences(doc, HeuristicSentenceBackend())
        assert [v.positive for v in verdicts] == [False, False, True, False, False]

    def test_scores_at_threshold_are_negative(self):
        doc = doc_from(["Any sentence here.", "Another sentence there."])
        verdicts = classify_sentences(doc, StubSentenceBackend([0.5, 0.5]), threshold=0.5)
        assert all(v.positive is False for v in verdicts)

    def test_backend_receives_window_context(self):
        doc = doc_from(["Alpha one.", "Beta two.", "Gamma three."])
        backend = StubSentenceBackend([0.1, 0.2, 0.3])
        classify_sentences(doc, backend, token_budget=512)
        target, left, right = backend.calls[1]
        assert target == "Beta two."
        assert left == "Alpha one."
        assert right == "Gamma three."

    def test_heuristic_cue_scores(self):
        # cue table by hand: "we annotate" (3) -> 3/5
        assert heuristic_sentence_score("We annotate every image.") == pytest.approx(3 / 5)
        assert heuristic_sentence_score("") == 0.0
        # "dataset" (1) alone -> 1/3, negative
        assert heuristic_sentence_score("The dataset is popular.") == pytest.approx(1 / 3)


class TestAggregate:
    def test_zero_positives_reclassified_negative(self):
        doc = doc_from(["One.", "Two."])
        verdicts = [SentenceVerdict(0, 0.1, False), SentenceVerdict(1, 0.2, False)]
        result = aggregate_description(doc, verdicts)
        assert result.reclassified_negative is True
        assert result.description is None
        assert result.positive_indices == []

    def test_positives_join_in_index_order(self):
        doc = doc_from([f"Sentence {i} text." for i in range(8)])
        verdicts = [SentenceVerdict(i, 0.9 if i in (7, 3) else 0.1, i in (7, 3))
                    for i in range(8)]
        result = aggregate_description(doc, verdicts)
        assert result.description == "Sentence 3 text. Sentence 7 text."
        assert result.positive_indices == [3, 7]

    def test_single_positive_is_verbatim(self):
        doc = doc_from(["Keep this sentence.", "Drop that one."])
        verdicts = [SentenceVerdict(0, 0.9, True), SentenceVerdict(1, 0.1, False)]
        assert aggregate_description(doc, verdicts).description == "Keep this sentence."

    def test_verdict_order_does_not_matter(self):
        doc = doc_from([f"Sentence {i} text." for i in range(5)])
        verdicts = [SentenceVerdict(i, 0.9, i % 2 == 0) for i in range(5)]
        shuffled = [verdicts[3], verdicts[0], verdicts[4], verdicts[2], verdicts[1]]
        assert (aggregate_description(doc, verdicts).description
                == aggregate_description(doc, shuffled).description)

    def test_incomplete_verdicts_raise(self):
        doc = doc_from(["One.", "Two."])
        with pytest.raises(ValueError):
            aggregate_description(doc, [SentenceVerdict(0, 0.5, False)])

    @given(flags=st.lists(st.booleans(), min_size=0, max_size=12))
    def test_reclassification_biconditional(self, flags):
        doc = doc_from([f"Sentence {i} here." for i in range(len(flags))])
        verdicts = [SentenceVerdict(i, 0.9 if f else 0.1, f) for i, f in enumerate(flags)]
        result: DescriptionResult = aggregate_description(doc, verdicts)
        assert result.reclassified_negative == (result.positive_indices == [])
        assert (result.description is None) == result.reclassified_negative
