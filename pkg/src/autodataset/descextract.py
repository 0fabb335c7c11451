"""Sentence-level dataset-description extraction.

Builds token-budgeted context windows around each sentence, classifies
sentences with a pluggable backend, aggregates positives in document
order, and demotes papers with zero positive sentences back to
negatives.

Window construction: seed a symmetric window of ±seed_radius sentences
around the target, then grow one sentence at a time alternating
left-then-right until the token budget is reached. A side stops growing
at the document bound or when its next sentence no longer fits; the
other side keeps filling. If the seed itself is over budget it shrinks
from the farther boundary (right first on ties). For training export
the walk advances with a smaller stride around positive labels
(floor(W/3), minimum 1, W = window sentence count) and a larger stride
(floor(W/2), minimum 1) elsewhere.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import IO

from .docparse import DEFAULT_TOKEN_BUDGET, ParsedDocument, Sentence
from .errors import BackendError
from .transport import Transport

DEFAULT_SEED_RADIUS = 2
DEFAULT_DESC_THRESHOLD = 0.5

# Cue table for the deterministic reference backend; the mapping into
# [0, 1] is w / (w + 2), so positive needs total weight > 2. Documented
# in docs/heuristics.md.
DESC_CUES: dict[str, int] = {
    "our dataset contains": 3,
    "the dataset contains": 3,
    "our dataset comprises": 3,
    "our corpus contains": 3,
    "the benchmark contains": 3,
    "dataset consists of": 3,
    "corpus consists of": 3,
    "we collected": 3,
    "we annotated": 3,
    "we annotate": 3,
    "dataset": 1,
    "corpus": 1,
    "benchmark": 1,
    "annotated": 1,
    "annotation": 1,
    "labeled": 1,
    "labelled": 1,
    "crowdsourced": 1,
    "inter-annotator": 1,
}

# A cardinality statement ("12,000 annotated images") is a strong cue.
_COUNT_PATTERN = re.compile(
    r"\b\d[\d,]*\s+(?:annotated\s+)?(?:examples|samples|images|sentences|documents"
    r"|instances|pairs|annotations|labels|queries|videos|records|articles|posts"
    r"|utterances)\b"
)
_COUNT_WEIGHT = 2
_DESC_SCALE = 2.0


@dataclass
class WindowSample:
    target_index: int
    left: int
    right: int
    token_total: int
    label: bool | None = None
    over_budget: bool = False

    @property
    def sentence_count(self) -> int:
        return self.right - self.left + 1

    def contains(self, index: int) -> bool:
        return self.left <= index <= self.right


@dataclass
class SentenceVerdict:
    index: int
    score: float
    positive: bool


@dataclass
class DescriptionResult:
    paper_id: str
    description: str | None
    positive_indices: list[int]
    reclassified_negative: bool


def build_window(
    sentences: list[Sentence],
    target_index: int,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
    seed_radius: int = DEFAULT_SEED_RADIUS,
) -> WindowSample:
    """Construct the context window for one target sentence."""
    n = len(sentences)
    if not 0 <= target_index < n:
        raise IndexError(f"target_index {target_index} outside document of {n} sentences")
    tokens = [s.token_count for s in sentences]

    if tokens[target_index] > token_budget:
        return WindowSample(target_index, target_index, target_index,
                            tokens[target_index], over_budget=True)

    left = max(0, target_index - seed_radius)
    right = min(n - 1, target_index + seed_radius)
    total = sum(tokens[left : right + 1])

    if total > token_budget:
        while total > token_budget and (left < target_index or right > target_index):
            if right - target_index >= target_index - left:
                total -= tokens[right]
                right -= 1
            else:
                total -= tokens[left]
                left += 1
        return WindowSample(target_index, left, right, total)

    grow_left = True
    blocked_left = blocked_right = False
    while True:
        can_left = left > 0 and not blocked_left
        can_right = right < n - 1 and not blocked_right
        if not can_left and not can_right:
            break
        take_left = can_left if grow_left else not can_right
        if take_left:
            if total + tokens[left - 1] > token_budget:
                blocked_left = True
            else:
                left -= 1
                total += tokens[left]
        else:
            if total + tokens[right + 1] > token_budget:
                blocked_right = True
            else:
                right += 1
                total += tokens[right]
        grow_left = not grow_left

    return WindowSample(target_index, left, right, total)


def stride_for(window: WindowSample, labels: list[bool]) -> int:
    """Class-conditional stride: W//3 near positives, W//2 elsewhere."""
    w = window.sentence_count
    if any(labels[i] for i in range(window.left, window.right + 1)):
        return max(1, w // 3)
    return max(1, w // 2)


def generate_training_windows(
    sentences: list[Sentence],
    labels: list[bool],
    token_budget: int = DEFAULT_TOKEN_BUDGET,
    seed_radius: int = DEFAULT_SEED_RADIUS,
) -> list[WindowSample]:
    """Emit labeled windows over the document with class-conditional strides.

    Walks targets from index 0, advancing by the stride of each emitted
    window. Any positive sentence left uncovered afterwards gets an
    extra window centered on it, so coverage of positives is total.
    """
    if len(labels) != len(sentences):
        raise ValueError("labels must align one-to-one with sentences")
    n = len(sentences)
    if n == 0:
        return []

    emitted: list[WindowSample] = []
    target = 0
    while target < n:
        window = build_window(sentences, target, token_budget, seed_radius)
        window.label = labels[target]
        emitted.append(window)
        target += stride_for(window, labels)

    covered: set[int] = set()
    for window in emitted:
        covered.update(range(window.left, window.right + 1))
    for index in range(n):
        if labels[index] and index not in covered:
            window = build_window(sentences, index, token_budget, seed_radius)
            window.label = True
            emitted.append(window)
            covered.update(range(window.left, window.right + 1))
    return emitted


def export_training_windows(
    paper_id: str,
    sentences: list[Sentence],
    labels: list[bool],
    fp: IO[str],
    token_budget: int = DEFAULT_TOKEN_BUDGET,
    seed_radius: int = DEFAULT_SEED_RADIUS,
) -> int:
    """Write one JSON line per training window; returns the line count."""
    windows = generate_training_windows(sentences, labels, token_budget, seed_radius)
    for window in windows:
        fp.write(json.dumps({
            "paper_id": paper_id,
            "target_index": window.target_index,
            "left": window.left,
            "right": window.right,
            "label": window.label,
        }) + "\n")
    return len(windows)


class SentenceBackend:
    """Scores one sentence given its left/right window context."""

    name = "abstract"

    def score(self, target: str, left_context: str, right_context: str) -> float:
        raise NotImplementedError


def heuristic_sentence_score(text: str) -> float:
    """Deterministic cue score for one sentence; see DESC_CUES."""
    lowered = " ".join(text.split()).lower()
    if not lowered:
        return 0.0
    raw = sum(weight for phrase, weight in DESC_CUES.items() if phrase in lowered)
    if _COUNT_PATTERN.search(lowered):
        raw += _COUNT_WEIGHT
    return raw / (raw + _DESC_SCALE)


class HeuristicSentenceBackend(SentenceBackend):
    """Reference backend: scores the target sentence text alone."""

    name = "heuristic"

    def score(self, target: str, left_context: str, right_context: str) -> float:
        return heuristic_sentence_score(target)


class RemoteSentenceBackend(SentenceBackend):
    """POSTs the window text with the target marked; expects one decimal."""

    name = "remote"

    def __init__(self, url: str, transport: Transport, timeout: float = 30.0):
        self.url = url
        self.transport = transport
        self.timeout = timeout

    def score(self, target: str, left_context: str, right_context: str) -> float:
        parts = [left_context, f"[TARGET] {target} [/TARGET]", right_context]
        body = " ".join(p for p in parts if p).encode("utf-8")
        response = self.transport.post(
            self.url, body=body,
            headers={"Content-Type": "text/plain; charset=utf-8"},
            timeout=self.timeout,
        )
        if response.status != 200:
            raise BackendError(f"sentence backend returned status {response.status}",
                               url=self.url)
        try:
            value = float(response.text.strip())
        except ValueError as exc:
            raise BackendError("sentence backend returned non-numeric body",
                               url=self.url) from exc
        if not 0.0 <= value <= 1.0:
            raise BackendError(f"sentence backend score {value} outside [0, 1]", url=self.url)
        return value


def classify_sentences(
    doc: ParsedDocument,
    backend: SentenceBackend,
    threshold: float = DEFAULT_DESC_THRESHOLD,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
    seed_radius: int = DEFAULT_SEED_RADIUS,
) -> list[SentenceVerdict]:
    """Score every sentence in its window context, in index order."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    verdicts: list[SentenceVerdict] = []
    for sentence in doc.sentences:
        window = build_window(doc.sentences, sentence.index, token_budget, seed_radius)
        left_context = " ".join(
            doc.sentences[i].text for i in range(window.left, sentence.index)
        )
        right_context = " ".join(
            doc.sentences[i].text for i in range(sentence.index + 1, window.right + 1)
        )
        try:
            score = backend.score(sentence.text, left_context, right_context)
        except BackendError:
            raise
        except Exception as exc:
            raise BackendError(f"sentence backend {backend.name} failed: {exc}") from exc
        verdicts.append(SentenceVerdict(sentence.index, score, score > threshold))
    return verdicts


def aggregate_description(doc: ParsedDocument, verdicts: list[SentenceVerdict]) -> DescriptionResult:
    """Join positive sentences in document order; demote zero-positive papers."""
    indices = sorted(v.index for v in verdicts)
    if indices != list(range(len(doc.sentences))):
        raise ValueError("verdicts must cover every sentence index exactly once")
    positive_indices = sorted(v.index for v in verdicts if v.positive)
    if not positive_indices:
        return DescriptionResult(doc.paper_id, None, [], True)
    description = " ".join(doc.sentences[i].text for i in positive_indices)
    return DescriptionResult(doc.paper_id, description, positive_indices, False)
