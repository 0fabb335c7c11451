"""First-stage filter: title+abstract classification of dataset papers.

Two backends ship here: a deterministic cue-phrase scorer that keeps
the pipeline model-free for offline tests, and a remote HTTP backend
that posts text to an inference endpoint. The cue table is documented
in docs/heuristics.md; tests hand-apply it.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from .errors import BackendError
from .ingest import PaperMeta
from .transport import Transport

logger = logging.getLogger(__name__)

DEFAULT_GATE_THRESHOLD = 0.5

# Cue-phrase table: case-insensitive substring presence, each phrase
# counted at most once. Raw weight w maps to a score w / (w + 4), so a
# positive decision (score > 0.5) needs total weight > 4.
GATE_CUES: dict[str, int] = {
    "we release": 3,
    "we publicly release": 3,
    "new dataset": 3,
    "new benchmark": 3,
    "new corpus": 3,
    "we introduce a dataset": 3,
    "we introduce a benchmark": 3,
    "we present a dataset": 3,
    "we construct a dataset": 3,
    "dataset": 2,
    "benchmark": 2,
    "corpus": 2,
    "publicly available": 2,
    "open-source": 2,
    "annotated": 2,
    "we annotate": 2,
    "available at": 1,
    "github.com": 1,
    "huggingface.co": 1,
    "zenodo.org": 1,
}

_GATE_SCALE = 4.0


@dataclass
class GateDecision:
    paper_id: str
    score: float
    positive: bool
    backend_name: str
    latency: float


class GateBackend:
    """Maps one text string to a probability in [0, 1].

    Implementations must be pure with respect to the input text and
    safe for concurrent calls.
    """

    name = "abstract"

    def score(self, text: str) -> float:
        raise NotImplementedError


def heuristic_gate_score(text: str) -> float:
    """Deterministic cue-phrase score; see GATE_CUES for the rule table."""
    lowered = " ".join(text.split()).lower()
    if not lowered:
        return 0.0
    raw = sum(weight for phrase, weight in GATE_CUES.items() if phrase in lowered)
    return raw / (raw + _GATE_SCALE)


class HeuristicGateBackend(GateBackend):
    name = "heuristic"

    def score(self, text: str) -> float:
        return heuristic_gate_score(text)


class RemoteGateBackend(GateBackend):
    """POSTs UTF-8 text to an inference endpoint returning one decimal."""

    name = "remote"

    def __init__(self, url: str, transport: Transport, timeout: float = 30.0):
        self.url = url
        self.transport = transport
        self.timeout = timeout

    def score(self, text: str) -> float:
        response = self.transport.post(
            self.url,
            body=text.encode("utf-8"),
            headers={"Content-Type": "text/plain; charset=utf-8"},
            timeout=self.timeout,
        )
        if response.status != 200:
            raise BackendError(f"gate backend returned status {response.status}", url=self.url)
        try:
            value = float(response.text.strip())
        except ValueError as exc:
            raise BackendError(f"gate backend returned non-numeric body: {response.text[:80]!r}",
                               url=self.url) from exc
        if not 0.0 <= value <= 1.0:
            raise BackendError(f"gate backend score {value} outside [0, 1]", url=self.url)
        return value


def gate_input_text(meta: PaperMeta) -> str:
    """The exact classifier input: title, one space, abstract."""
    return meta.title + " " + meta.abstract


def classify(
    meta: PaperMeta, backend: GateBackend, threshold: float = DEFAULT_GATE_THRESHOLD
) -> GateDecision:
    """Score the paper and apply the strict decision threshold.

    Positive means score strictly greater than the threshold; a score
    exactly at the threshold is negative. Backend failures surface as
    retryable BackendError so the caller can re-queue the paper.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    text = gate_input_text(meta)
    start = time.perf_counter()
    try:
        score = backend.score(text)
    except BackendError:
        raise
    except Exception as exc:
        raise BackendError(f"gate backend {backend.name} failed: {exc}") from exc
    latency = time.perf_counter() - start
    decision = GateDecision(
        paper_id=meta.paper_id,
        score=score,
        positive=score > threshold,
        backend_name=backend.name,
        latency=latency,
    )
    logger.debug("gate %s score=%.4f positive=%s", meta.paper_id, score, decision.positive)
    return decision
