"""Primary dataset URL selection over scored candidates.

Rule-only mode implements the threshold cascade (single candidate,
high-confidence accept, margin accept, preferred-host tie-break,
general tie-break, minimum-score rejection). LLM-only delegates to the
verifier endpoint. Hybrid filters non-positive scores, asks the
verifier, and falls back to the rule decision when the verifier is
disabled, unreachable or uncertain.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum

from ..errors import RetryableError
from ..transport import Transport
from .scoring import ScoredCandidate, is_direct_file_link, is_preferred_host

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelectionThresholds:
    tau_high: int = 22
    tau_mid: int = 16
    delta: int = 5
    top_k: int = 5
    tau_min: int = 15

    def __post_init__(self):
        if not (self.tau_high > self.tau_mid > self.tau_min > 0):
            raise ValueError("thresholds must satisfy tau_high > tau_mid > tau_min > 0")
        if self.delta <= 0 or self.top_k < 1:
            raise ValueError("delta must be positive and top_k at least 1")


class SelectionMode(str, Enum):
    RULE_ONLY = "rule_only"
    LLM_ONLY = "llm_only"
    HYBRID = "hybrid"


class SelectionReason(str, Enum):
    SINGLE_CANDIDATE = "single_candidate"
    HIGH_CONFIDENCE = "high_confidence"
    MARGIN = "margin"
    PREFERRED_HOST = "preferred_host"
    GENERAL_TIEBREAK = "general_tiebreak"
    LLM_CHOICE = "llm_choice"
    LLM_FALLBACK = "llm_fallback"
    REJECTED_BELOW_MIN = "rejected_below_min"
    NO_CANDIDATES = "no_candidates"


REJECTION_REASONS = (SelectionReason.REJECTED_BELOW_MIN, SelectionReason.NO_CANDIDATES)


@dataclass
class SelectionResult:
    primary_url: str | None
    mode: SelectionMode
    reason: SelectionReason
    considered: int

    def __post_init__(self):
        absent = self.primary_url is None
        if absent != (self.reason in REJECTION_REASONS):
            raise ValueError("primary_url must be absent exactly for rejection reasons")


def rank_key(candidate: ScoredCandidate):
    """Deterministic total order: score desc, URL length asc, URL lex asc."""
    return (-candidate.score, len(candidate.url), candidate.url)


class VerifierClient:
    """External verifier endpoint: candidate list in, one URL (or
    an 'uncertain' token) out. Any failure or unrecognized choice is
    treated as uncertain."""

    def __init__(self, url: str, transport: Transport, timeout: float = 60.0):
        self.url = url
        self.transport = transport
        self.timeout = timeout

    def choose(self, candidates: list[ScoredCandidate]) -> str | None:
        payload = json.dumps({
            "candidates": [
                {"url": c.url, "anchor": c.candidate.anchor, "context": c.candidate.context}
                for c in candidates
            ]
        }).encode("utf-8")
        try:
            response = self.transport.post(
                self.url, body=payload,
                headers={"Content-Type": "application/json"},
                timeout=self.timeout,
            )
        except RetryableError as exc:
            logger.warning("verifier unreachable (%s); treating as uncertain", exc)
            return None
        if response.status != 200:
            return None
        try:
            choice = json.loads(response.text).get("choice", "")
        except (json.JSONDecodeError, AttributeError):
            return None
        if choice in {c.url for c in candidates}:
            return choice
        return None


def _rule_only(ordered: list[ScoredCandidate], thresholds: SelectionThresholds,
               mode: SelectionMode) -> SelectionResult:
    if not ordered:
        return SelectionResult(None, mode, SelectionReason.NO_CANDIDATES, 0)
    considered = len(ordered)
    if considered == 1:
        return SelectionResult(ordered[0].url, mode, SelectionReason.SINGLE_CANDIDATE, 1)

    s1, s2 = ordered[0].score, ordered[1].score
    if s1 >= thresholds.tau_high:
        return SelectionResult(ordered[0].url, mode, SelectionReason.HIGH_CONFIDENCE, considered)
    if s1 >= thresholds.tau_mid and s1 - s2 >= thresholds.delta:
        return SelectionResult(ordered[0].url, mode, SelectionReason.MARGIN, considered)

    top = ordered[: thresholds.top_k]
    preferred = [c for c in top if is_preferred_host(c.url)]
    if preferred:
        landing = [c for c in preferred if not is_direct_file_link(c.url)]
        pick = (landing or preferred)[0]
        reason = SelectionReason.PREFERRED_HOST
    else:
        pick = ordered[0]
        reason = SelectionReason.GENERAL_TIEBREAK
    if pick.score < thresholds.tau_min:
        return SelectionResult(None, mode, SelectionReason.REJECTED_BELOW_MIN, considered)
    return SelectionResult(pick.url, mode, reason, considered)


def _with_fallback_reason(result: SelectionResult) -> SelectionResult:
    if result.primary_url is None:
        return result
    return SelectionResult(result.primary_url, result.mode,
                           SelectionReason.LLM_FALLBACK, result.considered)


def select_primary(
    scored: list[ScoredCandidate],
    thresholds: SelectionThresholds = SelectionThresholds(),
    mode: SelectionMode = SelectionMode.HYBRID,
    verifier: VerifierClient | None = None,
) -> SelectionResult:
    """Choose the primary dataset URL under the configured mode."""
    ordered = sorted(scored, key=rank_key)

    if mode == SelectionMode.RULE_ONLY:
        return _rule_only(ordered, thresholds, mode)

    if mode == SelectionMode.LLM_ONLY:
        if not ordered:
            return SelectionResult(None, mode, SelectionReason.NO_CANDIDATES, 0)
        choice = verifier.choose(ordered) if verifier is not None else None
        if choice is not None:
            return SelectionResult(choice, mode, SelectionReason.LLM_CHOICE, len(ordered))
        return _with_fallback_reason(_rule_only(ordered, thresholds, mode))

    survivors = [c for c in ordered if c.score > 0]
    if not survivors:
        return SelectionResult(None, mode, SelectionReason.NO_CANDIDATES, 0)
    choice = verifier.choose(survivors) if verifier is not None else None
    if choice is not None:
        return SelectionResult(choice, mode, SelectionReason.LLM_CHOICE, len(survivors))
    return _with_fallback_reason(_rule_only(survivors, thresholds, mode))
