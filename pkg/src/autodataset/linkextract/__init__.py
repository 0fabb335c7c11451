"""Dataset link extraction: source fetch, candidate extraction, scoring, selection."""

from .latex import (
    UrlCandidate,
    candidates_from_sentences,
    extract_candidates,
    normalize_url,
    strip_comments,
)
from .scoring import (
    ScoredCandidate,
    is_direct_file_link,
    is_preferred_host,
    recompute_score,
    score_candidate,
)
from .selection import (
    SelectionMode,
    SelectionReason,
    SelectionResult,
    SelectionThresholds,
    VerifierClient,
    rank_key,
    select_primary,
)
from .sources import fetch_source

__all__ = [
    "UrlCandidate",
    "candidates_from_sentences",
    "extract_candidates",
    "normalize_url",
    "strip_comments",
    "ScoredCandidate",
    "score_candidate",
    "recompute_score",
    "is_preferred_host",
    "is_direct_file_link",
    "SelectionMode",
    "SelectionReason",
    "SelectionResult",
    "SelectionThresholds",
    "VerifierClient",
    "rank_key",
    "select_primary",
    "fetch_source",
]
