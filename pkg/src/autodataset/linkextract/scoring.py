"""Integer-weighted rule scoring of candidate dataset URLs.

All string tests are case-insensitive. Host bonuses test the host+path
string by substring; host penalties test the hostname by domain suffix.
Lexical cues run over the anchor and context combined and are clamped:
positive contribution to at most +8, negative to at least -6. Feature
groups stack (a host bonus and a path hint can both fire on one URL).
"""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import urlparse

from .latex import UrlCandidate

FeatureHit = tuple[str, int, int]  # (feature_id, weight, count)

HOST_POSITIVE: tuple[tuple[str, int], ...] = (
    ("huggingface.co/datasets", 10),
    ("zenodo.org/record", 9),
    ("kaggle.com/datasets", 8),
    ("figshare.com", 8),
    ("dataverse.org", 7),
    ("osf.io", 7),
)

HOST_NEGATIVE: tuple[tuple[str, int], ...] = (
    ("arxiv.org", -10),
    ("doi.org", -10),
    ("acm.org", -9),
    ("ieeexplore.ieee.org", -9),
    ("researchgate.net", -6),
    ("medium.com", -6),
)
SCHOLAR_PREFIX = "scholar.google."
SCHOLAR_WEIGHT = -8

PATH_HINT_PRIMARY = "/dataset"  # also matches "/datasets"; fires once, +3
PATH_HINTS_SECONDARY: tuple[str, ...] = ("/data", "/download", "/files", "/record", "/releases")

EXT_TABULAR: tuple[str, ...] = (".csv", ".tsv", ".json", ".parquet")  # +6
EXT_ARCHIVE: tuple[str, ...] = (".zip", ".tar", ".tar.gz", ".tgz", ".xz", ".7z")  # +5
EXT_RAR: tuple[str, ...] = (".rar",)  # +4

LEXICAL_POSITIVE: tuple[str, ...] = ("dataset", "our dataset", "we release", "available at")
LEXICAL_NEGATIVE: tuple[str, ...] = ("code", "source code", "implementation", "bibtex")
LEXICAL_POSITIVE_CAP = 8
LEXICAL_NEGATIVE_CAP = -6

GITHUB_ROOT_PENALTY = -4


@dataclass
class ScoredCandidate:
    candidate: UrlCandidate
    score: int
    feature_hits: list[FeatureHit]

    @property
    def url(self) -> str:
        return self.candidate.url


def _host_and_path(url: str) -> tuple[str, str]:
    parsed = urlparse(url)
    return (parsed.hostname or "").lower(), parsed.path.lower()


def _host_matches(host: str, pattern: str) -> bool:
    return host == pattern or host.endswith("." + pattern)


def is_preferred_host(url: str) -> bool:
    """True when the URL sits on one of the dataset-first platforms."""
    host, path = _host_and_path(url)
    hostpath = host + path
    return any(pattern in hostpath for pattern, _ in HOST_POSITIVE)


def is_direct_file_link(url: str) -> bool:
    """True when the URL path ends in a known data-file extension."""
    _, path = _host_and_path(url)
    return path.endswith(EXT_TABULAR + EXT_ARCHIVE + EXT_RAR)


def recompute_score(feature_hits: list[FeatureHit]) -> int:
    """Sum feature hits with the lexical caps applied."""
    lexical_pos = lexical_neg = other = 0
    for feature_id, weight, count in feature_hits:
        contribution = weight * count
        if feature_id.startswith("lex+:"):
            lexical_pos += contribution
        elif feature_id.startswith("lex-:"):
            lexical_neg += contribution
        else:
            other += contribution
    return other + min(lexical_pos, LEXICAL_POSITIVE_CAP) + max(lexical_neg, LEXICAL_NEGATIVE_CAP)


def score_candidate(candidate: UrlCandidate) -> ScoredCandidate:
    """Score one candidate; unknown hosts with no cues score 0."""
    host, path = _host_and_path(candidate.url)
    hostpath = host + path
    hits: list[FeatureHit] = []

    for pattern, weight in HOST_POSITIVE:
        if pattern in hostpath:
            hits.append((f"host+:{pattern}", weight, 1))
    for pattern, weight in HOST_NEGATIVE:
        if _host_matches(host, pattern):
            hits.append((f"host-:{pattern}", weight, 1))
    if host.startswith(SCHOLAR_PREFIX):
        hits.append(("host-:scholar.google.*", SCHOLAR_WEIGHT, 1))

    if PATH_HINT_PRIMARY in path:
        hits.append(("path:/dataset", 3, 1))
    # Mask "/dataset(s)" so its "/data" prefix does not double-fire.
    masked = path.replace("/dataset", "/\x00")
    for hint in PATH_HINTS_SECONDARY:
        if hint in masked:
            hits.append((f"path:{hint}", 2, 1))

    for extensions, weight in ((EXT_TABULAR, 6), (EXT_ARCHIVE, 5), (EXT_RAR, 4)):
        matched = next((ext for ext in extensions if path.endswith(ext)), None)
        if matched:
            hits.append((f"ext:{matched}", weight, 1))
            break

    blob = (candidate.anchor + " " + candidate.context).lower()
    for phrase in LEXICAL_POSITIVE:
        if phrase in blob:
            hits.append((f"lex+:{phrase}", 2, 1))
    for phrase in LEXICAL_NEGATIVE:
        if phrase in blob:
            hits.append((f"lex-:{phrase}", -2, 1))

    context = candidate.context.lower()
    if "we evaluate on" in context and "dataset" in context:
        hits.append(("special:eval-dataset", -3, 1))

    if host in ("github.com", "www.github.com"):
        segments = [s for s in path.split("/") if s]
        if len(segments) == 2 and "/releases" not in path and "/data" not in path:
            hits.append(("github:repo-root", GITHUB_ROOT_PENALTY, 1))

    return ScoredCandidate(candidate, recompute_score(hits), hits)
