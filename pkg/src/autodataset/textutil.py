"""Whitespace normalization and the rule-based sentence splitter.

Every stage that compares text across module boundaries relies on the
same normalization, so it lives here rather than in any one module.
"""

from __future__ import annotations

import re

# Tokens that end with '.' but do not terminate a sentence.
_ABBREVIATIONS = {
    "e.g", "i.e", "etc", "et al", "al", "cf", "vs", "viz", "resp",
    "fig", "figs", "eq", "eqs", "sec", "secs", "tab", "no", "nos",
    "vol", "pp", "ch", "dr", "mr", "mrs", "ms", "prof", "inc", "ltd",
    "dept", "univ", "approx",
}

_TERMINAL = re.compile(r"[.!?]+[\"')\]]*")


def normalize_ws(text: str) -> str:
    """Collapse internal whitespace runs to single spaces and strip ends."""
    return " ".join(text.split())


def _is_abbreviation(prefix: str) -> bool:
    """True if the text right before a '.' looks like a non-terminal token."""
    m = re.search(r"([A-Za-z][A-Za-z.]*)$", prefix)
    if not m:
        return False
    token = m.group(1).rstrip(".").lower()
    if token in _ABBREVIATIONS:
        return True
    # Single capital letter: an initial ("J. Smith").
    if len(token) == 1 and m.group(1)[0].isupper():
        return True
    # "et al." guard when the regex only caught "al".
    if token == "al" and prefix.rstrip().lower().endswith("et al"):
        return True
    return False


def split_sentences(text: str) -> list[str]:
    """Split normalized prose into sentences on terminal punctuation.

    A candidate boundary is `.`, `!` or `?` (plus closing quotes or
    brackets) followed by whitespace and an uppercase letter, digit or
    opening quote. Common abbreviations and single-letter initials do
    not split. Dots without following whitespace (URLs, "3.5") never
    split.
    """
    text = normalize_ws(text)
    if not text:
        return []
    sentences: list[str] = []
    start = 0
    for m in _TERMINAL.finditer(text):
        end = m.end()
        if end >= len(text):
            break
        if text[end] != " ":
            continue
        follow = text[end + 1 : end + 2]
        if not follow or not (follow.isupper() or follow.isdigit() or follow in "\"'(["):
            continue
        if "." in m.group(0) and _is_abbreviation(text[start : m.start()]):
            continue
        sentences.append(text[start:end].strip())
        start = end + 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences
