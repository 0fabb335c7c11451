"""Candidate URL extraction from LaTeX sources.

Recognizes \\url{...}, \\href{...}{...} and bare http(s) URLs after
stripping comments, then rebuilds the surrounding plain text with a
lightweight de-macro pass so each link can be anchored to the two
sentences before and after its own sentence.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from urllib.parse import urlparse, urlunparse

from ..textutil import normalize_ws, split_sentences

logger = logging.getLogger(__name__)

CONTEXT_RADIUS = 2  # sentences on each side of the hyperlink's sentence

_BARE_URL = re.compile(r"https?://[^\s{}<>\"'\\]+")
_SENTINEL = "XURLOCC{:04d}X"
_SENTINEL_RE = re.compile(r"XURLOCC(\d{4})X")
_TRAILING_PUNCT = ".,;)"

# Commands whose brace arguments are metadata, not body text.
_DROP_ARG_COMMANDS = {
    "begin", "end", "label", "cite", "citep", "citet", "citealp", "ref",
    "eqref", "autoref", "cref", "Cref", "pageref", "bibliography",
    "bibliographystyle", "addbibresource", "includegraphics", "input",
    "include", "usepackage", "documentclass", "graphicspath", "setlength",
    "newcommand", "renewcommand", "providecommand", "newenvironment",
    "vspace", "hspace", "definecolor", "bibitem",
}


@dataclass
class UrlCandidate:
    url: str
    anchor: str
    context: str
    source_file: str
    occurrence_index: int


@dataclass
class _Occurrence:
    url: str
    anchor: str
    start: int
    end: int
    source_file: str


def strip_comments(text: str) -> str:
    """Drop everything from an unescaped % to end-of-line, keeping newlines."""
    out_lines = []
    for line in text.split("\n"):
        cut = None
        i = 0
        while i < len(line):
            if line[i] == "%":
                backslashes = 0
                j = i - 1
                while j >= 0 and line[j] == "\\":
                    backslashes += 1
                    j -= 1
                if backslashes % 2 == 0:
                    cut = i
                    break
            i += 1
        out_lines.append(line if cut is None else line[:cut])
    return "\n".join(out_lines)


def _match_group(text: str, i: int) -> tuple[str, int] | None:
    """Return (content, index_after_close) for the {...} group at i."""
    if i >= len(text) or text[i] != "{":
        return None
    depth = 0
    j = i
    while j < len(text):
        c = text[j]
        if c == "\\":
            j += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return text[i + 1 : j], j + 1
        j += 1
    return None


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


def strip_trailing_punct(url: str) -> str:
    return url.rstrip(_TRAILING_PUNCT)


def normalize_url(url: str) -> str | None:
    """Canonical form used for deduplication; None for non-http(s) URLs."""
    try:
        parsed = urlparse(url.strip())
    except ValueError:
        return None
    if parsed.scheme.lower() not in ("http", "https") or not parsed.hostname:
        return None
    host = parsed.hostname.lower()
    if parsed.port is not None and parsed.port not in (80, 443):
        host = f"{host}:{parsed.port}"
    path = parsed.path
    if path.endswith("/") and path != "/":
        path = path.rstrip("/")
    return urlunparse((parsed.scheme.lower(), host, path, parsed.params, parsed.query, ""))


def _find_occurrences(text: str, source_file: str) -> list[_Occurrence]:
    occurrences: list[_Occurrence] = []
    consumed: list[tuple[int, int]] = []

    def skip_to_line_end(pos: int):
        # A failed command consumes its line so the bare-URL scan does
        # not re-harvest text from inside the broken braces.
        line_end = text.find("\n", pos)
        consumed.append((pos, len(text) if line_end < 0 else line_end))

    for m in re.finditer(r"\\(url|href)\s*", text):
        name = m.group(1)
        group = _match_group(text, m.end())
        if group is None:
            logger.warning("unbalanced braces after \\%s in %s:%d; occurrence skipped",
                           name, source_file, _line_of(text, m.start()))
            skip_to_line_end(m.start())
            continue
        url_raw, after = group
        anchor = ""
        end = after
        if name == "href":
            anchor_group = _match_group(text, after)
            if anchor_group is None:
                logger.warning("unbalanced anchor braces after \\href in %s:%d; "
                               "occurrence skipped",
                               source_file, _line_of(text, m.start()))
                skip_to_line_end(m.start())
                continue
            anchor_raw, end = anchor_group
            anchor = normalize_ws(demacro(anchor_raw))
        occurrences.append(_Occurrence(normalize_ws(url_raw), anchor, m.start(), end,
                                       source_file))
        consumed.append((m.start(), end))

    for m in _BARE_URL.finditer(text):
        if any(start <= m.start() < end for start, end in consumed):
            continue
        url = strip_trailing_punct(m.group(0))
        if not url:
            continue
        occurrences.append(_Occurrence(url, "", m.start(), m.end(), source_file))

    occurrences.sort(key=lambda o: o.start)
    return occurrences


def demacro(text: str) -> str:
    """Lightweight LaTeX-to-plain-text: drop command names, keep argument text."""
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\":
            m = re.match(r"\\([a-zA-Z]+)\*?", text[i:])
            if m:
                name = m.group(1)
                j = i + m.end()
                while j < n and text[j] == "[":
                    close = text.find("]", j)
                    if close < 0:
                        break
                    j = close + 1
                if name in _DROP_ARG_COMMANDS:
                    while j < n and text[j] == "{":
                        group = _match_group(text, j)
                        if group is None:
                            break
                        j = group[1]
                out.append(" ")
                i = j
                continue
            nxt = text[i + 1 : i + 2]
            out.append(nxt if nxt in "%&_#" else " ")
            i += 2
            continue
        out.append(c)
        i += 1
    plain = "".join(out)
    plain = plain.replace("~", " ").replace("$", " ")
    plain = plain.replace("{", " ").replace("}", " ")
    return plain


def _context_for(sentences: list[str], index: int) -> str:
    before = sentences[max(0, index - CONTEXT_RADIUS) : index]
    after = sentences[index + 1 : index + 1 + CONTEXT_RADIUS]
    return normalize_ws(" ".join(before + after))


def candidates_from_sentences(texts: list[str]) -> list[UrlCandidate]:
    """Fallback extraction: bare URLs in already-parsed document text.

    Used when the e-print source is unavailable. Context is built the
    same way as for LaTeX sources: two sentences either side of the
    sentence carrying the URL.
    """
    raw: list[UrlCandidate] = []
    counter = 0
    for index, text in enumerate(texts):
        for m in _BARE_URL.finditer(text):
            normalized = normalize_url(strip_trailing_punct(m.group(0)))
            if normalized is None:
                continue
            cleaned = [normalize_ws(_BARE_URL.sub(" ", t)) for t in texts]
            raw.append(UrlCandidate(normalized, "", _context_for(cleaned, index),
                                    "pdf-text", counter))
            counter += 1
    best: dict[str, UrlCandidate] = {}
    for candidate in raw:
        kept = best.get(candidate.url)
        if kept is None or len(candidate.context) > len(kept.context):
            best[candidate.url] = candidate
    return sorted(best.values(), key=lambda c: c.occurrence_index)


def extract_candidates(files: dict[str, bytes]) -> list[UrlCandidate]:
    """Extract deduplicated URL candidates with sentence context.

    Context is the two sentences before plus the two after the sentence
    containing the hyperlink. Duplicate URLs (by normalized form) keep
    the occurrence with the longest context.
    """
    raw: list[UrlCandidate] = []
    counter = 0
    for path in sorted(files):
        try:
            text = files[path].decode("utf-8")
        except UnicodeDecodeError:
            text = files[path].decode("latin-1")
        text = strip_comments(text)
        occurrences = _find_occurrences(text, path)
        if not occurrences:
            continue

        # Replace each occurrence with its anchor plus a sentinel token,
        # then de-macro and sentence-split the remainder.
        pieces: list[str] = []
        cursor = 0
        for k, occ in enumerate(occurrences):
            pieces.append(text[cursor : occ.start])
            replacement = _SENTINEL.format(k)
            if occ.anchor:
                replacement = occ.anchor + " " + replacement
            pieces.append(" " + replacement + " ")
            cursor = occ.end
        pieces.append(text[cursor:])
        plain = demacro("".join(pieces))
        sentences = split_sentences(plain)

        location: dict[int, int] = {}
        for idx, sentence in enumerate(sentences):
            for sm in _SENTINEL_RE.finditer(sentence):
                location.setdefault(int(sm.group(1)), idx)
        cleaned = [normalize_ws(_SENTINEL_RE.sub(" ", s)) for s in sentences]

        for k, occ in enumerate(occurrences):
            normalized = normalize_url(occ.url)
            if normalized is None:
                continue
            context = _context_for(cleaned, location[k]) if k in location else ""
            raw.append(UrlCandidate(normalized, occ.anchor, context, path, counter))
            counter += 1

    best: dict[str, UrlCandidate] = {}
    for candidate in raw:
        kept = best.get(candidate.url)
        if kept is None or len(candidate.context) > len(kept.context):
            best[candidate.url] = candidate
    return sorted(best.values(), key=lambda c: c.occurrence_index)
