"""arXiv feed ingestion: poll the export API and parse entries to PaperMeta."""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone
from urllib.parse import urlencode

from .errors import FeedParseError, RateLimitError, RetryableError
from .textutil import normalize_ws
from .transport import Transport

logger = logging.getLogger(__name__)

EXPORT_API_URL = "https://export.arxiv.org/api/query"
ABS_URL_TEMPLATE = "https://arxiv.org/abs/{paper_id}"
PDF_URL_TEMPLATE = "https://arxiv.org/pdf/{paper_id}.pdf"
SOURCE_URL_TEMPLATE = "https://arxiv.org/e-print/{paper_id}"

# The six monitored computer science categories.
DEFAULT_CATEGORIES = ("cs.IR", "cs.DB", "cs.AI", "cs.CL", "cs.CV", "cs.MA")

# arXiv archive prefixes accepted when validating category codes.
KNOWN_ARCHIVES = {
    "cs", "stat", "math", "eess", "econ", "physics", "q-bio", "q-fin",
    "astro-ph", "cond-mat", "gr-qc", "hep-ex", "hep-lat", "hep-ph",
    "hep-th", "math-ph", "nlin", "nucl-ex", "nucl-th", "quant-ph",
}

_ATOM = "{http://www.w3.org/2005/Atom}"


def is_valid_category(code: str) -> bool:
    if "." not in code:
        return code in KNOWN_ARCHIVES
    archive, _, rest = code.partition(".")
    return archive in KNOWN_ARCHIVES and rest.isalnum() and 1 < len(rest) <= 4


@dataclass(frozen=True)
class CategorySet:
    """Ordered set of arXiv category codes to monitor."""

    codes: tuple[str, ...] = DEFAULT_CATEGORIES

    def __post_init__(self):
        if not self.codes:
            raise ValueError("CategorySet must contain at least one category")
        deduped = tuple(dict.fromkeys(self.codes))
        object.__setattr__(self, "codes", deduped)
        for code in deduped:
            if not is_valid_category(code):
                raise ValueError(f"unknown arXiv category code: {code!r}")

    def intersects(self, categories: list[str]) -> bool:
        return any(c in self.codes for c in categories)


@dataclass
class PaperMeta:
    """One arXiv submission as seen by the pipeline."""

    paper_id: str
    title: str
    abstract: str
    categories: list[str]
    submitted_at: datetime
    pdf_url: str = ""
    source_url: str = ""

    def __post_init__(self):
        if not self.paper_id:
            raise ValueError("paper_id must be non-empty")
        if not self.pdf_url:
            self.pdf_url = PDF_URL_TEMPLATE.format(paper_id=self.paper_id)
        if not self.source_url:
            self.source_url = SOURCE_URL_TEMPLATE.format(paper_id=self.paper_id)

    @property
    def abs_url(self) -> str:
        return ABS_URL_TEMPLATE.format(paper_id=self.paper_id)


@dataclass
class ParsedFeed:
    """Result of parsing one feed page: entries kept plus skip count."""

    papers: list[PaperMeta] = field(default_factory=list)
    skipped: int = 0


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp, accepting the 'Z' suffix, to UTC."""
    value = value.strip()
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _byte_offset(feed_bytes: bytes, line: int, column: int) -> int:
    lines = feed_bytes.split(b"\n")
    return sum(len(l) + 1 for l in lines[: line - 1]) + column


def _entry_text(entry: ET.Element, tag: str) -> str | None:
    node = entry.find(_ATOM + tag)
    if node is None or node.text is None:
        return None
    return normalize_ws(node.text)


def parse_feed(feed_bytes: bytes) -> ParsedFeed:
    """Parse an Atom feed page into PaperMeta records.

    Title and abstract are whitespace-normalized. Entries without an id
    are skipped and counted; entries missing title, abstract or a
    submission time are skipped and logged.
    """
    try:
        root = ET.fromstring(feed_bytes)
    except ET.ParseError as exc:
        line, column = exc.position
        raise FeedParseError(
            f"feed is not parseable XML: {exc}",
            offset=_byte_offset(feed_bytes, line, column),
        ) from exc

    result = ParsedFeed()
    for entry in root.findall(_ATOM + "entry"):
        raw_id = _entry_text(entry, "id")
        paper_id = _strip_id_prefix(raw_id) if raw_id else None
        if not paper_id:
            result.skipped += 1
            continue
        title = _entry_text(entry, "title")
        abstract = _entry_text(entry, "summary")
        published = _entry_text(entry, "published")
        if not title or not abstract or not published:
            logger.warning("skipping feed entry %s: missing title/abstract/published", paper_id)
            result.skipped += 1
            continue
        categories = [
            cat.get("term", "")
            for cat in entry.findall(_ATOM + "category")
            if cat.get("term")
        ]
        result.papers.append(
            PaperMeta(
                paper_id=paper_id,
                title=title,
                abstract=abstract,
                categories=categories,
                submitted_at=parse_timestamp(published),
            )
        )
    return result


def _strip_id_prefix(raw_id: str) -> str:
    for prefix in ("http://arxiv.org/abs/", "https://arxiv.org/abs/"):
        if raw_id.startswith(prefix):
            return raw_id[len(prefix) :]
    return raw_id


def build_query_url(
    categories: CategorySet, start: int, page_size: int, base_url: str = EXPORT_API_URL
) -> str:
    """Deterministic export-API query URL for one result page."""
    query = " OR ".join(f"cat:{c}" for c in categories.codes)
    params = {
        "search_query": query,
        "start": start,
        "max_results": page_size,
        "sortBy": "submittedDate",
        "sortOrder": "descending",
    }
    return base_url + "?" + urlencode(params)


def fetch_new_papers(
    categories: CategorySet,
    window_start: datetime,
    window_end: datetime,
    transport: Transport,
    page_size: int = 100,
    base_url: str = EXPORT_API_URL,
    max_pages: int = 50,
) -> list[PaperMeta]:
    """Fetch submissions in [window_start, window_end) for the categories.

    Pages through the feed (newest first), keeps entries whose category
    list intersects ``categories`` and whose submission time falls in
    the half-open window, deduplicates by paper_id and returns them in
    submission-time ascending order.
    """
    if window_start > window_end:
        raise ValueError("window_start must not exceed window_end")
    if window_start == window_end:
        return []

    seen: dict[str, PaperMeta] = {}
    for page in range(max_pages):
        url = build_query_url(categories, page * page_size, page_size, base_url)
        response = transport.get(url)
        if response.status == 429 or (
            response.status == 503 and "retry-after" in {k.lower() for k in response.headers}
        ):
            retry_after = 30.0
            for key, value in response.headers.items():
                if key.lower() == "retry-after":
                    try:
                        retry_after = float(value)
                    except ValueError:
                        pass
            raise RateLimitError(f"feed rate-limited (status {response.status})",
                                 retry_after=retry_after, url=url)
        if response.status != 200:
            raise RetryableError(f"feed fetch failed with status {response.status}", url=url)

        parsed = parse_feed(response.body)
        for meta in parsed.papers:
            if not categories.intersects(meta.categories):
                continue
            if not (window_start <= meta.submitted_at < window_end):
                continue
            seen.setdefault(meta.paper_id, meta)

        if len(parsed.papers) < page_size:
            break
        if parsed.papers and all(m.submitted_at < window_start for m in parsed.papers):
            break

    return sorted(seen.values(), key=lambda m: (m.submitted_at, m.paper_id))
