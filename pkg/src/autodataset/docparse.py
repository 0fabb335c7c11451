"""PDF fetch and sentence-segmented document parsing.

The primary path posts the PDF to a GROBID-compatible service and reads
sentence elements out of the TEI response. When the service is down, a
plaintext fallback (local PDF text extraction plus the rule-based
sentence splitter) produces the same document type, flagged so that
downstream consumers can tell the two apart.
"""

from __future__ import annotations

import logging
import threading
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .errors import (
    PermanentSkipError,
    RetryableError,
    UnprocessableDocumentError,
)
from .ingest import PaperMeta
from .pdftext import extract_pdf_text
from .textutil import normalize_ws, split_sentences
from .transport import Transport, TransportTimeout

logger = logging.getLogger(__name__)

_TEI = "{http://www.tei-c.org/ns/1.0}"

DEFAULT_TOKEN_BUDGET = 512

Tokenizer = Callable[[str], int]


def whitespace_token_count(text: str) -> int:
    """Default tokenizer: whitespace-delimited token count."""
    return len(text.split())


class ParseSource(str, Enum):
    STRUCTURED_SERVICE = "structured_service"
    PLAINTEXT_FALLBACK = "plaintext_fallback"


@dataclass
class Sentence:
    index: int
    text: str
    section: str | None
    token_count: int


@dataclass
class ParsedDocument:
    paper_id: str
    sentences: list[Sentence]
    parse_source: ParseSource

    def body_text(self) -> str:
        return " ".join(s.text for s in self.sentences)


def fetch_pdf(
    meta: PaperMeta,
    transport: Transport,
    retry_cap: int = 3,
    backoff_base: float = 0.5,
    semaphore: threading.Semaphore | None = None,
) -> bytes:
    """Download the canonical PDF, honoring the download concurrency bound.

    404 and non-PDF responses are permanent skips; timeouts retry with
    exponential backoff up to ``retry_cap`` additional attempts.
    """
    attempt = 0
    while True:
        try:
            if semaphore is not None:
                with semaphore:
                    response = transport.get(meta.pdf_url)
            else:
                response = transport.get(meta.pdf_url)
        except TransportTimeout:
            if attempt >= retry_cap:
                raise
            time.sleep(backoff_base * (2**attempt))
            attempt += 1
            continue

        if response.status == 404:
            raise PermanentSkipError(f"PDF missing for {meta.paper_id}", reason="pdf_missing")
        if response.status != 200:
            raise RetryableError(
                f"PDF fetch for {meta.paper_id} returned status {response.status}",
                url=meta.pdf_url,
            )
        content_type = response.content_type.lower()
        if content_type and "pdf" not in content_type:
            raise PermanentSkipError(
                f"non-PDF content-type {content_type!r} for {meta.paper_id}",
                reason="not_pdf",
            )
        if not content_type and not response.body.startswith(b"%PDF"):
            raise PermanentSkipError(
                f"response for {meta.paper_id} lacks a PDF header", reason="not_pdf"
            )
        return response.body


class StructuredParseClient:
    """GROBID-compatible client: multipart PDF upload, TEI XML back."""

    def __init__(self, base_url: str, transport: Transport, timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.transport = transport
        self.timeout = timeout

    @property
    def fulltext_url(self) -> str:
        return self.base_url + "/api/processFulltextDocument"

    def parse(self, pdf_bytes: bytes) -> str:
        response = self.transport.post(
            self.fulltext_url,
            files={"input": ("document.pdf", pdf_bytes, "application/pdf")},
            timeout=self.timeout,
        )
        if response.status != 200:
            raise RetryableError(
                f"structured parse service returned status {response.status}",
                url=self.fulltext_url,
            )
        return response.text


def _tei_sentences(tei_xml: str, tokenizer: Tokenizer) -> list[Sentence]:
    root = ET.fromstring(tei_xml)
    parent_map = {child: parent for parent in root.iter() for child in parent}

    def section_of(node: ET.Element) -> str | None:
        cursor = node
        while cursor in parent_map:
            cursor = parent_map[cursor]
            if cursor.tag == _TEI + "div" or cursor.tag == "div":
                head = cursor.find(_TEI + "head")
                if head is None:
                    head = cursor.find("head")
                if head is not None:
                    return normalize_ws("".join(head.itertext())) or None
        return None

    sentences: list[Sentence] = []

    def append(text: str, section: str | None):
        text = normalize_ws(text)
        if not text:
            return
        count = tokenizer(text)
        if count < 1:
            return
        sentences.append(Sentence(len(sentences), text, section, count))

    s_nodes = [n for n in root.iter() if n.tag in (_TEI + "s", "s")]
    if s_nodes:
        for node in s_nodes:
            append("".join(node.itertext()), section_of(node))
    else:
        for node in root.iter():
            if node.tag in (_TEI + "p", "p"):
                section = section_of(node)
                for piece in split_sentences("".join(node.itertext())):
                    append(piece, section)
    return sentences


def parse_sentences(
    pdf_bytes: bytes,
    service: StructuredParseClient | None,
    paper_id: str = "",
    tokenizer: Tokenizer = whitespace_token_count,
) -> ParsedDocument:
    """Produce the sentence-segmented document for one PDF.

    Tries the structured service first; on failure falls back to local
    text extraction. Raises UnprocessableDocumentError only when both
    paths fail.
    """
    service_error: Exception | None = None
    if service is not None:
        try:
            tei_xml = service.parse(pdf_bytes)
            return ParsedDocument(paper_id, _tei_sentences(tei_xml, tokenizer),
                                  ParseSource.STRUCTURED_SERVICE)
        except (RetryableError, ET.ParseError) as exc:
            service_error = exc
            logger.warning("structured parse failed for %s (%s); using plaintext fallback",
                           paper_id, exc)

    try:
        raw_text = extract_pdf_text(pdf_bytes)
    except Exception as exc:
        raise UnprocessableDocumentError(
            f"both parse paths failed for {paper_id}: service={service_error}, fallback={exc}"
        ) from exc

    sentences: list[Sentence] = []
    for piece in split_sentences(raw_text):
        count = tokenizer(piece)
        if count >= 1:
            sentences.append(Sentence(len(sentences), piece, None, count))
    return ParsedDocument(paper_id, sentences, ParseSource.PLAINTEXT_FALLBACK)
