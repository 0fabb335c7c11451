"""Fetch and unpack arXiv e-print source archives."""

from __future__ import annotations

import gzip
import io
import logging
import struct
import tarfile

from ..errors import ArchiveTooLargeError, RetryableError, SourceUnavailableError
from ..ingest import PaperMeta
from ..transport import Transport

logger = logging.getLogger(__name__)

RETAINED_EXTENSIONS = (".tex", ".bib", ".bbl")
DEFAULT_MAX_DECOMPRESSED_MB = 200

_CHUNK = 1 << 20


def _gzip_member_name(blob: bytes) -> str | None:
    """Original filename from the gzip header, if the FNAME flag is set."""
    if len(blob) < 10 or blob[:2] != b"\x1f\x8b":
        return None
    flags = blob[3]
    pos = 10
    if flags & 0x04:  # FEXTRA
        if len(blob) < pos + 2:
            return None
        (xlen,) = struct.unpack("<H", blob[pos : pos + 2])
        pos += 2 + xlen
    if not flags & 0x08:  # FNAME
        return None
    end = blob.find(b"\x00", pos)
    if end < 0:
        return None
    return blob[pos:end].decode("latin-1")


def _gunzip_capped(blob: bytes, cap_bytes: int) -> bytes:
    out = io.BytesIO()
    total = 0
    with gzip.GzipFile(fileobj=io.BytesIO(blob)) as gz:
        while True:
            chunk = gz.read(_CHUNK)
            if not chunk:
                break
            total += len(chunk)
            if total > cap_bytes:
                raise ArchiveTooLargeError(
                    f"decompressed source exceeds cap of {cap_bytes} bytes"
                )
            out.write(chunk)
    return out.getvalue()


def _safe_member_path(name: str) -> str | None:
    name = name.lstrip("./")
    if not name or name.startswith("/") or ".." in name.split("/"):
        return None
    return name


def _retained(name: str) -> bool:
    return name.lower().endswith(RETAINED_EXTENSIONS)


def _extract_tar(data: bytes, cap_bytes: int) -> dict[str, bytes]:
    files: dict[str, bytes] = {}
    total = 0
    with tarfile.open(fileobj=io.BytesIO(data), mode="r:") as tar:
        for member in tar:
            if not member.isreg():
                continue
            path = _safe_member_path(member.name)
            if path is None or not _retained(path):
                continue
            total += member.size
            if total > cap_bytes:
                raise ArchiveTooLargeError(
                    f"decompressed source exceeds cap of {cap_bytes} bytes"
                )
            handle = tar.extractfile(member)
            if handle is None:
                continue
            files[path] = handle.read()
    return files


def _looks_like_latex(blob: bytes) -> bool:
    head = blob[:65536]
    return b"\\documentclass" in head or b"\\begin{document}" in head or b"\\section" in head


def fetch_source(
    meta: PaperMeta,
    transport: Transport,
    max_decompressed_mb: int = DEFAULT_MAX_DECOMPRESSED_MB,
) -> dict[str, bytes]:
    """Download and unpack the e-print archive for a paper.

    Returns a map of archive path to file bytes, keeping only .tex,
    .bib and .bbl entries. Raises SourceUnavailableError when the
    source is withdrawn or contains no usable text files (the caller
    then falls back to URLs from the parsed PDF text), and
    ArchiveTooLargeError when decompression exceeds the size cap.
    """
    cap_bytes = max_decompressed_mb * 1024 * 1024
    response = transport.get(meta.source_url)
    if response.status in (403, 404, 410):
        raise SourceUnavailableError(f"source unavailable for {meta.paper_id} "
                                     f"(status {response.status})")
    if response.status != 200:
        raise RetryableError(
            f"source fetch for {meta.paper_id} returned status {response.status}",
            url=meta.source_url,
        )

    body = response.body
    if body.startswith(b"%PDF"):
        raise SourceUnavailableError(f"source for {meta.paper_id} is PDF-only")

    if body[:2] == b"\x1f\x8b":
        inner_name = _gzip_member_name(body)
        data = _gunzip_capped(body, cap_bytes)
        if data[257:262] == b"ustar":
            files = _extract_tar(data, cap_bytes)
        else:
            name = inner_name if inner_name and _retained(inner_name) else None
            if name is None and _looks_like_latex(data):
                name = "main.tex"
            files = {name: data} if name else {}
    elif body[257:262] == b"ustar":
        files = _extract_tar(body, cap_bytes)
    elif _looks_like_latex(body):
        files = {"main.tex": body}
    else:
        files = {}

    if not files:
        raise SourceUnavailableError(f"no .tex/.bib/.bbl files in source for {meta.paper_id}")
    logger.debug("source for %s: %d retained files", meta.paper_id, len(files))
    return files
