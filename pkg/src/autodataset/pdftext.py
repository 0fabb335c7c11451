"""Minimal PDF text extraction for the plaintext fallback path.

Handles uncompressed and FlateDecode content streams and the common
text-showing operators (Tj, TJ, ', "). This is deliberately small: the
structured-parse service is the primary path, and this extractor only
needs to keep the pipeline alive when that service is down. Exotic
encodings, CID fonts and ToUnicode maps are out of scope.
"""

from __future__ import annotations

import base64
import re
import zlib

_STREAM_START = re.compile(rb"(?<!end)stream\r?\n")

_ESCAPES = {
    b"n": b"\n", b"r": b"\r", b"t": b"\t", b"b": b"\b", b"f": b"\f",
    b"(": b"(", b")": b")", b"\\": b"\\",
}


def extract_pdf_text(pdf_bytes: bytes) -> str:
    """Extract show-text strings from all content streams, in order."""
    if not pdf_bytes.startswith(b"%PDF"):
        raise ValueError("input does not start with a %PDF header")
    pieces: list[str] = []
    for m in _STREAM_START.finditer(pdf_bytes):
        start = m.end()
        end = pdf_bytes.find(b"endstream", start)
        if end < 0:
            continue
        raw = pdf_bytes[start:end].rstrip(b"\r\n")
        data = _decode_stream(raw)
        if b"BT" not in data:
            continue
        text = _extract_from_content(data)
        if text.strip():
            pieces.append(text)
    return "\n".join(pieces)


def _decode_stream(raw: bytes) -> bytes:
    """Undo the common filter chains: Flate, ASCII85, ASCII85+Flate."""
    try:
        return zlib.decompress(raw)
    except zlib.error:
        pass
    stripped = raw.strip()
    if stripped.endswith(b"~>"):
        stripped = stripped[:-2]
    try:
        decoded = base64.a85decode(re.sub(rb"\s", b"", stripped))
    except ValueError:
        return raw
    try:
        return zlib.decompress(decoded)
    except zlib.error:
        return decoded


def _parse_literal(data: bytes, i: int) -> tuple[bytes, int]:
    """Parse a (...) string literal starting at the opening paren."""
    out = bytearray()
    depth = 1
    i += 1
    n = len(data)
    while i < n and depth > 0:
        c = data[i : i + 1]
        if c == b"\\":
            nxt = data[i + 1 : i + 2]
            if nxt in _ESCAPES:
                out += _ESCAPES[nxt]
                i += 2
            elif nxt.isdigit():
                digits = b""
                j = i + 1
                while j < n and len(digits) < 3 and data[j : j + 1].isdigit():
                    digits += data[j : j + 1]
                    j += 1
                out.append(int(digits, 8) & 0xFF)
                i = j
            else:
                i += 2
        elif c == b"(":
            depth += 1
            out += c
            i += 1
        elif c == b")":
            depth -= 1
            if depth > 0:
                out += c
            i += 1
        else:
            out += c
            i += 1
    return bytes(out), i


def _parse_hex(data: bytes, i: int) -> tuple[bytes, int]:
    end = data.find(b">", i)
    if end < 0:
        return b"", len(data)
    hexdigits = re.sub(rb"\s", b"", data[i + 1 : end])
    if len(hexdigits) % 2:
        hexdigits += b"0"
    try:
        return bytes.fromhex(hexdigits.decode("ascii")), end + 1
    except ValueError:
        return b"", end + 1


def _extract_from_content(data: bytes) -> str:
    """Walk a content stream emitting strings at show-text operators."""
    pieces: list[bytes] = []
    pending: list[bytes] = []
    token = bytearray()
    i = 0
    n = len(data)

    def flush_token():
        op = bytes(token)
        token.clear()
        if op in (b"Tj", b"'", b'"', b"TJ"):
            if pending:
                pieces.append(b"".join(pending))
                pending.clear()
            if op in (b"'", b'"', b"T*"):
                pieces.append(b"\n")
        elif op in (b"Td", b"TD", b"T*", b"ET"):
            pending.clear()
            pieces.append(b"\n")

    while i < n:
        c = data[i : i + 1]
        if c == b"(":
            if token:
                flush_token()
            literal, i = _parse_literal(data, i)
            pending.append(literal)
        elif c == b"<" and data[i + 1 : i + 2] != b"<":
            if token:
                flush_token()
            literal, i = _parse_hex(data, i)
            pending.append(literal)
        elif c.isspace() or c in b"[]":
            if token:
                flush_token()
            i += 1
        else:
            token += c
            i += 1
    if token:
        flush_token()

    text = b"".join(pieces).decode("latin-1", errors="replace")
    return re.sub(r"\n{2,}", "\n", text).strip()
