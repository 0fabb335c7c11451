"""Shared fixture builders: feeds, TEI documents, source archives, PDFs."""

from __future__ import annotations

import gzip
import io
import json
import tarfile
from pathlib import Path
from xml.sax.saxutils import escape

import pytest

from autodataset.transport import FixtureTransport

ATOM_FEED_TEMPLATE = """<?xml version="1.0" encoding="UTF-8"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <title>ArXiv Query Results</title>
{entries}
</feed>
"""

ATOM_ENTRY_TEMPLATE = """  <entry>
    {id_line}
    <published>{published}</published>
    <updated>{published}</updated>
    {title_line}
    {summary_line}
{categories}
  </entry>"""


def make_feed(entries: list[dict]) -> bytes:
    """Build an Atom feed; entry keys: paper_id, title, abstract,
    categories, published. Set a key to None to omit its element."""
    rendered = []
    for entry in entries:
        paper_id = entry.get("paper_id")
        id_line = (
            f"<id>http://arxiv.org/abs/{escape(paper_id)}</id>" if paper_id else "<!-- no id -->"
        )
        title = entry.get("title")
        title_line = f"<title>{escape(title)}</title>" if title is not None else "<!-- no title -->"
        abstract = entry.get("abstract")
        summary_line = (
            f"<summary>{escape(abstract)}</summary>" if abstract is not None else "<!-- none -->"
        )
        categories = "\n".join(
            f'    <category term="{escape(c)}" scheme="http://arxiv.org/schemas/atom"/>'
            for c in entry.get("categories", [])
        )
        rendered.append(
            ATOM_ENTRY_TEMPLATE.format(
                id_line=id_line,
                published=entry.get("published", "2024-01-05T12:30:00Z"),
                title_line=title_line,
                summary_line=summary_line,
                categories=categories,
            )
        )
    return ATOM_FEED_TEMPLATE.format(entries="\n".join(rendered)).encode("utf-8")


TEI_TEMPLATE = """<?xml version="1.0" encoding="UTF-8"?>
<TEI xmlns="http://www.tei-c.org/ns/1.0">
  <teiHeader/>
  <text><body>
{divs}
  </body></text>
</TEI>
"""


def make_tei(sections: list[tuple[str | None, list[str]]]) -> str:
    """Build TEI XML: [(section_head, [sentence, ...]), ...]."""
    divs = []
    for head, sentences in sections:
        head_el = f"<head>{escape(head)}</head>" if head else ""
        body = "".join(f"<s>{escape(s)}</s>" for s in sentences)
        divs.append(f"    <div>{head_el}<p>{body}</p></div>")
    return TEI_TEMPLATE.format(divs="\n".join(divs))


def make_targz(files: dict[str, str]) -> bytes:
    """Deterministic tar.gz of text files (mtime pinned to 0)."""
    tar_buf = io.BytesIO()
    with tarfile.open(fileobj=tar_buf, mode="w", format=tarfile.USTAR_FORMAT) as tar:
        for name in sorted(files):
            data = files[name].encode("utf-8")
            info = tarfile.TarInfo(name)
            info.size = len(data)
            info.mtime = 0
            tar.addfile(info, io.BytesIO(data))
    out = io.BytesIO()
    with gzip.GzipFile(fileobj=out, mode="wb", mtime=0) as gz:
        gz.write(tar_buf.getvalue())
    return out.getvalue()


def make_gz(content: str, name: str = "main.tex") -> bytes:
    """Deterministic single-file gzip carrying the original filename."""
    out = io.BytesIO()
    with gzip.GzipFile(filename=name, fileobj=out, mode="wb", mtime=0) as gz:
        gz.write(content.encode("utf-8"))
    return out.getvalue()


def make_pdf(lines: list[str]) -> bytes:
    """Small real PDF (reportlab) for plaintext-fallback tests."""
    from reportlab.lib.pagesizes import letter
    from reportlab.pdfgen import canvas

    buf = io.BytesIO()
    page = canvas.Canvas(buf, pagesize=letter)
    text = page.beginText(72, 720)
    for line in lines:
        text.textLine(line)
    page.drawText(text)
    page.showPage()
    page.save()
    return buf.getvalue()


class FixtureBuilder:
    """Assemble a FixtureTransport directory programmatically."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.responses: dict = {}
        self.post_responses: dict = {}
        self._counter = 0

    def _store(self, body: bytes, suffix: str) -> str:
        name = f"body{self._counter:04d}{suffix}"
        self._counter += 1
        (self.root / name).write_bytes(body)
        return name

    def entry(self, body: bytes | str = b"", status: int = 200,
              content_type: str | None = None, error: str | None = None,
              suffix: str = ".bin", headers: dict | None = None) -> dict:
        if error:
            return {"error": error}
        if isinstance(body, str):
            body = body.encode("utf-8")
        spec: dict = {"status": status, "file": self._store(body, suffix)}
        if content_type:
            spec["content_type"] = content_type
        if headers:
            spec["headers"] = headers
        return spec

    def add_get(self, url: str, *entries: dict):
        self.responses[url] = list(entries) if len(entries) > 1 else entries[0]

    def add_post(self, url: str, spec: dict):
        self.post_responses[url] = spec

    def build(self) -> FixtureTransport:
        manifest = {"responses": self.responses, "post_responses": self.post_responses}
        (self.root / "manifest.json").write_text(json.dumps(manifest, indent=1), "utf-8")
        return FixtureTransport(self.root)


@pytest.fixture
def fixture_builder(tmp_path):
    return FixtureBuilder(tmp_path / "fixtures")


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    from corpus import build_corpus

    return build_corpus(tmp_path_factory.mktemp("corpus") / "fixtures")


def mask_timestamps(jsonl_line: str) -> str:
    import re

    return re.sub(r'"(first_seen|last_seen)": "[^"]*"', r'"\1": "<TS>"', jsonl_line)
