"""Dataset record persistence and dense semantic search.

Records live in an append-only JSON-lines journal (one DatasetRecord
per line) with embedding vectors journaled alongside in a companion
file; a periodic snapshot keeps recovery fast. Search is an exact
cosine scan over unit-normalized vectors: at this index's scale a full
dot-product pass is fast, and exactness lets tests compare against a
naive oracle rank-for-rank.

Writes are serialized through one lock; searches read an immutable
view that is swapped atomically after each write.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

from .errors import BackendError
from .ingest import parse_timestamp
from .transport import Transport

DEFAULT_DIMENSION = 256
_UNIT_TOLERANCE = 1e-6

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _iso(dt: datetime) -> str:
    return dt.isoformat()


@dataclass
class DatasetRecord:
    paper_id: str
    paper_url: str
    title: str
    dataset_url: str | None
    description: str
    categories: list[str]
    gate_score: float
    link_score: int | None
    selection_reason: str
    first_seen: datetime
    last_seen: datetime

    def __post_init__(self):
        if not self.paper_id:
            raise ValueError("paper_id must be non-empty")
        if not self.description:
            raise ValueError("description must be non-empty")

    def to_json(self) -> str:
        return json.dumps(
            {
                "paper_id": self.paper_id,
                "paper_url": self.paper_url,
                "title": self.title,
                "dataset_url": self.dataset_url,
                "description": self.description,
                "categories": self.categories,
                "gate_score": self.gate_score,
                "link_score": self.link_score,
                "selection_reason": self.selection_reason,
                "first_seen": _iso(self.first_seen),
                "last_seen": _iso(self.last_seen),
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "DatasetRecord":
        data = json.loads(line)
        return cls(
            paper_id=data["paper_id"],
            paper_url=data["paper_url"],
            title=data["title"],
            dataset_url=data.get("dataset_url"),
            description=data["description"],
            categories=list(data.get("categories", [])),
            gate_score=float(data["gate_score"]),
            link_score=data.get("link_score"),
            selection_reason=data.get("selection_reason", ""),
            first_seen=parse_timestamp(data["first_seen"]),
            last_seen=parse_timestamp(data["last_seen"]),
        )


@dataclass
class EmbeddingVector:
    values: np.ndarray
    norm: float

    @classmethod
    def from_values(cls, values: np.ndarray) -> "EmbeddingVector":
        values = np.asarray(values, dtype=np.float64)
        norm = float(np.linalg.norm(values))
        return cls(values, norm)


@dataclass
class SearchHit:
    record: DatasetRecord
    similarity: float
    rank: int


class Embedder:
    """Text to fixed-dimension vector; implementations declare dimension."""

    name = "abstract"
    dimension = DEFAULT_DIMENSION

    def embed(self, text: str) -> EmbeddingVector:
        raise NotImplementedError


def reference_embed(text: str, dimension: int = DEFAULT_DIMENSION) -> EmbeddingVector:
    """Deterministic feature-hash embedding, unit-normalized.

    Lowercased alphanumeric tokens hash (blake2b) into buckets; counts
    are L2-normalized. Empty text maps to the first basis vector by
    convention so it is still a unit vector.
    """
    values = np.zeros(dimension, dtype=np.float64)
    tokens = _TOKEN_RE.findall(text.lower())
    if not tokens:
        values[0] = 1.0
        return EmbeddingVector(values, 1.0)
    for token in tokens:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        values[int.from_bytes(digest, "big") % dimension] += 1.0
    norm = float(np.linalg.norm(values))
    values /= norm
    return EmbeddingVector(values, 1.0)


class ReferenceEmbedder(Embedder):
    name = "reference"

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.dimension = dimension

    def embed(self, text: str) -> EmbeddingVector:
        return reference_embed(text, self.dimension)


class RemoteEmbedder(Embedder):
    """Remote encoder endpoint; dimension comes from a handshake call."""

    name = "remote"

    def __init__(self, url: str, transport: Transport, timeout: float = 60.0):
        self.url = url.rstrip("/")
        self.transport = transport
        self.timeout = timeout
        response = transport.get(self.url + "/info", timeout=timeout)
        if response.status != 200:
            raise BackendError(f"embedder handshake returned status {response.status}",
                               url=self.url)
        self.dimension = int(json.loads(response.text)["dimension"])

    def embed(self, text: str) -> EmbeddingVector:
        response = self.transport.post(
            self.url + "/embed",
            body=text.encode("utf-8"),
            headers={"Content-Type": "text/plain; charset=utf-8"},
            timeout=self.timeout,
        )
        if response.status != 200:
            raise BackendError(f"embedder returned status {response.status}", url=self.url)
        values = np.asarray(json.loads(response.text), dtype=np.float64)
        if values.shape != (self.dimension,):
            raise BackendError(
                f"embedder returned {values.shape} values, expected {self.dimension}",
                url=self.url,
            )
        norm = float(np.linalg.norm(values))
        if norm == 0.0:
            raise BackendError("embedder returned a zero vector", url=self.url)
        return EmbeddingVector(values / norm, 1.0)


@dataclass
class _Entry:
    record: DatasetRecord
    vector: np.ndarray | None
    pending: bool


@dataclass(frozen=True)
class _SearchView:
    records: tuple[DatasetRecord, ...] = ()
    matrix: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))


class RecordIndex:
    """Single-writer, multi-reader record store with exact cosine search."""

    def __init__(self, path: str | Path, embedder: Embedder,
                 snapshot_every: int = 1000):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.embedder = embedder
        self.snapshot_every = snapshot_every
        self._records_journal = self.path / "records.jsonl"
        self._vectors_journal = self.path / "vectors.jsonl"
        self._records_snapshot = self.path / "snapshot_records.jsonl"
        self._vectors_snapshot = self.path / "snapshot_vectors.jsonl"
        self._meta_path = self.path / "meta.json"
        self._entries: dict[str, _Entry] = {}
        self._lock = threading.Lock()
        self._writes_since_snapshot = 0
        self._check_meta()
        self._recover()
        self._view = self._build_view()

    def _check_meta(self):
        if self._meta_path.exists():
            meta = json.loads(self._meta_path.read_text("utf-8"))
            if meta.get("dimension") != self.embedder.dimension:
                raise ValueError(
                    f"index at {self.path} was built with dimension "
                    f"{meta.get('dimension')}, embedder declares "
                    f"{self.embedder.dimension}; reindex required"
                )
        else:
            self._meta_path.write_text(
                json.dumps({"dimension": self.embedder.dimension,
                            "embedder": self.embedder.name}),
                "utf-8",
            )

    @staticmethod
    def _read_jsonl(path: Path) -> list[dict]:
        if not path.exists():
            return []
        rows = []
        with path.open("r", encoding="utf-8") as fp:
            for line in fp:
                line = line.strip()
                if not line:
                    continue
                try:
                    rows.append(json.loads(line))
                except json.JSONDecodeError:
                    break  # torn tail after a crash; everything before it is intact
        return rows

    def _recover(self):
        vectors: dict[str, np.ndarray | None] = {}
        for source in (self._vectors_snapshot, self._vectors_journal):
            for row in self._read_jsonl(source):
                values = row.get("values")
                vectors[row["paper_id"]] = (
                    np.asarray(values, dtype=np.float64) if values is not None else None
                )
        for source in (self._records_snapshot, self._records_journal):
            for row in self._read_jsonl(source):
                record = DatasetRecord.from_json(json.dumps(row))
                vector = vectors.get(record.paper_id)
                self._entries[record.paper_id] = _Entry(record, vector, vector is None)

    def _build_view(self) -> _SearchView:
        live = [e for e in self._entries.values() if not e.pending and e.vector is not None]
        live.sort(key=lambda e: e.record.paper_id)
        if not live:
            return _SearchView((), np.zeros((0, self.embedder.dimension)))
        matrix = np.vstack([e.vector for e in live])
        return _SearchView(tuple(e.record for e in live), matrix)

    @staticmethod
    def _append_fsync(path: Path, line: str):
        with path.open("a", encoding="utf-8") as fp:
            fp.write(line + "\n")
            fp.flush()
            os.fsync(fp.fileno())

    def __len__(self) -> int:
        return len(self._entries)

    def upsert_record(self, record: DatasetRecord) -> str:
        """Embed the description and durably persist the record.

        Returns the record id (its paper_id) after both journals are
        fsynced. Re-upserting an existing paper_id replaces the record
        and vector, preserves first_seen, and advances last_seen. If
        the embedder fails, the record is persisted pending-embedding
        and excluded from search until repair_pending() succeeds.
        """
        with self._lock:
            existing = self._entries.get(record.paper_id)
            if existing is not None:
                record.first_seen = existing.record.first_seen
            vector: np.ndarray | None
            pending = False
            try:
                vector = self.embedder.embed(record.description).values
            except Exception:
                vector = None
                pending = True
            self._append_fsync(self._records_journal, record.to_json())
            self._append_fsync(
                self._vectors_journal,
                json.dumps({
                    "paper_id": record.paper_id,
                    "values": vector.tolist() if vector is not None else None,
                }),
            )
            self._entries[record.paper_id] = _Entry(record, vector, pending)
            self._writes_since_snapshot += 1
            self._view = self._build_view()
            if self._writes_since_snapshot >= self.snapshot_every:
                self._snapshot_locked()
        return record.paper_id

    def repair_pending(self) -> int:
        """Re-embed records whose embedding previously failed."""
        repaired = 0
        with self._lock:
            for entry in self._entries.values():
                if not entry.pending:
                    continue
                try:
                    vector = self.embedder.embed(entry.record.description).values
                except Exception:
                    continue
                entry.vector = vector
                entry.pending = False
                self._append_fsync(
                    self._vectors_journal,
                    json.dumps({"paper_id": entry.record.paper_id,
                                "values": vector.tolist()}),
                )
                repaired += 1
            if repaired:
                self._view = self._build_view()
        return repaired

    def pending_count(self) -> int:
        return sum(1 for e in self._entries.values() if e.pending)

    def _snapshot_locked(self):
        tmp_records = self._records_snapshot.with_suffix(".tmp")
        tmp_vectors = self._vectors_snapshot.with_suffix(".tmp")
        ordered = sorted(self._entries.values(), key=lambda e: e.record.paper_id)
        with tmp_records.open("w", encoding="utf-8") as fp:
            for entry in ordered:
                fp.write(entry.record.to_json() + "\n")
            fp.flush()
            os.fsync(fp.fileno())
        with tmp_vectors.open("w", encoding="utf-8") as fp:
            for entry in ordered:
                fp.write(json.dumps({
                    "paper_id": entry.record.paper_id,
                    "values": entry.vector.tolist() if entry.vector is not None else None,
                }) + "\n")
            fp.flush()
            os.fsync(fp.fileno())
        tmp_records.replace(self._records_snapshot)
        tmp_vectors.replace(self._vectors_snapshot)
        self._records_journal.write_text("", "utf-8")
        self._vectors_journal.write_text("", "utf-8")
        self._writes_since_snapshot = 0

    def snapshot(self):
        with self._lock:
            self._snapshot_locked()

    def get(self, paper_id: str) -> DatasetRecord | None:
        entry = self._entries.get(paper_id)
        return entry.record if entry else None

    def records(self, offset: int = 0, limit: int = 100) -> list[DatasetRecord]:
        ordered = sorted(self._entries.values(), key=lambda e: e.record.paper_id)
        return [e.record for e in ordered[offset : offset + limit]]

    def search_vector(self, query: np.ndarray, k: int) -> list[SearchHit]:
        """Exact top-k by cosine over all non-pending vectors.

        Stored vectors and the query are unit-normalized, so the dot
        product equals cosine similarity. Ties break by ascending
        paper_id.
        """
        if k < 1:
            raise ValueError("k must be at least 1")
        view = self._view
        if not view.records:
            return []
        sims = view.matrix @ np.asarray(query, dtype=np.float64)
        order = sorted(range(len(view.records)),
                       key=lambda i: (-sims[i], view.records[i].paper_id))
        return [
            SearchHit(view.records[i], float(sims[i]), rank)
            for rank, i in enumerate(order[:k], start=1)
        ]

    def search(self, query: str, k: int = 10) -> list[SearchHit]:
        """Embed the query and run the exact scan; embedder errors surface."""
        try:
            vector = self.embedder.embed(query)
        except BackendError:
            raise
        except Exception as exc:
            raise BackendError(f"query embedding failed: {exc}") from exc
        return self.search_vector(vector.values, k)
