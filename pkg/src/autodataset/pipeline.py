"""Four-stage pipeline composition and the crawl worker pool.

One paper flows gate -> docparse -> (description extraction and link
extraction, both always run after parsing) -> record assembly. Link
extraction does not depend on the description outcome, so a paper that
gets reclassified negative still exercises the link stage; its result
is simply discarded at the join point. Stage failures become audited
skip-dispositions and never halt the crawl loop.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import time
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from . import descextract, docparse, gate, ingest, linkextract
from .config import CrawlConfig, PipelineSettings
from .errors import (
    ArchiveTooLargeError,
    PermanentSkipError,
    PipelineError,
    RateLimitError,
    RetryableError,
    SourceUnavailableError,
)
from .recordindex import (
    DatasetRecord,
    Embedder,
    RecordIndex,
    ReferenceEmbedder,
    RemoteEmbedder,
)
from .transport import HttpTransport, FixtureTransport, Transport

logger = logging.getLogger(__name__)

MAX_REQUEUES = 2


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


class CrawlState(str, Enum):
    IDLE = "idle"
    RUNNING = "running"
    STOPPING = "stopping"


class ConflictError(PipelineError):
    """Crawl lifecycle operation not valid in the current state."""


@dataclass
class CrawlStatus:
    state: str = CrawlState.IDLE.value
    run_id: str | None = None
    papers_seen: int = 0
    gate_positives: int = 0
    descriptions_extracted: int = 0
    links_selected: int = 0
    records_written: int = 0
    reclassified_negatives: int = 0
    errors_count: int = 0
    started_at: str | None = None
    last_activity: str | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class PipelineOutcome:
    paper_id: str
    disposition: str  # record_written | gate_negative | reclassified_negative | error
    stage: str | None = None
    record: DatasetRecord | None = None
    detail: str | None = None
    pdf_fallback: bool = False


class AuditLog:
    """Append-only JSONL log of per-paper dispositions."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def write(self, outcome: PipelineOutcome, gate_score: float | None = None):
        entry = {
            "ts": utcnow().isoformat(),
            "paper_id": outcome.paper_id,
            "disposition": outcome.disposition,
            "stage": outcome.stage,
            "detail": outcome.detail,
            "pdf_fallback": outcome.pdf_fallback,
            "gate_score": gate_score,
        }
        with self._lock, self.path.open("a", encoding="utf-8") as fp:
            fp.write(json.dumps(entry, ensure_ascii=False) + "\n")


@dataclass
class PipelineComponents:
    transport: Transport
    gate_backend: gate.GateBackend
    sentence_backend: descextract.SentenceBackend
    parse_client: docparse.StructuredParseClient | None
    verifier: linkextract.VerifierClient | None
    embedder: Embedder
    index: RecordIndex
    settings: PipelineSettings
    audit: AuditLog | None = None
    download_semaphore: threading.Semaphore | None = None


def build_components(
    settings: PipelineSettings,
    config: CrawlConfig,
    transport: Transport | None = None,
    index: RecordIndex | None = None,
) -> PipelineComponents:
    """Wire concrete backends from settings; fixtures swap the transport."""
    if transport is None:
        if settings.fixtures_dir:
            transport = FixtureTransport(settings.fixtures_dir)
        else:
            transport = HttpTransport()

    if settings.gate_backend == "remote":
        if not settings.gate_remote_url:
            raise ValueError("gate.backend=remote requires gate.remote_url")
        gate_backend: gate.GateBackend = gate.RemoteGateBackend(
            settings.gate_remote_url, transport)
    else:
        gate_backend = gate.HeuristicGateBackend()

    if settings.desc_backend == "remote":
        if not settings.desc_remote_url:
            raise ValueError("desc.backend=remote requires desc.remote_url")
        sentence_backend: descextract.SentenceBackend = descextract.RemoteSentenceBackend(
            settings.desc_remote_url, transport)
    else:
        sentence_backend = descextract.HeuristicSentenceBackend()

    parse_client = (
        docparse.StructuredParseClient(settings.docparse_service_url, transport)
        if settings.docparse_service_url
        else None
    )
    verifier = (
        linkextract.VerifierClient(settings.verifier_url, transport)
        if settings.verifier_url
        else None
    )
    if settings.embedder == "remote":
        if not settings.embedder_url:
            raise ValueError("index.embedder=remote requires index.embedder_url")
        embedder: Embedder = RemoteEmbedder(settings.embedder_url, transport)
    else:
        embedder = ReferenceEmbedder(settings.dimension)

    if index is None:
        index = RecordIndex(settings.index_path, embedder)
    audit_path = settings.audit_path or str(Path(settings.index_path) / "audit.jsonl")
    return PipelineComponents(
        transport=transport,
        gate_backend=gate_backend,
        sentence_backend=sentence_backend,
        parse_client=parse_client,
        verifier=verifier,
        embedder=embedder,
        index=index,
        settings=settings,
        audit=AuditLog(audit_path),
        download_semaphore=threading.Semaphore(config.max_downloads),
    )


def _extract_link(
    meta: ingest.PaperMeta,
    doc: docparse.ParsedDocument,
    config: CrawlConfig,
    components: PipelineComponents,
) -> tuple[linkextract.SelectionResult, int | None, bool]:
    """Candidate extraction plus selection; returns (result, chosen rule
    score, whether the PDF-text fallback was used)."""
    pdf_fallback = False
    try:
        files = linkextract.fetch_source(
            meta, components.transport, components.settings.max_decompressed_mb
        )
        candidates = linkextract.extract_candidates(files)
    except SourceUnavailableError:
        pdf_fallback = True
        candidates = linkextract.candidates_from_sentences(
            [s.text for s in doc.sentences])

    scored = [linkextract.score_candidate(c) for c in candidates]
    verifier = components.verifier if config.verifier_enabled else None
    result = linkextract.select_primary(
        scored,
        config.thresholds,
        linkextract.SelectionMode(config.link_mode),
        verifier,
    )
    link_score = None
    if result.primary_url is not None:
        link_score = next((c.score for c in scored if c.url == result.primary_url), None)
    return result, link_score, pdf_fallback


def run_pipeline(
    meta: ingest.PaperMeta,
    config: CrawlConfig,
    components: PipelineComponents,
) -> PipelineOutcome:
    """Run one paper through all stages; returns the disposition."""
    decision = gate.classify(meta, components.gate_backend, config.gate_threshold)
    if not decision.positive:
        outcome = PipelineOutcome(meta.paper_id, "gate_negative", stage="gate",
                                  detail=f"score={decision.score:.4f}")
        if components.audit:
            components.audit.write(outcome, gate_score=decision.score)
        return outcome

    pdf_bytes = docparse.fetch_pdf(
        meta,
        components.transport,
        retry_cap=components.settings.retry_cap,
        semaphore=components.download_semaphore,
    )
    doc = docparse.parse_sentences(pdf_bytes, components.parse_client, meta.paper_id)

    verdicts = descextract.classify_sentences(
        doc,
        components.sentence_backend,
        config.desc_threshold,
        components.settings.token_budget,
        components.settings.seed_radius,
    )
    description = descextract.aggregate_description(doc, verdicts)
    selection, link_score, pdf_fallback = _extract_link(meta, doc, config, components)

    if description.reclassified_negative:
        outcome = PipelineOutcome(meta.paper_id, "reclassified_negative",
                                  stage="descextract", pdf_fallback=pdf_fallback)
        if components.audit:
            components.audit.write(outcome, gate_score=decision.score)
        return outcome

    now = utcnow()
    record = DatasetRecord(
        paper_id=meta.paper_id,
        paper_url=meta.abs_url,
        title=meta.title,
        dataset_url=selection.primary_url,
        description=description.description,
        categories=list(meta.categories),
        gate_score=decision.score,
        link_score=link_score,
        selection_reason=selection.reason.value,
        first_seen=now,
        last_seen=now,
    )
    components.index.upsert_record(record)
    outcome = PipelineOutcome(meta.paper_id, "record_written", record=record,
                              detail=selection.reason.value, pdf_fallback=pdf_fallback)
    if components.audit:
        components.audit.write(outcome, gate_score=decision.score)
    return outcome


class Crawler:
    """One crawl run at a time: a producer feeding N pipeline workers.

    Counters update in stage order per paper, so the monotone chain
    records_written <= descriptions_extracted <= gate_positives <=
    papers_seen holds at every status snapshot.
    """

    def __init__(self, settings: PipelineSettings,
                 components_factory=build_components):
        self.settings = settings
        self._components_factory = components_factory
        self._lock = threading.Lock()
        self._status = CrawlStatus()
        self._stop_event = threading.Event()
        self._threads: list[threading.Thread] = []
        self._components: PipelineComponents | None = None

    # -- status ------------------------------------------------------------

    def status(self) -> CrawlStatus:
        with self._lock:
            return CrawlStatus(**self._status.to_dict())

    def _bump(self, **fields):
        with self._lock:
            for name, delta in fields.items():
                setattr(self._status, name, getattr(self._status, name) + delta)
            self._status.last_activity = utcnow().isoformat()

    @property
    def components(self) -> PipelineComponents | None:
        return self._components

    # -- lifecycle ----------------------------------------------------------

    def start(self, config: CrawlConfig,
              components: PipelineComponents | None = None) -> str:
        config.validate()
        with self._lock:
            if self._status.state != CrawlState.IDLE.value:
                raise ConflictError("a crawl is already running")
            run_id = uuid.uuid4().hex
            self._status = CrawlStatus(
                state=CrawlState.RUNNING.value,
                run_id=run_id,
                started_at=utcnow().isoformat(),
            )
        self._stop_event.clear()
        if components is None:
            components = self._components_factory(self.settings, config)
        self._components = components

        work: queue.Queue = queue.Queue(maxsize=max(4, config.worker_count * 4))
        workers = [
            threading.Thread(target=self._worker, args=(work, config, components),
                             daemon=True, name=f"pipeline-worker-{i}")
            for i in range(config.worker_count)
        ]
        producer = threading.Thread(target=self._produce, args=(work, config, len(workers)),
                                    daemon=True, name="feed-producer")
        waiter = threading.Thread(target=self._wait_for_completion,
                                  args=(producer, workers), daemon=True,
                                  name="crawl-waiter")
        self._threads = [producer, *workers, waiter]
        for worker in workers:
            worker.start()
        producer.start()
        waiter.start()
        return run_id

    def stop(self) -> str:
        """Request drain; returns the state after the request."""
        with self._lock:
            if self._status.state == CrawlState.IDLE.value:
                return CrawlState.IDLE.value
            self._status.state = CrawlState.STOPPING.value
        self._stop_event.set()
        return CrawlState.STOPPING.value

    def join(self, timeout: float | None = None):
        for thread in self._threads:
            thread.join(timeout)

    @property
    def idle(self) -> bool:
        return self.status().state == CrawlState.IDLE.value

    # -- internals ----------------------------------------------------------

    def _produce(self, work: queue.Queue, config: CrawlConfig, worker_count: int):
        categories = ingest.CategorySet(config.categories)
        cursor = config.window.start or utcnow()
        try:
            while not self._stop_event.is_set():
                window_end = config.window.end or utcnow()
                if cursor >= window_end:
                    if config.window.end is not None:
                        break  # bounded window: one pass and done
                    self._stop_event.wait(self.settings.poll_interval_secs)
                    continue
                try:
                    papers = ingest.fetch_new_papers(
                        categories, cursor, window_end,
                        self._components.transport,
                        page_size=self.settings.page_size,
                        base_url=self.settings.feed_base_url,
                    )
                except RateLimitError as exc:
                    logger.warning("feed rate-limited; backing off %.0fs", exc.retry_after)
                    self._bump(errors_count=1)
                    self._stop_event.wait(exc.retry_after)
                    continue
                except RetryableError as exc:
                    logger.warning("feed poll failed: %s", exc)
                    self._bump(errors_count=1)
                    self._stop_event.wait(min(60.0, self.settings.poll_interval_secs))
                    continue
                for meta in papers:
                    if self._stop_event.is_set():
                        break
                    work.put((meta, 0))
                cursor = window_end
                if config.window.end is not None:
                    break
                self._stop_event.wait(self.settings.poll_interval_secs)
        finally:
            for _ in range(worker_count):
                work.put(None)

    def _worker(self, work: queue.Queue, config: CrawlConfig,
                components: PipelineComponents):
        while True:
            item = work.get()
            if item is None:
                return
            meta, _ = item
            self._bump(papers_seen=1)
            outcome = None
            try:
                # Retryable stage failures (backend hiccups, transient
                # network errors) retry in place; the paper is not dropped.
                for attempt in range(MAX_REQUEUES + 1):
                    try:
                        outcome = run_pipeline(meta, config, components)
                        break
                    except RetryableError as exc:
                        if attempt == MAX_REQUEUES or self._stop_event.is_set():
                            self._record_error(meta, components, f"retryable: {exc}")
                            break
                        time.sleep(0.05 * (2**attempt))
            except PermanentSkipError as exc:
                self._record_error(meta, components, f"{exc.reason}: {exc}")
            except (ArchiveTooLargeError, PipelineError) as exc:
                self._record_error(meta, components, str(exc))
            except Exception:
                logger.exception("unexpected failure processing %s", meta.paper_id)
                self._bump(errors_count=1)
            if outcome is None:
                continue

            if outcome.disposition == "gate_negative":
                continue
            self._bump(gate_positives=1)
            if outcome.disposition == "reclassified_negative":
                self._bump(reclassified_negatives=1)
                continue
            self._bump(descriptions_extracted=1)
            if outcome.record is not None and outcome.record.dataset_url is not None:
                self._bump(links_selected=1)
            if outcome.disposition == "record_written":
                self._bump(records_written=1)

    def _record_error(self, meta: ingest.PaperMeta,
                      components: PipelineComponents, detail: str):
        self._bump(errors_count=1)
        outcome = PipelineOutcome(meta.paper_id, "error", stage="pipeline", detail=detail)
        if components.audit:
            components.audit.write(outcome)

    def _wait_for_completion(self, producer: threading.Thread,
                             workers: list[threading.Thread]):
        producer.join()
        for worker in workers:
            worker.join()
        with self._lock:
            self._status.state = CrawlState.IDLE.value
            self._status.last_activity = utcnow().isoformat()


def run_window(
    config: CrawlConfig,
    settings: PipelineSettings,
    transport: Transport | None = None,
    index: RecordIndex | None = None,
    progress=None,
) -> tuple[list[PipelineOutcome], PipelineComponents]:
    """Synchronously process one bounded window; used by the CLI."""
    config.validate()
    if config.window.start is None or config.window.end is None:
        raise ValueError("run_window requires a bounded window")
    components = build_components(settings, config, transport=transport, index=index)
    papers = ingest.fetch_new_papers(
        ingest.CategorySet(config.categories),
        config.window.start,
        config.window.end,
        components.transport,
        page_size=settings.page_size,
        base_url=settings.feed_base_url,
    )
    outcomes: list[PipelineOutcome] = []
    for position, meta in enumerate(papers, start=1):
        try:
            outcomes.append(run_pipeline(meta, config, components))
        except PipelineError as exc:
            outcomes.append(PipelineOutcome(meta.paper_id, "error", stage="pipeline",
                                            detail=str(exc)))
            if components.audit:
                components.audit.write(outcomes[-1])
        if progress is not None:
            progress(position, len(papers))
    return outcomes, components
