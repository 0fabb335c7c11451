"""HTTP control plane: config, crawl lifecycle, status, search, records.

All responses are UTF-8 JSON; errors carry a machine-readable ``code``
and a human ``message``. The web UI's static build is served under /
when a static directory is configured.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .config import CrawlConfig, PipelineSettings, load_config_file
from .errors import BackendError
from .pipeline import Crawler, ConflictError, build_components

CONFIG_ENV_VAR = "AUTODATASET_CONFIG"


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(
    settings: PipelineSettings | None = None,
    config: CrawlConfig | None = None,
    transport=None,
) -> FastAPI:
    settings = settings or PipelineSettings()
    config = config or CrawlConfig()
    config.validate()

    app = FastAPI(title="autodataset", version="0.1.0")
    crawler = Crawler(settings)
    # The index (and its embedder) opens eagerly so /search works before
    # any crawl has run in this process.
    components = build_components(settings, config, transport=transport)
    app.state.settings = settings
    app.state.config = config
    app.state.crawler = crawler
    app.state.components = components

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception):
        return _error(500, "internal_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def invalid_request(request: Request, exc: RequestValidationError):
        return _error(422, "invalid_request", str(exc.errors()[:3]))

    @app.get("/config")
    def get_config():
        return app.state.config.to_dict()

    @app.put("/config")
    def put_config(body: dict):
        if not crawler.idle:
            return _error(409, "crawl_running",
                          "configuration is immutable while a crawl is running")
        try:
            new_config = CrawlConfig.from_dict(body)
        except (ValueError, TypeError, KeyError) as exc:
            return _error(400, "invalid_config", str(exc))
        app.state.config = new_config
        return new_config.to_dict()

    @app.post("/crawl/start")
    def crawl_start():
        try:
            run_id = crawler.start(app.state.config, components=components)
        except ConflictError as exc:
            return _error(409, "crawl_running", str(exc))
        except ValueError as exc:
            return _error(400, "invalid_config", str(exc))
        return {"run_id": run_id, "state": crawler.status().state}

    @app.post("/crawl/stop")
    def crawl_stop():
        state = crawler.stop()
        return {"acknowledged": True, "state": state}

    @app.get("/crawl/status")
    def crawl_status():
        return crawler.status().to_dict()

    @app.get("/search")
    def search(q: str = Query(""), k: int = Query(10, ge=1, le=1000)):
        try:
            hits = components.index.search(q, k)
        except BackendError as exc:
            return _error(503, "embedder_unavailable",
                          f"{exc}; retry after the embedding backend recovers")
        return {
            "query": q,
            "k": k,
            "hits": [
                {
                    "rank": hit.rank,
                    "similarity": hit.similarity,
                    "paper_id": hit.record.paper_id,
                    "title": hit.record.title,
                    "description": hit.record.description,
                    "paper_url": hit.record.paper_url,
                    "dataset_url": hit.record.dataset_url,
                    "last_seen": hit.record.last_seen.isoformat(),
                }
                for hit in hits
            ],
        }

    @app.get("/records")
    def records(offset: int = Query(0, ge=0), limit: int = Query(100, ge=1, le=1000)):
        page = components.index.records(offset, limit)
        return {
            "total": len(components.index),
            "offset": offset,
            "records": [
                {
                    "paper_id": r.paper_id,
                    "paper_url": r.paper_url,
                    "title": r.title,
                    "dataset_url": r.dataset_url,
                    "description": r.description,
                    "categories": r.categories,
                    "gate_score": r.gate_score,
                    "link_score": r.link_score,
                    "selection_reason": r.selection_reason,
                    "first_seen": r.first_seen.isoformat(),
                    "last_seen": r.last_seen.isoformat(),
                }
                for r in page
            ],
        }

    static_dir = settings.static_dir
    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def create_default_app() -> FastAPI:
    """App factory for uvicorn; honors the AUTODATASET_CONFIG env var."""
    config_path = os.environ.get(CONFIG_ENV_VAR)
    if config_path:
        config, settings = load_config_file(config_path)
        return create_app(settings, config)
    return create_app()
