"""Crawl configuration (runtime-tunable) and service wiring settings.

CrawlConfig is the document served and accepted by GET/PUT /config and
by the startup config file named in the AUTODATASET_CONFIG env var.
PipelineSettings carries deployment wiring (endpoints, paths, backend
choices) under the dotted key names listed per module; a config file
may carry them in an optional "settings" object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path

from .ingest import DEFAULT_CATEGORIES, EXPORT_API_URL, CategorySet, parse_timestamp
from .linkextract import SelectionMode, SelectionThresholds


@dataclass
class CrawlWindow:
    start: datetime | None = None
    end: datetime | None = None

    def to_dict(self) -> dict:
        return {
            "start": self.start.isoformat() if self.start else None,
            "end": self.end.isoformat() if self.end else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CrawlWindow":
        return cls(
            start=parse_timestamp(data["start"]) if data.get("start") else None,
            end=parse_timestamp(data["end"]) if data.get("end") else None,
        )


@dataclass
class CrawlConfig:
    categories: tuple[str, ...] = DEFAULT_CATEGORIES
    window: CrawlWindow = field(default_factory=CrawlWindow)
    gate_threshold: float = 0.5
    desc_threshold: float = 0.5
    link_mode: str = SelectionMode.HYBRID.value
    thresholds: SelectionThresholds = field(default_factory=SelectionThresholds)
    worker_count: int = 4
    max_downloads: int = 4
    verifier_enabled: bool = False

    def validate(self) -> None:
        CategorySet(self.categories)  # raises on bad codes
        if not 0.0 <= self.gate_threshold <= 1.0:
            raise ValueError("gate_threshold must lie in [0, 1]")
        if not 0.0 <= self.desc_threshold <= 1.0:
            raise ValueError("desc_threshold must lie in [0, 1]")
        SelectionMode(self.link_mode)  # raises on bad mode
        if self.worker_count < 1:
            raise ValueError("worker_count must be at least 1")
        if self.max_downloads < 1:
            raise ValueError("max_downloads must be at least 1")
        if self.window.start and self.window.end and self.window.start > self.window.end:
            raise ValueError("window start must not exceed window end")

    def to_dict(self) -> dict:
        return {
            "categories": list(self.categories),
            "window": self.window.to_dict(),
            "gate_threshold": self.gate_threshold,
            "desc_threshold": self.desc_threshold,
            "link_mode": self.link_mode,
            "thresholds": {
                "tau_high": self.thresholds.tau_high,
                "tau_mid": self.thresholds.tau_mid,
                "delta": self.thresholds.delta,
                "top_k": self.thresholds.top_k,
                "tau_min": self.thresholds.tau_min,
            },
            "worker_count": self.worker_count,
            "max_downloads": self.max_downloads,
            "verifier_enabled": self.verifier_enabled,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CrawlConfig":
        defaults = cls()
        thresholds = defaults.thresholds
        if "thresholds" in data:
            thresholds = SelectionThresholds(**data["thresholds"])
        config = cls(
            categories=tuple(data.get("categories", defaults.categories)),
            window=CrawlWindow.from_dict(data.get("window", {})),
            gate_threshold=float(data.get("gate_threshold", defaults.gate_threshold)),
            desc_threshold=float(data.get("desc_threshold", defaults.desc_threshold)),
            link_mode=data.get("link_mode", defaults.link_mode),
            thresholds=thresholds,
            worker_count=int(data.get("worker_count", defaults.worker_count)),
            max_downloads=int(data.get("max_downloads", defaults.max_downloads)),
            verifier_enabled=bool(data.get("verifier_enabled", defaults.verifier_enabled)),
        )
        config.validate()
        return config


@dataclass
class PipelineSettings:
    """Deployment wiring; not editable through PUT /config."""

    feed_base_url: str = EXPORT_API_URL
    poll_interval_secs: float = 600.0
    page_size: int = 100
    gate_backend: str = "heuristic"  # heuristic | remote
    gate_remote_url: str | None = None
    docparse_service_url: str | None = None
    token_budget: int = 512
    retry_cap: int = 3
    desc_backend: str = "heuristic"  # heuristic | remote
    desc_remote_url: str | None = None
    seed_radius: int = 2
    verifier_url: str | None = None
    max_decompressed_mb: int = 200
    embedder: str = "reference"  # reference | remote
    embedder_url: str | None = None
    dimension: int = 256
    index_path: str = "./index"
    audit_path: str | None = None
    fixtures_dir: str | None = None
    static_dir: str | None = None

    _DOTTED_KEYS = {
        "ingest.poll_interval_secs": ("poll_interval_secs", float),
        "ingest.page_size": ("page_size", int),
        "ingest.feed_url": ("feed_base_url", str),
        "gate.backend": ("gate_backend", str),
        "gate.remote_url": ("gate_remote_url", str),
        "docparse.service_url": ("docparse_service_url", str),
        "docparse.token_budget": ("token_budget", int),
        "docparse.retry_cap": ("retry_cap", int),
        "desc.backend": ("desc_backend", str),
        "desc.remote_url": ("desc_remote_url", str),
        "desc.seed_radius": ("seed_radius", int),
        "link.verifier_url": ("verifier_url", str),
        "link.max_decompressed_mb": ("max_decompressed_mb", int),
        "index.path": ("index_path", str),
        "index.embedder": ("embedder", str),
        "index.embedder_url": ("embedder_url", str),
        "index.dimension": ("dimension", int),
        "service.audit_path": ("audit_path", str),
        "service.static_dir": ("static_dir", str),
        "service.fixtures_dir": ("fixtures_dir", str),
    }

    def apply_dotted(self, settings: dict) -> "PipelineSettings":
        updated = self
        for key, value in settings.items():
            if key not in self._DOTTED_KEYS:
                raise ValueError(f"unknown settings key: {key!r}")
            attr, caster = self._DOTTED_KEYS[key]
            updated = replace(updated, **{attr: caster(value) if value is not None else None})
        return updated


def load_config_file(path: str | Path) -> tuple[CrawlConfig, PipelineSettings]:
    """Load a startup config file: CrawlConfig fields plus an optional
    "settings" object of dotted wiring keys (also accepted at the top
    level of the CrawlConfig document, where thresholds may appear as
    "gate.threshold"/"desc.threshold"/"link.mode"/"link.thresholds")."""
    data = json.loads(Path(path).read_text("utf-8"))
    dotted = data.pop("settings", {})
    # Dotted aliases for the tunables, mirroring the per-module key names.
    if "gate.threshold" in data:
        data["gate_threshold"] = data.pop("gate.threshold")
    if "desc.threshold" in data:
        data["desc_threshold"] = data.pop("desc.threshold")
    if "link.mode" in data:
        data["link_mode"] = data.pop("link.mode")
    if "link.thresholds" in data:
        data["thresholds"] = data.pop("link.thresholds")
    if "ingest.categories" in data:
        data["categories"] = data.pop("ingest.categories")
    config = CrawlConfig.from_dict(data)
    settings = PipelineSettings().apply_dotted(dotted)
    return config, settings
