"""HTTP transport abstraction with a recorded-fixture implementation.

Every module that touches the network goes through a ``Transport`` so
the whole pipeline can run offline against a directory of recorded
responses (the ``--fixtures`` mode).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import RetryableError


class TransportTimeout(RetryableError):
    """The request timed out."""


class TransportConnectionError(RetryableError):
    """The connection failed before a response arrived."""


@dataclass
class TransportResponse:
    status: int
    body: bytes = b""
    headers: dict[str, str] = field(default_factory=dict)

    @property
    def content_type(self) -> str:
        for key, value in self.headers.items():
            if key.lower() == "content-type":
                return value
        return ""

    @property
    def text(self) -> str:
        return self.body.decode("utf-8", errors="replace")


class Transport:
    """Minimal GET/POST interface; see HttpTransport and FixtureTransport."""

    def get(self, url: str, timeout: float = 30.0) -> TransportResponse:
        raise NotImplementedError

    def post(
        self,
        url: str,
        body: bytes | None = None,
        files: dict | None = None,
        headers: dict[str, str] | None = None,
        timeout: float = 60.0,
    ) -> TransportResponse:
        raise NotImplementedError


class HttpTransport(Transport):
    """requests-backed transport for live use."""

    def __init__(self, user_agent: str = "autodataset/0.1"):
        self._session = requests.Session()
        self._session.headers["User-Agent"] = user_agent

    def get(self, url: str, timeout: float = 30.0) -> TransportResponse:
        try:
            resp = self._session.get(url, timeout=timeout)
        except requests.Timeout as exc:
            raise TransportTimeout(f"GET {url} timed out", url=url) from exc
        except requests.RequestException as exc:
            raise TransportConnectionError(f"GET {url} failed: {exc}", url=url) from exc
        return TransportResponse(resp.status_code, resp.content, dict(resp.headers))

    def post(
        self,
        url: str,
        body: bytes | None = None,
        files: dict | None = None,
        headers: dict[str, str] | None = None,
        timeout: float = 60.0,
    ) -> TransportResponse:
        try:
            resp = self._session.post(
                url, data=body, files=files, headers=headers, timeout=timeout
            )
        except requests.Timeout as exc:
            raise TransportTimeout(f"POST {url} timed out", url=url) from exc
        except requests.RequestException as exc:
            raise TransportConnectionError(f"POST {url} failed: {exc}", url=url) from exc
        return TransportResponse(resp.status_code, resp.content, dict(resp.headers))


class FixtureTransport(Transport):
    """Replays recorded responses from a fixture directory.

    The directory holds ``manifest.json`` plus response body files::

        {
          "responses": {
            "<url>": {"status": 200, "file": "feed.xml"},
            "<url2>": [{"error": "timeout"}, {"status": 200, "body": "ok"}]
          },
          "post_responses": {
            "<url>": {
              "dispatch": [
                {"body_contains": "2501.00001", "response": {"status": 200, "file": "a.xml"}}
              ],
              "default": {"status": 500}
            }
          }
        }

    Entry fields: ``status`` (default 200), ``file`` (body read from the
    fixture dir) or ``body`` (inline UTF-8 string), ``content_type``,
    ``headers``, or ``error`` set to ``timeout``/``connection``. A list
    of entries is consumed one call at a time; the last entry repeats.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest = json.loads((self.root / "manifest.json").read_text("utf-8"))
        self._get_entries: dict = manifest.get("responses", {})
        self._post_entries: dict = manifest.get("post_responses", {})
        self._counters: dict[str, int] = {}
        self._lock = threading.Lock()
        self.requests_seen: list[str] = []

    def _next_entry(self, spec, key: str):
        if isinstance(spec, list):
            if not spec:
                raise KeyError(f"empty fixture sequence for {key}")
            with self._lock:
                n = self._counters.get(key, 0)
                self._counters[key] = n + 1
            return spec[min(n, len(spec) - 1)]
        return spec

    def _materialize(self, entry: dict, url: str) -> TransportResponse:
        error = entry.get("error")
        if error == "timeout":
            raise TransportTimeout(f"fixture timeout for {url}", url=url)
        if error == "connection":
            raise TransportConnectionError(f"fixture connection error for {url}", url=url)
        if "file" in entry:
            body = (self.root / entry["file"]).read_bytes()
        else:
            body = entry.get("body", "").encode("utf-8")
        headers = dict(entry.get("headers", {}))
        if "content_type" in entry:
            headers["Content-Type"] = entry["content_type"]
        return TransportResponse(int(entry.get("status", 200)), body, headers)

    def get(self, url: str, timeout: float = 30.0) -> TransportResponse:
        with self._lock:
            self.requests_seen.append(f"GET {url}")
        spec = self._get_entries.get(url)
        if spec is None:
            raise TransportConnectionError(f"no fixture recorded for GET {url}", url=url)
        return self._materialize(self._next_entry(spec, "GET " + url), url)

    def post(
        self,
        url: str,
        body: bytes | None = None,
        files: dict | None = None,
        headers: dict[str, str] | None = None,
        timeout: float = 60.0,
    ) -> TransportResponse:
        with self._lock:
            self.requests_seen.append(f"POST {url}")
        spec = self._post_entries.get(url)
        if spec is None:
            raise TransportConnectionError(f"no fixture recorded for POST {url}", url=url)
        payload = body or b""
        if files:
            for item in files.values():
                blob = item[1] if isinstance(item, tuple) else item
                if isinstance(blob, str):
                    blob = blob.encode("utf-8")
                payload += blob
        if isinstance(spec, dict) and "dispatch" in spec:
            for rule in spec["dispatch"]:
                needle = rule["body_contains"].encode("utf-8")
                if needle in payload:
                    return self._materialize(
                        self._next_entry(rule["response"], f"POST {url} {rule['body_contains']}"),
                        url,
                    )
            default = spec.get("default")
            if default is None:
                raise TransportConnectionError(f"no fixture dispatch matched POST {url}", url=url)
            return self._materialize(self._next_entry(default, "POST " + url), url)
        return self._materialize(self._next_entry(spec, "POST " + url), url)
