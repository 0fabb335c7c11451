"""Command-line driver: one-shot crawl windows, URL scoring, index search.

Exit codes: 0 success, 1 stage-level fatal error (or missing index),
2 usage error. Records go to stdout as JSON lines (or --out);
diagnostics go to stderr only, so the output composes with pipelines.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

from .config import CrawlConfig, CrawlWindow, PipelineSettings, load_config_file
from .ingest import is_valid_category, parse_timestamp
from .linkextract import UrlCandidate, normalize_url, score_candidate
from .pipeline import run_window
from .recordindex import RecordIndex, ReferenceEmbedder

PROGRESS_EVERY = 10


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="autodataset",
                                     description="Paper-first dataset discovery pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    crawl = sub.add_parser("crawl", help="process one window of arXiv submissions")
    crawl.add_argument("--categories", help="comma-separated category codes")
    crawl.add_argument("--since", help="window start (ISO-8601, inclusive)")
    crawl.add_argument("--until", help="window end (ISO-8601, exclusive)")
    crawl.add_argument("--config", help="config file (same schema as PUT /config)")
    crawl.add_argument("--out", help="write record JSONL here instead of stdout")
    crawl.add_argument("--fixtures", help="directory of recorded responses (offline mode)")
    crawl.add_argument("--index", help="record index directory (default: temp dir)")

    score = sub.add_parser("score-url", help="score one candidate URL")
    score.add_argument("--url", required=True)
    score.add_argument("--anchor", default="")
    score.add_argument("--context", default="")

    search = sub.add_parser("search", help="query a record index")
    search.add_argument("--query", required=True)
    search.add_argument("--k", type=int, default=10)
    search.add_argument("--index", required=True, help="record index directory")

    return parser


def _usage_error(parser: argparse.ArgumentParser, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    parser.print_usage(sys.stderr)
    return 2


def _cmd_crawl(args, parser) -> int:
    if args.config:
        try:
            config, settings = load_config_file(args.config)
        except (OSError, ValueError) as exc:
            return _usage_error(parser, f"bad config file: {exc}")
    else:
        config, settings = CrawlConfig(), PipelineSettings()

    if args.categories:
        codes = tuple(c.strip() for c in args.categories.split(",") if c.strip())
        for code in codes:
            if not is_valid_category(code):
                return _usage_error(parser, f"unknown category code: {code}")
        config.categories = codes

    window = CrawlWindow(config.window.start, config.window.end)
    try:
        if args.since:
            window.start = parse_timestamp(args.since)
        if args.until:
            window.end = parse_timestamp(args.until)
    except ValueError as exc:
        return _usage_error(parser, f"bad timestamp: {exc}")
    if window.start is None or window.end is None:
        return _usage_error(parser, "crawl requires --since and --until (or a config window)")
    if window.start > window.end:
        return _usage_error(parser, "--since must not exceed --until")
    config.window = window

    if args.fixtures:
        if not Path(args.fixtures, "manifest.json").is_file():
            return _usage_error(parser, f"no manifest.json under {args.fixtures}")
        settings.fixtures_dir = args.fixtures

    try:
        config.validate()
    except ValueError as exc:
        return _usage_error(parser, str(exc))

    if args.index:
        settings.index_path = args.index
        tmp = None
    else:
        tmp = tempfile.TemporaryDirectory(prefix="autodataset-index-")
        settings.index_path = tmp.name

    def progress(done: int, total: int):
        if done % PROGRESS_EVERY == 0 or done == total:
            print(f"processed {done}/{total} papers", file=sys.stderr)

    try:
        outcomes, _ = run_window(config, settings, progress=progress)
    finally:
        if tmp is not None:
            tmp.cleanup()

    lines = [o.record.to_json() for o in outcomes if o.record is not None]
    if args.out:
        Path(args.out).write_text("".join(line + "\n" for line in lines), "utf-8")
    else:
        for line in lines:
            print(line)

    errors = sum(1 for o in outcomes if o.disposition == "error")
    if errors:
        print(f"{errors} paper(s) failed with stage-level errors", file=sys.stderr)
        return 1
    return 0


def _cmd_score_url(args, parser) -> int:
    normalized = normalize_url(args.url)
    if normalized is None:
        return _usage_error(parser, f"unparseable or non-http(s) URL: {args.url}")
    scored = score_candidate(UrlCandidate(normalized, args.anchor, args.context, "-", 0))
    print(scored.score)
    for feature_id, weight, count in scored.feature_hits:
        print(f"{feature_id}\t{weight:+d}\tx{count}")
    return 0


def _cmd_search(args, parser) -> int:
    if args.k < 1:
        return _usage_error(parser, "--k must be at least 1")
    index_dir = Path(args.index)
    if not index_dir.is_dir():
        print(f"error: index directory not found: {index_dir}", file=sys.stderr)
        return 1
    index = RecordIndex(index_dir, ReferenceEmbedder())
    for hit in index.search(args.query, args.k):
        prefix = hit.record.description[:100]
        dataset_url = hit.record.dataset_url or "-"
        print(f"{hit.rank}\t{hit.similarity:.4f}\t{hit.record.paper_id}"
              f"\t{dataset_url}\t{prefix}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "crawl":
        return _cmd_crawl(args, parser)
    if args.command == "score-url":
        return _cmd_score_url(args, parser)
    if args.command == "search":
        return _cmd_search(args, parser)
    return _usage_error(parser, f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
