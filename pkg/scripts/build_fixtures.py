#!/usr/bin/env python3
"""Materialize the offline fixture corpus to a directory.

The test suite builds this corpus into a temp dir automatically; this
script writes the same corpus somewhere durable so the CLI and server
can be exercised by hand:

    python scripts/build_fixtures.py /tmp/corpus
    autodataset crawl --config /tmp/corpus/config.json \
        --fixtures /tmp/corpus --index /tmp/idx
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from corpus import build_corpus  # noqa: E402


def main():
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    target = Path(sys.argv[1])
    build_corpus(target)
    print(f"fixture corpus written to {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
