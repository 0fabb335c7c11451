#!/usr/bin/env python3
"""Run the HTTP control plane.

Honors the AUTODATASET_CONFIG env var (startup config file with the
same schema as PUT /config, plus an optional "settings" object of
dotted wiring keys). Example:

    AUTODATASET_CONFIG=config.json python scripts/serve.py --port 8000
"""

import argparse

import uvicorn

from autodataset.service import create_default_app


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args()
    uvicorn.run(create_default_app(), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
