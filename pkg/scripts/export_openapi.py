#!/usr/bin/env python3
"""Regenerate the committed OpenAPI description of the HTTP service.

Usage: python scripts/export_openapi.py [--out openapi.json]
"""

import argparse
import json

from flowcap.service import create_app


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="openapi.json")
    args = ap.parse_args()
    spec = create_app().openapi()
    with open(args.out, "w") as fh:
        json.dump(spec, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(args.out)


if __name__ == "__main__":
    main()
