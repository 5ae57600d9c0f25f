#!/usr/bin/env python3
"""Desk-scale power benchmark over the eight signal datasets.

Writes the rate table to stdout and, with --out, a CSV plus JSON sidecar.
Use --paper-scale for the table-scale run (R=1000, B=20000).
"""

import sys

from ppwave.cli import main

if __name__ == "__main__":
    sys.exit(main(["power", *sys.argv[1:]]))
