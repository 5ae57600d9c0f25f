#!/usr/bin/env python3
"""Desk-scale type-I error benchmark (Data_0, all three methods).

Writes the rate table to stdout and, with --out, a CSV plus JSON sidecar.
Use --paper-scale for the table-scale run (R=5000, B=20000); expect hours
rather than minutes.
"""

import sys

from ppwave.cli import main

if __name__ == "__main__":
    sys.exit(main(["level", *sys.argv[1:]]))
