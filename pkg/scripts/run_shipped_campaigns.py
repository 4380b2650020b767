#!/usr/bin/env python3
"""Run every config in configs/ through the CLI and print a one-line status each."""

import argparse
import sys
import time
from pathlib import Path

from quadheights.cli import main as cli_main

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default=str(ROOT / "results"))
    ap.add_argument("--timestamp", default=None)
    a = ap.parse_args()
    worst = 0
    for cfg in sorted((ROOT / "configs").glob("*.json")):
        t0 = time.perf_counter()
        argv = ["campaign", "run", str(cfg), "--out-dir", a.out_dir]
        if a.timestamp:
            argv += ["--timestamp", a.timestamp]
        rc = cli_main(argv)
        print(f"== {cfg.name}: exit {rc} in {time.perf_counter() - t0:.1f}s\n")
        worst = max(worst, rc)
    return worst


if __name__ == "__main__":
    sys.exit(main())
