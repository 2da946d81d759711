"""Speedup table for the three model scenarios."""

import sys
from pathlib import Path

from adaptive_pi.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "results" / "speedup"
    sys.exit(main(["speedup", "--out", str(out)]))
