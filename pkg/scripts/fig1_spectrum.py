"""Semi-discrete spectra and cluster disks for upwind, Lax-Friedrichs and FORCE."""

import sys
from pathlib import Path

from adaptive_pi.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "results" / "spectrum"
    codes = [main(["spectrum", "--config", str(ROOT / "configs" / f"fig1_{s}.cfg"), "--out", str(out / s)])
             for s in ("upwind", "lf", "force")]
    sys.exit(max(codes))
