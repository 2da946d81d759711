"""Transition matrix spectra for every integrator with auto-selected parameters."""

import sys
from pathlib import Path

from adaptive_pi.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "results" / "transition"
    codes = [main(["transition", "--config", str(ROOT / "configs" / f"fig6_{i}.cfg"), "--out", str(out / i)])
             for i in ("fe", "pfe", "afe", "apfe", "appfe")]
    sys.exit(max(codes))
