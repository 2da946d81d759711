"""Two-beam problem with PFE and APFE, followed by a comparison of the final fields."""

import sys
from pathlib import Path

import numpy as np

from adaptive_pi.cli import main
from adaptive_pi.io import read_csv

ROOT = Path(__file__).resolve().parent.parent


def final_field(run_dir: Path) -> np.ndarray:
    last = sorted(run_dir.glob("solution_t*.csv"))[-1]
    header, rows = read_csv(last)
    return np.asarray(rows)


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "results" / "two_beam"
    for name in ("pfe", "apfe"):
        code = main(["simulate", "--config", str(ROOT / "configs" / f"two_beam_{name}.cfg"), "--out", str(out / name)])
        if code:
            sys.exit(code)
    a, b = final_field(out / "pfe"), final_field(out / "apfe")
    diff = np.linalg.norm(b[:, 1] - a[:, 1]) / np.linalg.norm(a[:, 1])
    print(f"relative L2 difference in density, PFE vs APFE: {diff:.3e}")
