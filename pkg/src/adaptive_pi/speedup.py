"""Step-count model for the Upwind scheme and the speedups it predicts over plain FE."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict

SCHEMES = ("fe", "pfe", "afe", "apfe", "appfe")


@dataclass(frozen=True)
class SpeedupScenario:
    lambda_max: float
    dx: float
    eps_l: float
    eps_r: float
    theta_frac: float
    k: int = 1
    k_l: int = 1
    k_r: int = 1

    def __post_init__(self):
        for name in ("lambda_max", "dx", "eps_l", "eps_r"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 <= self.theta_frac <= 1.0:
            raise ValueError(f"theta_frac must lie in [0, 1], got {self.theta_frac}")
        if self.eps_l > self.eps_r:
            raise ValueError(f"the stiff region must be the left one: eps_l={self.eps_l} > eps_r={self.eps_r}")
        for name in ("k", "k_l", "k_r"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def _cfl(s: SpeedupScenario, eps: float) -> float:
    return 1.0 / (s.dx / (2.0 * eps * s.lambda_max) + 1.0)


def _dt(s: SpeedupScenario, eps: float) -> float:
    return _cfl(s, eps) * s.dx / s.lambda_max


def step_count(scheme: str, s: SpeedupScenario) -> float:
    """Right-hand side evaluations per unit time, extrapolation and interface costs excluded."""
    scheme = scheme.lower()
    th = s.theta_frac
    if scheme == "fe":
        return 1.0 / _dt(s, s.eps_l)
    if scheme == "pfe":
        return (s.k + 1) / _dt(s, s.eps_r)
    if scheme == "afe":
        delta_t = 1.0 / (s.lambda_max / s.dx + 1.0 / (2.0 * s.eps_l))
        return th / delta_t + (1.0 - th) / _dt(s, s.eps_r)
    if scheme == "apfe":
        return (th * (s.k + 1) + 1.0 - th) / _dt(s, s.eps_r)
    if scheme == "appfe":
        dt = s.dx / s.lambda_max
        return (th * (s.k_l + 1) + (1.0 - th) * (s.k_r + 1)) / dt
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def speedup(scheme: str, s: SpeedupScenario) -> float:
    n = step_count(scheme, s)
    if not (n > 0 and math.isfinite(n)):
        raise ZeroDivisionError(f"step count of {scheme} is {n}")
    return step_count("fe", s) / n


CASES = {
    "A": SpeedupScenario(6.0, 1.0 / 50, 1e-4, 1e-3, 0.5),
    "B": SpeedupScenario(6.0, 1.0 / 50, 1e-6, 1e-4, 0.5),
    "C": SpeedupScenario(6.0, 1.0 / 50, 1e-6, 1e-4, 0.1),
}


def table1() -> Dict[str, Dict[str, float]]:
    """Raw speedups ``table[scheme][case]`` for the three reference cases."""
    return {sch: {case: speedup(sch, s) for case, s in CASES.items()} for sch in SCHEMES}


def one_decimal(x: float) -> str:
    return f"{x:.1f}"


def table1_csv(table=None) -> str:
    table = table1() if table is None else table
    cases = list(next(iter(table.values())))
    lines = ["scheme," + ",".join(cases)]
    for sch, row in table.items():
        lines.append(sch + "," + ",".join(format(row[c], ".17g") for c in cases))
    return "\n".join(lines) + "\n"


def table1_markdown(table=None) -> str:
    table = table1() if table is None else table
    cases = list(next(iter(table.values())))
    lines = ["| scheme | " + " | ".join(f"({c})" for c in cases) + " |",
             "|---" * (len(cases) + 1) + "|"]
    for sch, row in table.items():
        lines.append(f"| {sch.upper()} | " + " | ".join(one_decimal(row[c]) for c in cases) + " |")
    return "\n".join(lines) + "\n"
