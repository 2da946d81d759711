"""Time marching of the nonlinear fluctuation scheme with any of the integrators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .discretization import FluctuationScheme, Grid1D
from .integrators import AFE, APFE, APPFE, IntegratorConfig, NonlinearSplitSystem, step
from .models import ModelSystem, spectral_bound


class SimulationError(RuntimeError):
    """A run produced non-finite values or an invalid state."""


@dataclass
class SimulationResult:
    snapshots: List[Tuple[float, np.ndarray]] = field(default_factory=list)
    steps: int = 0
    dt: float = 0.0
    config: Optional[IntegratorConfig] = None

    @property
    def final(self) -> np.ndarray:
        return self.snapshots[-1][1]


def riemann_initial(grid: Grid1D, n_vars: int, left: Sequence[float], right: Sequence[float],
                    split_x: float = 0.0) -> np.ndarray:
    """Piecewise constant field; missing trailing components are zero."""
    wl = np.zeros(n_vars)
    wr = np.zeros(n_vars)
    if len(left) > n_vars or len(right) > n_vars:
        raise ValueError(f"initial states have more than {n_vars} components")
    wl[:len(left)] = left
    wr[:len(right)] = right
    return np.where((grid.centers < split_x)[:, None], wl, wr)


def two_beam_initial(grid: Grid1D, m: int, speed: float = 0.5) -> np.ndarray:
    return riemann_initial(grid, m + 1, (1.0, speed, 1.0), (1.0, -speed, 1.0))


def field_lambda_max(model: ModelSystem, w: np.ndarray) -> float:
    """Largest spectral bound over all cells of a field."""
    if model.constant:
        return spectral_bound(model)
    eigs = np.linalg.eigvals(model.system_matrix(np.asarray(w, dtype=float)))
    return float(np.max(np.abs(eigs.real)))


def with_macro_step(config: IntegratorConfig, dt: float) -> IntegratorConfig:
    """Same integrator with macroscopic step ``dt``; AFE keeps its substep count."""
    if isinstance(config, AFE):
        return AFE(dt / (config.k + 1), dt)
    return replace(config, dt=dt)


def run(problem: FluctuationScheme, config: IntegratorConfig, w0: np.ndarray, end_time: float,
        split_index: Optional[int] = None, snapshot_times: Sequence[float] = ()) -> SimulationResult:
    """March ``w0`` to ``end_time`` with a uniform macroscopic step no larger than ``config.dt``.

    The step is shrunk to ``end_time / n`` so the run lands exactly on the end
    time.  Snapshots are taken at the start, at the first step reaching each of
    ``snapshot_times`` and at the end.
    """
    if not end_time > 0:
        raise ValueError(f"end_time must be positive, got {end_time}")
    adaptive = isinstance(config, (AFE, APFE, APPFE))
    if split_index is None:
        split_index = problem.profile.split_index(problem.grid)
    system = NonlinearSplitSystem(problem, split_index) if adaptive else None
    n_steps = max(1, math.ceil(end_time / config.dt - 1e-9))
    config = with_macro_step(config, end_time / n_steps)
    w = np.array(w0, dtype=float)
    if w.shape != (problem.grid.n_cells, problem.model.n_vars):
        raise ValueError(f"initial field must have shape {(problem.grid.n_cells, problem.model.n_vars)}, got {w.shape}")
    result = SimulationResult([(0.0, w.copy())], 0, config.dt, config)
    pending = sorted(t for t in snapshot_times if 0 < t < end_time)
    for n in range(n_steps):
        t = (n + 1) * config.dt
        try:
            w = step(config, problem.rhs, system, w, split_index)
        except (FloatingPointError, ValueError) as exc:
            raise SimulationError(f"step {n + 1} (t = {t:.6g}) failed: {exc}") from exc
        result.steps += 1
        while pending and t >= pending[0] - 1e-12:
            result.snapshots.append((t, w.copy()))
            pending.pop(0)
    if result.snapshots[-1][0] != n_steps * config.dt:
        result.snapshots.append((n_steps * config.dt, w.copy()))
    return result
