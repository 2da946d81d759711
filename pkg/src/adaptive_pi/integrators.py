"""Forward Euler, projective Forward Euler and their spatially adaptive variants.

Global schemes act on a callable ``rhs(w)``.  Adaptive schemes act on a
split system exposing

    left_rhs(w_l, halo_r)   right_rhs(halo_l, w_r)
    halo_right              halo_left

where ``halo_right`` lists the right-part cells the left update reads (and
vice versa).  Buffer values are interpolated only on these halo cells.
Fields are arrays of shape ``(n_cells, n_vars)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

from .discretization import FluctuationScheme, SplitOperator

Rhs = Callable[[np.ndarray], np.ndarray]

_REL = 1e-12


def _positive(**kw):
    for name, val in kw.items():
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")


@dataclass(frozen=True)
class FE:
    dt: float

    def __post_init__(self):
        _positive(dt=self.dt)


@dataclass(frozen=True)
class PFE:
    delta_t: float
    k: int
    dt: float

    def __post_init__(self):
        _positive(delta_t=self.delta_t, dt=self.dt)
        _check_projective(self.delta_t, self.k, self.dt)


@dataclass(frozen=True)
class AFE:
    delta_t: float
    dt: float

    def __post_init__(self):
        _positive(delta_t=self.delta_t, dt=self.dt)
        ratio = self.dt / self.delta_t
        if ratio < 1 - _REL or abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ValueError(f"AFE needs dt = (k+1) delta_t for integer k >= 0, got dt/delta_t = {ratio}")

    @property
    def k(self) -> int:
        return int(round(self.dt / self.delta_t)) - 1


@dataclass(frozen=True)
class APFE:
    delta_t: float
    k: int
    dt: float

    def __post_init__(self):
        _positive(delta_t=self.delta_t, dt=self.dt)
        _check_projective(self.delta_t, self.k, self.dt)


@dataclass(frozen=True)
class APPFE:
    delta_t_l: float
    k_l: int
    delta_t_r: float
    k_r: int
    dt: float

    def __post_init__(self):
        _positive(delta_t_l=self.delta_t_l, delta_t_r=self.delta_t_r, dt=self.dt)
        if self.delta_t_l > self.delta_t_r:
            raise ValueError(f"APPFE expects delta_t_l <= delta_t_r, got {self.delta_t_l} > {self.delta_t_r}")
        _check_projective(self.delta_t_l, self.k_l, self.dt)
        _check_projective(self.delta_t_r, self.k_r, self.dt)


IntegratorConfig = Union[FE, PFE, AFE, APFE, APPFE]


def _check_projective(delta_t, k, dt):
    if int(k) != k or k < 0:
        raise ValueError(f"number of inner steps k must be a non-negative integer, got {k}")
    if (k + 1) * delta_t > dt * (1 + _REL):
        raise ValueError(f"(k+1) delta_t = {(k + 1) * delta_t} exceeds dt = {dt}")


# --------------------------------------------------------------------------- global schemes

def fe_step(rhs: Rhs, w: np.ndarray, dt: float) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        w_next = w + dt * rhs(w)
    _check_finite(w_next, "FE")
    return w_next


def pfe_step(rhs: Rhs, w: np.ndarray, delta_t: float, k: int, dt: float) -> np.ndarray:
    PFE(delta_t, k, dt)
    prev = w
    for _ in range(k + 1):
        prev, w = w, w + delta_t * rhs(w)
    w_next = w + (dt - (k + 1) * delta_t) * (w - prev) / delta_t
    _check_finite(w_next, "PFE")
    return w_next


def _check_finite(w, name):
    if not np.all(np.isfinite(w)):
        cell = int(np.argwhere(~np.isfinite(np.atleast_2d(w)))[0][0])
        raise FloatingPointError(f"{name} step produced a non-finite value in cell {cell}")


# --------------------------------------------------------------------------- split systems

class LinearSplitSystem:
    """Split linear operator seen through its interface (halo) cells only."""

    def __init__(self, split: SplitOperator):
        self.split = split
        n = split.n_vars
        self.n_vars = n
        self.n_left = split.ll.shape[0] // n
        self.n_right = split.rr.shape[0] // n
        self.halo_right = _coupled_cells(split.lr, n)
        self.halo_left = _coupled_cells(split.rl, n)
        self._lr = _columns(split.lr, self.halo_right, n)
        self._rl = _columns(split.rl, self.halo_left, n)

    def left_rhs(self, w_l, halo_r):
        out = self.split.ll @ np.ravel(w_l)
        if halo_r.size:
            out = out + self._lr @ np.ravel(halo_r)
        return out.reshape(self.n_left, self.n_vars)

    def right_rhs(self, halo_l, w_r):
        out = self.split.rr @ np.ravel(w_r)
        if halo_l.size:
            out = out + self._rl @ np.ravel(halo_l)
        return out.reshape(self.n_right, self.n_vars)


def _coupled_cells(block, n):
    cols = np.flatnonzero(np.any(block != 0.0, axis=0))
    return np.unique(cols // n)


def _columns(block, cells, n):
    idx = (cells[:, None] * n + np.arange(n)).ravel()
    return block[:, idx]


class NonlinearSplitSystem:
    """Left/right restriction of a :class:`FluctuationScheme` at ``split_index``."""

    def __init__(self, problem: FluctuationScheme, split_index: int):
        nc = problem.grid.n_cells
        if not 0 < split_index < nc:
            raise ValueError(f"split index must lie in (0, {nc}), got {split_index}")
        self.problem = problem
        self.split_index = split_index
        self.n_left = split_index
        self.n_right = nc - split_index
        self.periodic = problem.boundary.value == "periodic"
        if self.periodic:
            self.halo_right = np.array([0, self.n_right - 1])
            self.halo_left = np.array([self.n_left - 1, 0])
        else:
            self.halo_right = np.array([0])
            self.halo_left = np.array([self.n_left - 1])

    def left_rhs(self, w_l, halo_r):
        ghost_left = halo_r[1:2] if self.periodic else w_l[:1]
        padded = np.concatenate([ghost_left, w_l, halo_r[:1]])
        return self.problem.rhs_window(padded, slice(0, self.n_left))

    def right_rhs(self, halo_l, w_r):
        ghost_right = halo_l[1:2] if self.periodic else w_r[-1:]
        padded = np.concatenate([halo_l[:1], w_r, ghost_right])
        return self.problem.rhs_window(padded, slice(self.split_index, None))


def interpolate_buffer(w_n: np.ndarray, slope: np.ndarray, tau: float) -> np.ndarray:
    """Linear-in-time buffer value ``w_n + tau * slope``."""
    return w_n + tau * slope


# --------------------------------------------------------------------------- adaptive schemes

def _inner_left(system, w_l, halo_base, halo_slope, delta_t, k, offset):
    """``k + 1`` FE substeps on the left part; substep j reads the buffer at ``(j + offset) delta_t``.

    Returns the last two iterates.
    """
    prev = w_l
    for j in range(k + 1):
        buf = interpolate_buffer(halo_base, halo_slope, (j + offset) * delta_t)
        prev, w_l = w_l, w_l + delta_t * system.left_rhs(w_l, buf)
    return prev, w_l


def afe_step(system, w_l, w_r, delta_t: float, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """FE with ``dt`` on the right, ``k + 1`` FE substeps of ``delta_t`` on the left."""
    k = AFE(delta_t, dt).k
    f_r = system.right_rhs(w_l[system.halo_left], w_r)
    w_r_next = w_r + dt * f_r
    _, w_l_next = _inner_left(system, w_l, w_r[system.halo_right], f_r[system.halo_right], delta_t, k, 0)
    _check_finite(w_l_next, "AFE")
    _check_finite(w_r_next, "AFE")
    return w_l_next, w_r_next


def apfe_step(system, w_l, w_r, delta_t: float, k: int, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """FE with ``dt`` on the right, projective FE on the left."""
    APFE(delta_t, k, dt)
    f_r = system.right_rhs(w_l[system.halo_left], w_r)
    w_r_next = w_r + dt * f_r
    prev, w_l = _inner_left(system, w_l, w_r[system.halo_right], f_r[system.halo_right], delta_t, k, 0)
    w_l_next = w_l + (dt - (k + 1) * delta_t) * (w_l - prev) / delta_t
    _check_finite(w_l_next, "APFE")
    _check_finite(w_r_next, "APFE")
    return w_l_next, w_r_next


def appfe_step(system, w_l, w_r, delta_t_l: float, k_l: int, delta_t_r: float, k_r: int,
               dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """Projective FE on both parts with their own inner step sizes.

    Left substep j reads the right halo at ``W_R^n + (j+1) delta_t_l F_R^n``.
    Right substep j reads the left halo at
    ``W_L^n + max(0, (j+1) delta_t_r - k_l delta_t_l) * s_L`` where ``s_L`` is the
    slope between the last two left inner iterates.
    """
    APPFE(delta_t_l, k_l, delta_t_r, k_r, dt)
    w_l0, w_r0 = w_l, w_r
    f_r = system.right_rhs(w_l0[system.halo_left], w_r0)
    prev_l, w_l = _inner_left(system, w_l0, w_r0[system.halo_right], f_r[system.halo_right], delta_t_l, k_l, 1)
    slope_l = (w_l - prev_l) / delta_t_l
    w_l_next = w_l + (dt - (k_l + 1) * delta_t_l) * slope_l

    base, s = w_l0[system.halo_left], slope_l[system.halo_left]
    prev_r = w_r = w_r0
    for j in range(k_r + 1):
        tau = max(0.0, (j + 1) * delta_t_r - k_l * delta_t_l)
        buf = interpolate_buffer(base, s, tau)
        prev_r, w_r = w_r, w_r + delta_t_r * system.right_rhs(buf, w_r)
    w_r_next = w_r + (dt - (k_r + 1) * delta_t_r) * (w_r - prev_r) / delta_t_r
    _check_finite(w_l_next, "APPFE")
    _check_finite(w_r_next, "APPFE")
    return w_l_next, w_r_next


def step(config: IntegratorConfig, rhs: Rhs, system, w: np.ndarray, split_index: int) -> np.ndarray:
    """Advance a full field by one macroscopic step of ``config``."""
    if isinstance(config, FE):
        return fe_step(rhs, w, config.dt)
    if isinstance(config, PFE):
        return pfe_step(rhs, w, config.delta_t, config.k, config.dt)
    w_l, w_r = w[:split_index], w[split_index:]
    if isinstance(config, AFE):
        w_l, w_r = afe_step(system, w_l, w_r, config.delta_t, config.dt)
    elif isinstance(config, APFE):
        w_l, w_r = apfe_step(system, w_l, w_r, config.delta_t, config.k, config.dt)
    elif isinstance(config, APPFE):
        w_l, w_r = appfe_step(system, w_l, w_r, config.delta_t_l, config.k_l, config.delta_t_r, config.k_r,
                              config.dt)
    else:
        raise TypeError(f"unknown integrator config {config!r}")
    return np.concatenate([w_l, w_r])


# --------------------------------------------------------------------------- transition matrices

@dataclass(frozen=True)
class TransitionMatrix:
    matrix: np.ndarray
    split_index: int = 0
    n_vars: int = 1

    def blocks(self):
        k = self.split_index * self.n_vars
        m = self.matrix
        return m[:k, :k], m[:k, k:], m[k:, :k], m[k:, k:]


def transition_fe(op, dt: float) -> TransitionMatrix:
    a = op.dense() if hasattr(op, "dense") else np.asarray(op)
    n_vars = getattr(op, "n_vars", 1)
    return TransitionMatrix(np.eye(a.shape[0]) + dt * a, 0, n_vars)


def transition_pfe(op, delta_t: float, k: int, dt: float) -> TransitionMatrix:
    PFE(delta_t, k, dt)
    a = op.dense() if hasattr(op, "dense") else np.asarray(op)
    inner = np.eye(a.shape[0]) + delta_t * a
    m = (np.eye(a.shape[0]) + (dt - k * delta_t) * a) @ np.linalg.matrix_power(inner, k)
    return TransitionMatrix(m, 0, getattr(op, "n_vars", 1))


def transition_afe(split: SplitOperator, delta_t: float, dt: float) -> TransitionMatrix:
    k = AFE(delta_t, dt).k
    ll, lr, rl, rr = split.ll, split.lr, split.rl, split.rr
    il, ir = np.eye(ll.shape[0]), np.eye(rr.shape[0])
    g = il + delta_t * ll
    powers = [il]
    for _ in range(k + 1):
        powers.append(powers[-1] @ g)
    t_ll = powers[k + 1] + delta_t ** 2 * sum((k - j) * powers[j] for j in range(k + 1)) @ lr @ rl
    t_lr = delta_t * sum(powers[j] @ lr @ (ir + (k - j) * delta_t * rr) for j in range(k + 1))
    t_rl = dt * rl
    t_rr = ir + dt * rr
    return TransitionMatrix(np.block([[t_ll, t_lr], [t_rl, t_rr]]), split.split_index, split.n_vars)


def transition_apfe(split: SplitOperator, delta_t: float, k: int, dt: float) -> TransitionMatrix:
    APFE(delta_t, k, dt)
    ll, lr, rl, rr = split.ll, split.lr, split.rl, split.rr
    il, ir = np.eye(ll.shape[0]), np.eye(rr.shape[0])
    g = il + delta_t * ll
    powers = [il]
    for _ in range(k):
        powers.append(powers[-1] @ g)
    h = dt - k * delta_t
    outer = il + h * ll
    acc_ll = powers[k] + delta_t ** 2 * sum(((k - 1 - j) * powers[j] for j in range(k)), np.zeros_like(il)) @ lr @ rl
    t_ll = outer @ acc_ll + h * k * delta_t * lr @ rl
    acc_lr = delta_t * sum((powers[j] @ lr @ (ir + (k - 1 - j) * delta_t * rr) for j in range(k)), np.zeros_like(lr))
    t_lr = outer @ acc_lr + h * lr @ (ir + k * delta_t * rr)
    t_rl = dt * rl
    t_rr = ir + dt * rr
    return TransitionMatrix(np.block([[t_ll, t_lr], [t_rl, t_rr]]), split.split_index, split.n_vars)


def transition_by_probing(split: SplitOperator, config: IntegratorConfig) -> TransitionMatrix:
    """Build the transition matrix column by column from the stepping code."""
    system = LinearSplitSystem(split)
    n = split.n_vars
    nl, nr = system.n_left, system.n_right
    size = (nl + nr) * n
    full = split.dense()
    cols = []
    for j in range(size):
        e = np.zeros(size)
        e[j] = 1.0
        w = e.reshape(nl + nr, n)
        out = step(config, lambda v: (full @ v.ravel()).reshape(v.shape), system, w, nl)
        cols.append(out.ravel())
    return TransitionMatrix(np.column_stack(cols), split.split_index, n)


# --------------------------------------------------------------------------- scalar growth factors

def amplification_factor(config: IntegratorConfig, lam, lam_r=None):
    """Growth factor of the test equation ``w' = lam w``.

    Adaptive schemes return ``(sigma_left(lam), sigma_right(lam_r))``; ``lam_r``
    defaults to ``lam``.
    """
    lam = np.asarray(lam, dtype=complex)
    lam_r = lam if lam_r is None else np.asarray(lam_r, dtype=complex)
    if isinstance(config, FE):
        return 1 + config.dt * lam
    if isinstance(config, PFE):
        return _projective(lam, config.delta_t, config.k, config.dt)
    if isinstance(config, AFE):
        return (1 + config.delta_t * lam) ** (config.k + 1), 1 + config.dt * lam_r
    if isinstance(config, APFE):
        return _projective(lam, config.delta_t, config.k, config.dt), 1 + config.dt * lam_r
    if isinstance(config, APPFE):
        return (_projective(lam, config.delta_t_l, config.k_l, config.dt),
                _projective(lam_r, config.delta_t_r, config.k_r, config.dt))
    raise TypeError(f"unknown integrator config {config!r}")


def _projective(lam, delta_t, k, dt):
    return (1 + (dt / delta_t - k) * delta_t * lam) * (1 + delta_t * lam) ** k
