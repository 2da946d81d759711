"""Balance-law models: scalar relaxation, hyperbolic moment equations, Hermite spectral method.

Every model is described by a :class:`ModelSystem` holding the transport
matrix evaluator ``A(w)`` and the diagonal relaxation matrix ``S`` of

    dw/dt + A(w) dw/dx = -(1/eps(x)) S w.

Moment states are plain arrays.  For HME the layout is
``(rho, u, theta, f_3, ..., f_M)``, for HSM it is ``(f_0, ..., f_M)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class ComplexSpectrumWarning(UserWarning):
    """Raised (as a warning) when a system matrix has non-real eigenvalues."""


@dataclass(frozen=True)
class EquilibriumState:
    rho: float
    vel: float
    theta: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"density must be positive, got rho={self.rho}")
        if not self.theta > 0:
            raise ValueError(f"temperature must be positive, got theta={self.theta}")

    def moments(self, m: int) -> np.ndarray:
        """HME state vector of length ``m + 1`` with all higher coefficients zero."""
        w = np.zeros(m + 1)
        w[:3] = self.rho, self.vel, self.theta
        return w


@dataclass(frozen=True)
class ModelSystem:
    """A 1D balance law with diagonal relaxation.

    ``system_matrix`` maps states of shape ``(..., n_vars)`` to matrices of
    shape ``(..., n_vars, n_vars)``.  For constant (linear or linearized)
    models the state argument is ignored.
    """

    name: str
    n_vars: int
    system_matrix: Callable[[np.ndarray], np.ndarray]
    source_matrix: np.ndarray
    constant: bool = True
    variable_names: tuple = ()
    conserved_mask: np.ndarray = field(init=False)

    def __post_init__(self):
        s = np.asarray(self.source_matrix, dtype=float)
        if s.shape != (self.n_vars, self.n_vars):
            raise ValueError(f"source matrix must be {self.n_vars}x{self.n_vars}, got {s.shape}")
        diag = np.diag(s)
        if np.any(s - np.diag(diag)) or not np.all(np.isin(diag, (0.0, 1.0))):
            raise ValueError("source matrix must be diagonal with entries in {0, 1}")
        s.setflags(write=False)
        mask = diag == 0.0
        mask.setflags(write=False)
        object.__setattr__(self, "source_matrix", s)
        object.__setattr__(self, "conserved_mask", mask)

    def matrix(self, state: Optional[np.ndarray] = None) -> np.ndarray:
        if state is None:
            if not self.constant:
                raise ValueError(f"{self.name} needs a state to evaluate its system matrix")
            state = np.zeros(self.n_vars)
        return self.system_matrix(np.asarray(state, dtype=float))


def _relaxation_matrix(n: int, n_conserved: int) -> np.ndarray:
    return np.diag([0.0] * n_conserved + [1.0] * (n - n_conserved))


def scalar_model(a: float) -> ModelSystem:
    """Transport with speed ``a`` and relaxation of the single variable to zero."""
    a = float(a)

    def system_matrix(state):
        state = np.asarray(state)
        return np.full(state.shape[:-1] + (1, 1), a)

    return ModelSystem(
        name="scalar",
        n_vars=1,
        system_matrix=system_matrix,
        source_matrix=np.ones((1, 1)),
        variable_names=("w",),
    )


def hme_system_matrix(state: np.ndarray, m: int) -> np.ndarray:
    """System matrix of the nonlinear hyperbolic moment equations.

    ``state`` has shape ``(..., m + 1)`` ordered ``(rho, u, theta, f_3, ..., f_M)``.
    Rows 3 to M-2 follow the Grad-type row pattern

        col 0:  -theta f_{k-1} / rho
        col 1:  (k+1) f_k
        col 2:  ((k-1) f_{k-1} + theta f_{k-3}) / 2
        col 3:  -3 f_{k-2} / rho
        band:   theta (k-1), u (k), k+1 (k+1)

    with the convention f_0 = rho, f_1 = f_2 = 0.  Row M-1 adds
    ``-M(M+1) f_M / (2 theta)`` to column 2 and row M is the closing row
    with the ``-f_{M-1}`` and ``3(M+1) f_M / (rho theta)`` corrections.
    """
    if m < 4:
        raise ValueError(f"HME needs m >= 4, got m={m}")
    w = np.asarray(state, dtype=float)
    if w.shape[-1] != m + 1:
        raise ValueError(f"HME state must have length m+1={m + 1}, got {w.shape[-1]}")
    rho, u, theta = w[..., 0], w[..., 1], w[..., 2]
    if np.any(rho <= 0) or np.any(theta <= 0):
        raise ValueError("HME requires rho > 0 and theta > 0")

    zero = np.zeros_like(rho)

    def f(j):
        if j == 0:
            return rho
        if j < 3 or j > m:
            return zero
        return w[..., j]

    n = m + 1
    a = np.zeros(w.shape[:-1] + (n, n))
    a[..., 0, 0] = u
    a[..., 0, 1] = rho
    a[..., 1, 0] = theta / rho
    a[..., 1, 1] = u
    a[..., 1, 2] = 1.0
    a[..., 2, 1] = 2.0 * theta
    a[..., 2, 2] = u
    a[..., 2, 3] = 6.0 / rho

    for k in range(3, m + 1):
        a[..., k, k] += u
        if k - 1 >= 3:
            a[..., k, k - 1] += theta
        a[..., k, 0] += -theta * f(k - 1) / rho
        a[..., k, 1] += (k + 1) * f(k)
        a[..., k, 3] += -3.0 * f(k - 2) / rho
        if k < m:
            a[..., k, k + 1] += k + 1
            a[..., k, 2] += ((k - 1) * f(k - 1) + theta * f(k - 3)) / 2.0
        else:
            a[..., k, 2] += -f(m - 1) + theta * f(m - 3) / 2.0
            a[..., k, 3] += 3.0 * (m + 1) * f(m) / (rho * theta)

    a[..., m - 1, 2] += -m * (m + 1) * f(m) / (2.0 * theta)
    return a


def hme_model(m: int) -> ModelSystem:
    """Nonlinear HME with BGK relaxation of ``f_3 .. f_M``."""
    if m < 4:
        raise ValueError(f"HME needs m >= 4, got m={m}")
    names = ("rho", "u", "theta") + tuple(f"f{i}" for i in range(3, m + 1))
    return ModelSystem(
        name="hme",
        n_vars=m + 1,
        system_matrix=lambda state: hme_system_matrix(state, m),
        source_matrix=_relaxation_matrix(m + 1, 3),
        constant=False,
        variable_names=names,
    )


def hme_linearized(eq: EquilibriumState, m: int) -> ModelSystem:
    """HME frozen at the equilibrium ``(rho, u, theta, 0, ..., 0)``."""
    a0 = hme_system_matrix(eq.moments(m), m)
    a0.setflags(write=False)
    names = ("rho", "u", "theta") + tuple(f"f{i}" for i in range(3, m + 1))

    def system_matrix(state):
        state = np.asarray(state)
        return np.broadcast_to(a0, state.shape[:-1] + a0.shape).copy()

    return ModelSystem(
        name="hme_linearized",
        n_vars=m + 1,
        system_matrix=system_matrix,
        source_matrix=_relaxation_matrix(m + 1, 3),
        variable_names=names,
    )


def hsm_matrix(m: int) -> np.ndarray:
    off = np.sqrt(np.arange(1, m + 1, dtype=float))
    return np.diag(off, 1) + np.diag(off, -1)


def hsm_model(m: int) -> ModelSystem:
    """Hermite spectral method with the diagonal (linearized) BGK relaxation."""
    if m < 3:
        raise ValueError(f"HSM needs m >= 3 so that three moments are conserved, got m={m}")
    a0 = hsm_matrix(m)
    a0.setflags(write=False)

    def system_matrix(state):
        state = np.asarray(state)
        return np.broadcast_to(a0, state.shape[:-1] + a0.shape).copy()

    return ModelSystem(
        name="hsm",
        n_vars=m + 1,
        system_matrix=system_matrix,
        source_matrix=_relaxation_matrix(m + 1, 3),
        variable_names=tuple(f"f{i}" for i in range(m + 1)),
    )


def maxwellian(eq: EquilibriumState, c):
    if eq.theta <= 0:
        raise ValueError("temperature must be positive")
    c = np.asarray(c, dtype=float)
    return eq.rho / math.sqrt(2.0 * math.pi * eq.theta) * np.exp(-((c - eq.vel) ** 2) / (2.0 * eq.theta))


def spectral_bound(model: ModelSystem, state: Optional[np.ndarray] = None) -> float:
    """Largest eigenvalue magnitude of ``A`` (the ``lambda_max`` of CFL formulas).

    If the matrix has complex eigenvalues, the largest absolute real part is
    returned and a :class:`ComplexSpectrumWarning` is emitted.
    """
    a = model.matrix(state)
    try:
        eigs = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigensolver failed for {model.name} at state {state}: {exc}") from exc
    if not np.all(np.isfinite(eigs)):
        raise FloatingPointError(f"non-finite eigenvalues for {model.name} at state {state}")
    scale = max(1.0, float(np.max(np.abs(eigs))))
    if np.max(np.abs(eigs.imag)) > 1e-10 * scale:
        warnings.warn(
            f"{model.name} system matrix has complex eigenvalues; reporting largest real part",
            ComplexSpectrumWarning,
            stacklevel=2,
        )
    return float(np.max(np.abs(eigs.real)))


def pressure_and_heat_flux(model: ModelSystem, w: np.ndarray):
    """Post-processing convention for HME states: ``p = rho theta`` and ``Q = 3 f_3``."""
    if model.name not in ("hme", "hme_linearized"):
        raise ValueError(f"pressure/heat flux are defined for HME states only, not {model.name}")
    w = np.asarray(w)
    p = w[..., 0] * w[..., 2]
    q = 3.0 * w[..., 3] if model.n_vars > 3 else np.zeros_like(p)
    return p, q
