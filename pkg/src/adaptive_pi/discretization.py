"""First-order PVM finite volume discretization on a uniform 1D grid.

The nonlinear right-hand side uses path-conservative fluctuations with a
linear-path Roe matrix.  For constant-matrix models the same scheme is a
block tridiagonal operator with periodic corners,

    d_i = -Q/dx - S/eps_i,   b = (Q - A)/(2 dx),   c = (Q + A)/(2 dx),

where ``b`` couples a cell to its right neighbour and ``c`` to its left one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .models import ModelSystem, spectral_bound


class Scheme(str, Enum):
    UPWIND = "upwind"
    LAX_FRIEDRICHS = "lf"
    FORCE = "force"


class Boundary(str, Enum):
    PERIODIC = "periodic"
    ZERO_GRADIENT = "zero_gradient"


@dataclass(frozen=True)
class ViscosityScheme:
    tag: Scheme
    cfl: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "tag", Scheme(self.tag))
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")

    def time_step(self, dx: float, lambda_max: float) -> float:
        return self.cfl * dx / lambda_max


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be positive, got {self.n_cells}")
        if not self.x_max > self.x_min:
            raise ValueError(f"empty interval [{self.x_min}, {self.x_max}]")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass(frozen=True)
class RelaxationProfile:
    """Piecewise constant relaxation time: ``eps_left`` for x < split_x, else ``eps_right``.

    ``math.inf`` is allowed and switches the source off.
    """

    eps_left: float
    eps_right: float
    split_x: float = 0.0

    def __post_init__(self):
        if not (self.eps_left > 0 and self.eps_right > 0):
            raise ValueError(f"relaxation times must be positive, got {self.eps_left}, {self.eps_right}")

    @classmethod
    def uniform(cls, eps: float) -> "RelaxationProfile":
        return cls(eps, eps, 0.0)

    def per_cell(self, grid: Grid1D) -> np.ndarray:
        return np.where(grid.centers < self.split_x, self.eps_left, self.eps_right)

    def split_index(self, grid: Grid1D) -> int:
        return int(np.count_nonzero(grid.centers < self.split_x))


def viscosity_matrix(scheme: ViscosityScheme, a_mat: np.ndarray, dx: float, lambda_max: float) -> np.ndarray:
    """PVM viscosity matrix ``Q`` for one or a stack of matrices ``A``.

    Upwind uses ``|A|`` from the eigendecomposition, Lax-Friedrichs
    ``(dx/dt) I`` and FORCE ``(dx/(2dt)) I + (dt/(2dx)) A^2`` with
    ``dt = cfl dx / lambda_max``.
    """
    a_mat = np.asarray(a_mat, dtype=float)
    n = a_mat.shape[-1]
    eye = np.eye(n)
    if scheme.tag is Scheme.UPWIND:
        return abs_matrix(a_mat)
    dt = scheme.time_step(dx, lambda_max)
    if scheme.tag is Scheme.LAX_FRIEDRICHS:
        return np.broadcast_to(dx / dt * eye, a_mat.shape).copy()
    return dx / (2.0 * dt) * eye + dt / (2.0 * dx) * (a_mat @ a_mat)


def abs_matrix(a_mat: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """``|A| = V |Lambda| V^-1`` for diagonalizable ``A`` with real spectrum."""
    lam, vec = np.linalg.eig(a_mat)
    scale = np.maximum(1.0, np.max(np.abs(lam), axis=-1, keepdims=True))
    bad = np.abs(lam.imag) > tol * scale
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        v = vec[tuple(idx[:-1]) + (slice(None), idx[-1])]
        raise ValueError(
            f"upwind viscosity needs real eigenvalues; eigenpair {tuple(idx)} has "
            f"lambda={lam[tuple(idx)]:.6g}, v={np.array2string(v, precision=4)}"
        )
    vec_inv = np.linalg.inv(vec)
    q = (vec * np.abs(lam.real)[..., None, :]) @ vec_inv
    return q.real


_GAUSS_CACHE: dict = {}


def _gauss_legendre(n: int):
    if n not in _GAUSS_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GAUSS_CACHE[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _GAUSS_CACHE[n]


def roe_matrix(model: ModelSystem, w_left, w_right, quad_points: int = 3) -> np.ndarray:
    """Linear-path Roe matrix, the Gauss-Legendre mean of ``A`` between the two states.

    Works on single states or stacks of shape ``(..., n_vars)``.
    """
    if quad_points < 1:
        raise ValueError("quad_points must be at least 1")
    w_left = np.asarray(w_left, dtype=float)
    w_right = np.asarray(w_right, dtype=float)
    if model.constant:
        return model.system_matrix(w_left)
    s, wts = _gauss_legendre(quad_points)
    jump = w_right - w_left
    a = 0.0
    for si, wi in zip(s, wts):
        a = a + wi * model.system_matrix(w_left + si * jump)
    return a


@dataclass
class FluctuationScheme:
    """Everything the nonlinear fluctuation right-hand side needs apart from the field.

    ``lambda_max`` fixes the time scale of Lax-Friedrichs and FORCE viscosity;
    it is computed from the model at rest when omitted (constant models only).
    """

    model: ModelSystem
    grid: Grid1D
    profile: RelaxationProfile
    scheme: ViscosityScheme
    boundary: Boundary = Boundary.PERIODIC
    lambda_max: Optional[float] = None
    quad_points: int = 3
    inv_eps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.boundary = Boundary(self.boundary)
        if self.lambda_max is None:
            if self.scheme.tag is not Scheme.UPWIND:
                self.lambda_max = spectral_bound(self.model)
        self.inv_eps = 1.0 / self.profile.per_cell(self.grid)

    def rhs(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return self.rhs_window(pad(w, self.boundary), slice(0, self.grid.n_cells))

    __call__ = rhs

    def rhs_window(self, padded: np.ndarray, cells: slice) -> np.ndarray:
        """Time derivative of the cells ``cells`` given their states with one ghost on each side."""
        if not np.all(np.isfinite(padded)):
            bad = np.argwhere(~np.isfinite(padded))[0][0] - 1 + (cells.start or 0)
            raise FloatingPointError(f"non-finite state in cell {bad}")
        wl, wr = padded[:-1], padded[1:]
        a_phi = roe_matrix(self.model, wl, wr, self.quad_points)
        q_phi = viscosity_matrix(self.scheme, a_phi, self.grid.dx, self.lambda_max)
        # overflow surfaces as inf/nan and is reported by the steppers
        with np.errstate(over="ignore", invalid="ignore"):
            jump = (wr - wl)[..., None]
            a_jump = (a_phi @ jump)[..., 0]
            q_jump = (q_phi @ jump)[..., 0]
            d_plus = 0.5 * (a_jump + q_jump)
            d_minus = 0.5 * (a_jump - q_jump)
            # interface j sits between padded[j] and padded[j+1]
            out = -(d_plus[:-1] + d_minus[1:]) / self.grid.dx
            source = padded[1:-1] @ self.model.source_matrix.T
            out -= self.inv_eps[cells, None] * source
        return out


def pad(w: np.ndarray, boundary: Boundary) -> np.ndarray:
    boundary = Boundary(boundary)
    if boundary is Boundary.PERIODIC:
        return np.concatenate([w[-1:], w, w[:1]])
    return np.concatenate([w[:1], w, w[-1:]])


def nonlinear_rhs(model, grid, profile, scheme, w, boundary=Boundary.PERIODIC, lambda_max=None, quad_points=3):
    """dW/dt of the fluctuation-form PVM scheme for a field ``w`` of shape ``(n_cells, n_vars)``."""
    return FluctuationScheme(model, grid, profile, scheme, boundary, lambda_max, quad_points).rhs(w)


@dataclass(frozen=True)
class SemiDiscreteOperator:
    """Block tridiagonal operator with periodic corners, one diagonal block per cell."""

    d: np.ndarray  # (n_cells, N, N)
    b: np.ndarray
    c: np.ndarray

    @property
    def n_cells(self) -> int:
        return self.d.shape[0]

    @property
    def n_vars(self) -> int:
        return self.d.shape[1]

    def dense(self) -> np.ndarray:
        nc, n = self.n_cells, self.n_vars
        mat = np.zeros((nc * n, nc * n))
        for i in range(nc):
            r = slice(i * n, (i + 1) * n)
            mat[r, r] += self.d[i]
            right = (i + 1) % nc
            left = (i - 1) % nc
            mat[r, right * n:(right + 1) * n] += self.b
            mat[r, left * n:(left + 1) * n] += self.c
        return mat

    def apply(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float).reshape(self.n_cells, self.n_vars)
        out = np.einsum("ijk,ik->ij", self.d, w)
        out += np.roll(w, -1, axis=0) @ self.b.T
        out += np.roll(w, 1, axis=0) @ self.c.T
        return out


def assemble_semi_discrete(model: ModelSystem, grid: Grid1D, profile: RelaxationProfile,
                           scheme: ViscosityScheme, lambda_max: Optional[float] = None) -> SemiDiscreteOperator:
    if not model.constant:
        raise ValueError(f"{model.name} is nonlinear; linearize it before assembling the operator")
    a = model.matrix()
    if lambda_max is None:
        lambda_max = spectral_bound(model)
    q = viscosity_matrix(scheme, a, grid.dx, lambda_max)
    dx = grid.dx
    inv_eps = 1.0 / profile.per_cell(grid)
    d = -q / dx - inv_eps[:, None, None] * model.source_matrix
    b = (q - a) / (2.0 * dx)
    c = (q + a) / (2.0 * dx)
    return SemiDiscreteOperator(d=d, b=b, c=c)


@dataclass(frozen=True)
class SplitOperator:
    """The operator partitioned into (left, right) cell groups at ``split_index``."""

    ll: np.ndarray
    lr: np.ndarray
    rl: np.ndarray
    rr: np.ndarray
    split_index: int
    n_vars: int

    def dense(self) -> np.ndarray:
        return np.block([[self.ll, self.lr], [self.rl, self.rr]])

    @property
    def n_left(self) -> int:
        return self.ll.shape[0]


def split_blocks(op: SemiDiscreteOperator, split_index: int) -> SplitOperator:
    if not 0 < split_index < op.n_cells:
        raise ValueError(f"split index must lie in (0, {op.n_cells}), got {split_index}")
    full = op.dense()
    k = split_index * op.n_vars
    return SplitOperator(
        ll=full[:k, :k].copy(),
        lr=full[:k, k:].copy(),
        rl=full[k:, :k].copy(),
        rr=full[k:, k:].copy(),
        split_index=split_index,
        n_vars=op.n_vars,
    )
