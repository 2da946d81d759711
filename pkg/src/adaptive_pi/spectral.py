"""Gershgorin-type cluster bounds for the semi-discrete operator and their numerical check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List

import numpy as np

from .discretization import Scheme, SemiDiscreteOperator, ViscosityScheme

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError(f"radius must be non-negative, got {self.radius}")

    def distance(self, z) -> np.ndarray:
        """Signed distance from ``z`` to the disk boundary (negative inside)."""
        return np.abs(np.asarray(z) - self.center) - self.radius


@dataclass
class ClusterSet:
    slow: List[Disk]
    fast: Dict[float, List[Disk]] = field(default_factory=dict)

    def disks(self) -> List[Disk]:
        out = list(self.slow)
        for eps in sorted(self.fast):
            out.extend(self.fast[eps])
        return out


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    clusters: ClusterSet
    contained: bool
    worst_margin: float


def _max_abs_eig(m: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def clusters_theorem1(a_mat, q_mat, dx: float, eps_values: Iterable[float]) -> ClusterSet:
    """One slow disk per eigenvalue of ``Q`` and one fast disk per (eigenvalue, eps).

    Centres are ``-lambda(Q)/dx`` and ``-lambda(Q)/dx - 1/eps``; every disk has
    radius ``(|lambda_max(Q - A)| + |lambda_max(Q + A)|) / (2 dx)``.
    """
    a_mat = np.atleast_2d(np.asarray(a_mat, dtype=float))
    q_mat = np.atleast_2d(np.asarray(q_mat, dtype=float))
    if dx <= 0:
        raise ValueError("dx must be positive")
    lam_q = np.linalg.eigvals(q_mat)
    if not np.all(np.isfinite(lam_q)):
        raise np.linalg.LinAlgError("eigenvalues of Q are not finite")
    radius = (_max_abs_eig(q_mat - a_mat) + _max_abs_eig(q_mat + a_mat)) / (2.0 * dx)
    centers = -lam_q / dx
    slow = [Disk(complex(c), radius) for c in centers]
    fast = {}
    for eps in sorted(set(float(e) for e in eps_values)):
        if np.isinf(eps):
            continue
        fast[eps] = [Disk(complex(c - 1.0 / eps), radius) for c in centers]
    return ClusterSet(slow, fast)


def clusters_scheme(scheme: ViscosityScheme, lambda_max: float, dx: float, eps_values: Iterable[float],
                    cfl: float = None) -> ClusterSet:
    """Closed-form cluster disks in terms of ``lambda_max`` only.

    Upwind: centre ``-lambda_max/dx``, radius ``lambda_max/dx``.  For Upwind the
    exact per-eigenvalue centres lie on ``[-lambda_max/dx, 0]``; the single
    disk here is the worst case used in the parameter bounds.
    LF: centre and radius ``lambda_max/(cfl dx)``.
    FORCE: centre and radius ``lambda_max (1/cfl + cfl)/(2 dx)``.
    """
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    cfl = scheme.cfl if cfl is None else cfl
    if not 0 < cfl <= 1:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    tag = Scheme(scheme.tag)
    if tag is Scheme.UPWIND:
        center = -lambda_max / dx
        radius = lambda_max / dx
    elif tag is Scheme.LAX_FRIEDRICHS:
        center = -lambda_max / (cfl * dx)
        radius = lambda_max / (cfl * dx)
    else:
        center = -lambda_max / (2.0 * dx) * (1.0 / cfl + cfl)
        radius = lambda_max / (2.0 * dx) * (1.0 / cfl + cfl)
    slow = [Disk(complex(center), radius)]
    fast = {}
    for eps in sorted(set(float(e) for e in eps_values)):
        if np.isinf(eps):
            continue
        fast[eps] = [Disk(complex(center - 1.0 / eps), radius)]
    return ClusterSet(slow, fast)


def dense_eigvals(mat: np.ndarray) -> np.ndarray:
    if mat.shape[0] > DENSE_LIMIT:
        raise ValueError(f"matrix of size {mat.shape[0]} exceeds the dense eigensolver limit {DENSE_LIMIT}")
    try:
        eigs = np.linalg.eigvals(mat)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"dense eigensolver did not converge: {exc}") from exc
    return eigs


def numerical_spectrum(op: SemiDiscreteOperator) -> np.ndarray:
    return dense_eigvals(op.dense())


def containment_check(eigs, clusters: ClusterSet, tol: float = 1e-9) -> SpectrumReport:
    eigs = np.asarray(eigs, dtype=complex).ravel()
    disks = clusters.disks()
    if not disks:
        raise ValueError("no disks to check against")
    dist = np.min(np.stack([d.distance(eigs) for d in disks]), axis=0)
    worst = float(np.max(dist)) if dist.size else -np.inf
    return SpectrumReport(eigs, clusters, bool(worst <= tol), worst)
