"""Closed-form parameter bounds, stability regions and spectral radii of transition matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .discretization import Scheme, ViscosityScheme
from .integrators import AFE, APFE, APPFE, FE, PFE, IntegratorConfig, TransitionMatrix, amplification_factor
from .spectral import Disk, clusters_scheme, dense_eigvals

INTEGRATORS = ("fe", "pfe", "afe", "apfe", "appfe")


@dataclass
class StabilityVerdict:
    integrator: str
    scheme: str
    stable: bool
    reason: str
    cfl_bound: Optional[float] = None
    dt: Optional[float] = None
    delta_t: Optional[float] = None
    delta_t_r: Optional[float] = None
    k: Optional[int] = None
    k_r: Optional[int] = None

    def to_config(self) -> IntegratorConfig:
        if not self.stable:
            raise ValueError(f"{self.integrator}/{self.scheme} has no stable parameters: {self.reason}")
        name = self.integrator
        if name == "fe":
            return FE(self.dt)
        if name == "pfe":
            return PFE(self.delta_t, self.k, self.dt)
        if name == "afe":
            return AFE(self.delta_t, self.dt)
        if name == "apfe":
            return APFE(self.delta_t, self.k, self.dt)
        return APPFE(self.delta_t, self.k, self.delta_t_r, self.k_r, self.dt)

    def as_text(self) -> str:
        keys = ("integrator", "scheme", "stable", "cfl_bound", "dt", "delta_t", "delta_t_r", "k", "k_r", "reason")
        lines = []
        for key in keys:
            val = getattr(self, key)
            if val is None:
                continue
            if isinstance(val, float):
                val = format(val, ".17g")
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"


def _unstable(integrator, scheme, reason):
    return StabilityVerdict(integrator, scheme, False, reason)


def _fe_like_cfl(scheme: Scheme, ratio: float) -> Optional[float]:
    """Largest CFL putting the cluster with ``ratio = dx / (2 eps lambda_max)`` in the FE disk."""
    if scheme is Scheme.UPWIND:
        return 1.0 / (ratio + 1.0)
    if scheme is Scheme.FORCE:
        return -ratio + math.sqrt(ratio * ratio + 1.0)
    return None


def _inner_step(scheme: Scheme, lambda_max, dx, cfl, eps, half_force=True):
    if scheme is Scheme.UPWIND:
        return 1.0 / (lambda_max / dx + 1.0 / eps)
    if scheme is Scheme.LAX_FRIEDRICHS:
        return 1.0 / (lambda_max / (cfl * dx) + 1.0 / eps)
    factor = 0.5 if half_force else 1.0
    return 1.0 / (factor * lambda_max / dx * (1.0 / cfl + cfl) + 1.0 / eps)


def select_params(integrator: str, scheme, lambda_max: float, dx: float, eps_l: float, eps_r: float,
                  k: int = 1, verify: bool = True) -> StabilityVerdict:
    """Largest stable parameters of an integrator for a given spatial scheme.

    The left region is the stiff one, so ``eps_l <= eps_r`` is required.
    ``dt`` is always ``cfl_bound * dx / lambda_max``.  With ``verify`` the
    closed-form parameters are checked against the amplification factor on the
    boundary of every cluster disk; a failed check turns the verdict unstable.
    """
    verdict = _select(integrator, scheme, lambda_max, dx, eps_l, eps_r, k)
    if verify and verdict.stable:
        worst = cluster_growth(verdict, lambda_max, dx, eps_l, eps_r)
        if worst > 1 + 1e-9:
            return _unstable(verdict.integrator, verdict.scheme,
                             f"no spectral gap: closed-form parameters leave a cluster outside the stability "
                             f"region (max growth factor {worst:.6g})")
    return verdict


def cluster_growth(verdict: StabilityVerdict, lambda_max: float, dx: float, eps_l: float, eps_r: float,
                   n_samples: int = 256) -> float:
    """Largest |growth factor| over the boundaries of the closed-form cluster disks.

    Growth factors are polynomials in lambda, so the boundary maximum bounds the
    whole disk.  Left modes see the slow and eps_l clusters, right modes the
    slow and eps_r clusters; global schemes see all three.
    """
    config = verdict.to_config()
    clusters = clusters_scheme(ViscosityScheme(verdict.scheme, verdict.cfl_bound), lambda_max, dx, [eps_l, eps_r])
    phi = np.exp(2j * np.pi * np.arange(n_samples) / n_samples)

    def ring(disks):
        return np.concatenate([d.center + d.radius * phi for d in disks])

    left = ring(clusters.slow + clusters.fast[eps_l])
    right = ring(clusters.slow + clusters.fast[eps_r])
    if isinstance(config, (FE, PFE)):
        return float(np.max(np.abs(amplification_factor(config, np.concatenate([left, right])))))
    sig_l, _ = amplification_factor(config, left, left)
    _, sig_r = amplification_factor(config, right, right)
    return float(max(np.max(np.abs(sig_l)), np.max(np.abs(sig_r))))


def _select(integrator, scheme, lambda_max, dx, eps_l, eps_r, k):
    integrator = integrator.lower()
    scheme = Scheme(scheme)
    if integrator not in INTEGRATORS:
        raise ValueError(f"unknown integrator {integrator!r}; expected one of {INTEGRATORS}")
    for name, val in (("lambda_max", lambda_max), ("dx", dx), ("eps_l", eps_l), ("eps_r", eps_r)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
    if eps_l > eps_r:
        raise ValueError(f"the left region must be the stiff one: eps_l={eps_l} > eps_r={eps_r}")
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    tag = scheme.value
    ratio_l = dx / (2.0 * eps_l * lambda_max)
    ratio_r = dx / (2.0 * eps_r * lambda_max)

    if integrator == "fe":
        cfl = _fe_like_cfl(scheme, ratio_l)
        if cfl is None:
            return _unstable("fe", tag, "unconditionally unstable: the relaxation cluster leaves the FE disk for every CFL")
        return StabilityVerdict("fe", tag, True, "fast cluster inside the FE disk", cfl, cfl * dx / lambda_max)

    if integrator == "pfe":
        note = "inner steps resolve the eps_l cluster"
        cfl = 1.0
        if eps_r != eps_l:
            bound = _fe_like_cfl(scheme, ratio_r)
            if bound is None:
                return _unstable("pfe", tag, "unconditionally unstable: the eps_r cluster sits between the two PFE disks")
            cfl = min(cfl, bound)
            note += "; outer step keeps the eps_r cluster in the FE disk"
        delta_t = _inner_step(scheme, lambda_max, dx, cfl, eps_l, half_force=False)
        if scheme is Scheme.FORCE:
            note += "; FORCE inner step without the 1/2 factor (the smaller of the two variants)"
        return _projective_verdict("pfe", tag, note, cfl, dx, lambda_max, delta_t, k)

    if scheme is Scheme.LAX_FRIEDRICHS and integrator in ("afe", "apfe"):
        return _unstable(integrator, tag, "unconditionally unstable: the intermediate eps_r cluster cannot be integrated with FE")

    if integrator == "afe":
        cfl = _fe_like_cfl(scheme, ratio_r)
        dt = cfl * dx / lambda_max
        if scheme is Scheme.UPWIND:
            dt_max = 1.0 / (lambda_max / dx + 1.0 / (2.0 * eps_l))
        else:
            dt_max = _inner_step(scheme, lambda_max, dx, cfl, 2.0 * eps_l)
        n_sub = max(1, math.ceil(dt / dt_max * (1 - 1e-12)))
        return StabilityVerdict("afe", tag, True, f"{n_sub} FE substeps per macro step on the left",
                                cfl, dt, dt / n_sub, k=n_sub - 1)

    if integrator == "apfe":
        cfl = _fe_like_cfl(scheme, ratio_r)
        delta_t = _inner_step(scheme, lambda_max, dx, cfl, eps_l)
        return _projective_verdict("apfe", tag, "projective left region, FE right region",
                                   cfl, dx, lambda_max, delta_t, k)

    cfl = 1.0
    dt = dx / lambda_max
    delta_l = _inner_step(scheme, lambda_max, dx, cfl, eps_l)
    delta_r = _inner_step(scheme, lambda_max, dx, cfl, eps_r)
    if (k + 1) * delta_r > dt:
        return _unstable("appfe", tag, f"(k+1) delta_t_r = {(k + 1) * delta_r:.3g} exceeds dt = {dt:.3g}; "
                                       "the right region is not stiff enough for projective steps")
    return StabilityVerdict("appfe", tag, True, "projective steps in both regions", cfl, dt, delta_l, delta_r, k, k)


def _projective_verdict(name, tag, note, cfl, dx, lambda_max, delta_t, k):
    dt = cfl * dx / lambda_max
    if (k + 1) * delta_t > dt:
        return _unstable(name, tag, f"(k+1) delta_t = {(k + 1) * delta_t:.3g} exceeds dt = {dt:.3g}; "
                                    "no spectral gap to exploit")
    return StabilityVerdict(name, tag, True, note, cfl, dt, delta_t, k=k)


@dataclass
class RegionSpec:
    """Disk unions per mode family: ``global`` for FE/PFE, ``left``/``right`` for adaptive schemes."""

    families: Dict[str, List[Disk]] = field(default_factory=dict)


def _fe_disk(h):
    return Disk(complex(-1.0 / h), 1.0 / h)


def stability_region(config: IntegratorConfig) -> RegionSpec:
    if isinstance(config, FE):
        return RegionSpec({"global": [_fe_disk(config.dt)]})
    if isinstance(config, PFE):
        small = Disk(complex(-1.0 / config.delta_t),
                     (1.0 / config.delta_t) * (config.delta_t / config.dt) ** (1.0 / config.k))
        return RegionSpec({"global": [_fe_disk(config.dt), small]})
    if isinstance(config, AFE):
        return RegionSpec({"left": [_fe_disk(config.delta_t)], "right": [_fe_disk(config.dt)]})
    if isinstance(config, APFE):
        small = Disk(complex(-1.0 / config.delta_t),
                     (1.0 / config.delta_t) * (config.delta_t / config.dt) ** (config.k + 1))
        return RegionSpec({"left": [_fe_disk(config.dt), small], "right": [_fe_disk(config.dt)]})
    if isinstance(config, APPFE):
        fams = {}
        for side, h, k in (("left", config.delta_t_l, config.k_l), ("right", config.delta_t_r, config.k_r)):
            fams[side] = [Disk(complex(-1.0 / h), 1.0 / config.dt),
                          Disk(complex(-1.0 / h), (1.0 / h) * (h / config.dt) ** (k + 1))]
        return RegionSpec(fams)
    raise TypeError(f"unknown integrator config {config!r}")


def region_contains(region: RegionSpec, lam, family: str = "global", tol: float = 1e-12) -> bool:
    disks = region.families[family]
    lam = complex(lam)
    return any(abs(lam - d.center) <= d.radius * (1 + tol) + tol for d in disks)


def spectral_radius(t) -> float:
    mat = t.matrix if isinstance(t, TransitionMatrix) else np.asarray(t)
    return float(np.max(np.abs(dense_eigvals(mat))))
