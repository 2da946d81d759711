"""Command-line driver.

    adaptive-pi spectrum   --config exp.cfg --out results/
    adaptive-pi transition --config exp.cfg --out results/
    adaptive-pi stability  --config exp.cfg --out results/ --seed 0
    adaptive-pi simulate   --config exp.cfg --out results/
    adaptive-pi speedup    --out results/

Exit codes: 0 success, 2 configuration error, 3 numerical failure or instability.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .config import ConfigError, ExperimentConfig
from .discretization import (Boundary, FluctuationScheme, Grid1D, RelaxationProfile, ViscosityScheme,
                             assemble_semi_discrete, split_blocks, viscosity_matrix)
from .integrators import (AFE, APFE, APPFE, FE, PFE, amplification_factor, transition_afe, transition_apfe,
                          transition_by_probing, transition_fe, transition_pfe)
from .io import write_csv, write_text
from .models import EquilibriumState, hme_linearized, hme_model, hsm_model, pressure_and_heat_flux, scalar_model, \
    spectral_bound
from .simulate import SimulationError, field_lambda_max, riemann_initial, run, with_macro_step
from .spectral import clusters_theorem1, containment_check, numerical_spectrum
from .speedup import table1, table1_csv, table1_markdown
from .stability import region_contains, select_params, spectral_radius, stability_region

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
RADIUS_TOL = 1e-9


class NumericalFailure(RuntimeError):
    pass


def build_model(cfg: ExperimentConfig):
    m = cfg.model
    if m.type == "scalar":
        return scalar_model(m.a)
    if m.type == "hsm":
        return hsm_model(m.m)
    if m.type == "hme":
        return hme_model(m.m)
    return hme_linearized(EquilibriumState(m.rho, m.vel, m.theta), m.m)


def build_grid(cfg):
    return Grid1D(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n_cells)


def build_profile(cfg):
    r = cfg.relaxation
    return RelaxationProfile(r.eps_l, r.eps_r, r.split_x)


def _linear_setup(cfg):
    model = build_model(cfg)
    if not model.constant:
        raise ConfigError(f"model.type = {cfg.model.type} is nonlinear; this command needs a linear model")
    return model, build_grid(cfg), build_profile(cfg), spectral_bound(model)


def integrator_config(cfg: ExperimentConfig, lambda_max: float, dx: float):
    """Integrator parameters from ``select_params`` (auto) or from the config, and the CFL to use."""
    it = cfg.integrator
    if it.auto:
        r = cfg.relaxation
        verdict = select_params(it.type, cfg.scheme.type, lambda_max, dx, r.eps_l, r.eps_r, it.k)
        if not verdict.stable:
            raise NumericalFailure(f"{it.type} with {cfg.scheme.type}: {verdict.reason}")
        return verdict.to_config(), verdict.cfl_bound
    dt = it.dt if it.dt is not None else cfg.scheme.cfl * dx / lambda_max
    try:
        if it.type == "fe":
            return FE(dt), cfg.scheme.cfl
        if it.type == "pfe":
            return PFE(it.delta_t, it.k, dt), cfg.scheme.cfl
        if it.type == "afe":
            return AFE(it.delta_t, dt), cfg.scheme.cfl
        if it.type == "apfe":
            return APFE(it.delta_t, it.k, dt), cfg.scheme.cfl
        return APPFE(it.delta_t, it.k, it.delta_t_r, it.k_r, dt), cfg.scheme.cfl
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from exc


def inflate(config, factor: float):
    """Scale every step size of a config by ``factor``."""
    if factor == 1.0:
        return config
    if isinstance(config, FE):
        return FE(config.dt * factor)
    if isinstance(config, AFE):
        return AFE(config.delta_t * factor, config.dt * factor)
    if isinstance(config, APPFE):
        return APPFE(config.delta_t_l * factor, config.k_l, config.delta_t_r * factor, config.k_r,
                     config.dt * factor)
    return type(config)(config.delta_t * factor, config.k, config.dt * factor)


def cmd_spectrum(cfg: ExperimentConfig, out: Path) -> int:
    model, grid, profile, lam = _linear_setup(cfg)
    scheme = ViscosityScheme(cfg.scheme.type, cfg.scheme.cfl)
    op = assemble_semi_discrete(model, grid, profile, scheme, lam)
    eigs = numerical_spectrum(op)
    a = model.matrix()
    q = viscosity_matrix(scheme, a, grid.dx, lam)
    clusters = clusters_theorem1(a, q, grid.dx, [profile.eps_left, profile.eps_right])
    report = containment_check(eigs, clusters, cfg.spectrum.tolerance)
    order = np.lexsort((eigs.imag, eigs.real))
    write_csv(out / "eigenvalues.csv", ("re", "im"), ((z.real, z.imag) for z in eigs[order]))
    write_csv(out / "clusters.csv", ("center_re", "center_im", "radius"),
              ((d.center.real, d.center.imag, d.radius) for d in clusters.disks()))
    print(f"lambda_max = {lam:.6g}")
    print(f"eigenvalues = {eigs.size}")
    print(f"contained = {str(report.contained).lower()}")
    print(f"worst_margin = {report.worst_margin:.6g}")
    return EXIT_OK


def transition_matrix(cfg: ExperimentConfig):
    """Transition matrix of the configured linear experiment and the integrator config used."""
    model, grid, profile, lam = _linear_setup(cfg)
    config, cfl = integrator_config(cfg, lam, grid.dx)
    config = inflate(config, cfg.transition.inflate)
    scheme = ViscosityScheme(cfg.scheme.type, cfl)
    op = assemble_semi_discrete(model, grid, profile, scheme, lam)
    if isinstance(config, FE):
        return transition_fe(op, config.dt), config
    if isinstance(config, PFE):
        return transition_pfe(op, config.delta_t, config.k, config.dt), config
    split = split_blocks(op, profile.split_index(grid))
    if isinstance(config, AFE):
        return transition_afe(split, config.delta_t, config.dt), config
    if isinstance(config, APFE):
        return transition_apfe(split, config.delta_t, config.k, config.dt), config
    return transition_by_probing(split, config), config


def cmd_transition(cfg: ExperimentConfig, out: Path) -> int:
    t, config = transition_matrix(cfg)
    eigs = np.linalg.eigvals(t.matrix)
    order = np.lexsort((eigs.imag, eigs.real))
    write_csv(out / "transition_eigs.csv", ("re", "im"), ((z.real, z.imag) for z in eigs[order]))
    radius = spectral_radius(t)
    print(f"integrator = {config}")
    print(f"spectral_radius = {radius:.17g}")
    if radius > 1 + RADIUS_TOL:
        print(f"warning: spectral radius {radius:.6g} exceeds 1, the scheme is unstable", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _map_points(disks, n=101):
    lo = min(d.center.real - d.radius for d in disks)
    hi = max(d.center.real + d.radius for d in disks)
    span = hi - lo
    h = max(d.radius for d in disks) * 1.1
    re = np.linspace(lo - 0.05 * span, hi + 0.05 * span, n)
    im = np.linspace(-h, h, n)
    rr, ii = np.meshgrid(re, im, indexing="ij")
    return (rr + 1j * ii).ravel()


def _growth(config, lam, family):
    sig = amplification_factor(config, lam)
    if isinstance(sig, tuple):
        sig = sig[0] if family == "left" else sig[1]
    return np.abs(sig)


def cmd_stability(cfg: ExperimentConfig, out: Path, seed: int = 0) -> int:
    it, r = cfg.integrator, cfg.relaxation
    model = build_model(cfg)
    grid = build_grid(cfg)
    lam_max = spectral_bound(model, None if model.constant else _initial_field(cfg, model, grid)[0])
    verdict = select_params(it.type, cfg.scheme.type, lam_max, grid.dx, r.eps_l, r.eps_r, it.k)
    text = verdict.as_text()
    write_text(out / "verdict.txt", text)
    sys.stdout.write(text)
    if not verdict.stable:
        return EXIT_OK
    config = verdict.to_config()
    region = stability_region(config)
    rng = np.random.default_rng(seed)
    for family, disks in region.families.items():
        pts = _map_points(disks)
        stable = _growth(config, pts, family) <= 1 + 1e-12
        write_csv(out / f"stability_map_{family}.csv", ("lambda_re", "lambda_im", "stable"),
                  ((z.real, z.imag, int(s)) for z, s in zip(pts, stable)))
        # printed disks against the amplification factor on random boundary samples
        picks = [disks[i] for i in rng.integers(len(disks), size=200)]
        phi = rng.uniform(0, 2 * np.pi, 200)
        samples = np.array([dk.center + dk.radius * np.exp(1j * p) for dk, p in zip(picks, phi)])
        inside = np.array([region_contains(region, z, family) for z in samples])
        agree = inside == (_growth(config, samples, family) <= 1 + 1e-10)
        print(f"{family}: region/amplification disagreements = {int(np.count_nonzero(~agree))} of {agree.size}")
    return EXIT_OK


def _initial_field(cfg, model, grid):
    n = model.n_vars
    if cfg.initial.type == "equilibrium":
        left = right = list(EquilibriumState(cfg.model.rho, cfg.model.vel, cfg.model.theta).moments(n - 1)) \
            if model.name.startswith("hme") else [0.0] * n
    else:
        left, right = cfg.initial.left, cfg.initial.right
    try:
        return riemann_initial(grid, n, left, right, cfg.relaxation.split_x)
    except ValueError as exc:
        raise ConfigError(f"initial: {exc}") from exc


def cmd_simulate(cfg: ExperimentConfig, out: Path) -> int:
    model = build_model(cfg)
    grid = build_grid(cfg)
    profile = build_profile(cfg)
    w0 = _initial_field(cfg, model, grid)
    lam = field_lambda_max(model, w0)
    config, cfl = integrator_config(cfg, lam, grid.dx)
    if cfg.run.use_reference_dt:
        config = with_macro_step(config, cfg.run.reference_dt)
    scheme = ViscosityScheme(cfg.scheme.type, cfl)
    problem = FluctuationScheme(model, grid, profile, scheme, Boundary(cfg.boundary.type), lam)
    try:
        result = run(problem, config, w0, cfg.run.end_time, snapshot_times=cfg.run.snapshots)
    except (SimulationError, ValueError) as exc:
        raise NumericalFailure(str(exc)) from exc
    names = list(model.variable_names)
    hme = model.name.startswith("hme")
    for t, w in result.snapshots:
        cols = [grid.centers] + [w[:, j] for j in range(model.n_vars)]
        header = ["x"] + names
        if hme:
            p, q = pressure_and_heat_flux(model, w)
            cols += [p, q]
            header += ["p", "Q"]
        write_csv(out / f"solution_t{t:.6f}.csv", header, zip(*cols))
    write_text(out / "run.cfg", cfgmod.dump_config(cfg))
    meta = (f"steps = {result.steps}\ndt = {result.dt:.17g}\nlambda_max = {lam:.17g}\n"
            f"integrator = {result.config}\n")
    write_text(out / "run_meta.txt", meta)
    sys.stdout.write(meta)
    return EXIT_OK


def cmd_speedup(out: Path) -> int:
    tab = table1()
    write_text(out / "table1.csv", table1_csv(tab))
    write_text(out / "table1.md", table1_markdown(tab))
    sys.stdout.write(table1_markdown(tab))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adaptive-pi", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "transition", "stability", "simulate", "speedup"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, default=None, help="flat section.key = value file")
        sp.add_argument("--out", type=Path, default=Path("results"))
        sp.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "speedup":
            return cmd_speedup(args.out)
        cfg = cfgmod.load_config(args.config) if args.config else ExperimentConfig()
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args.out)
        if args.command == "transition":
            return cmd_transition(cfg, args.out)
        if args.command == "stability":
            return cmd_stability(cfg, args.out, args.seed)
        return cmd_simulate(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
