"""Experiment configuration: a flat ``section.key = value`` text format.

Blank lines and ``#`` comments are ignored.  Values are numbers, booleans
(``true``/``false``), ``none``, bare strings, or comma-separated lists of
numbers.  Every key not given keeps its default.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, get_type_hints

MODEL_TYPES = ("scalar", "hme", "hme_linearized", "hsm")
SCHEME_TYPES = ("upwind", "lf", "force")
INTEGRATOR_TYPES = ("fe", "pfe", "afe", "apfe", "appfe")
BOUNDARY_TYPES = ("periodic", "zero_gradient")
INITIAL_TYPES = ("riemann", "equilibrium")


class ConfigError(ValueError):
    pass


@dataclass
class ModelSection:
    type: str = "hme_linearized"
    m: int = 4
    rho: float = 1.0
    vel: float = math.pi
    theta: float = 1.0
    a: float = 1.0


@dataclass
class GridSection:
    x_min: float = -1.0
    x_max: float = 1.0
    n_cells: int = 100


@dataclass
class RelaxationSection:
    eps_l: float = 1e-4
    eps_r: float = 1e-3
    split_x: float = 0.0


@dataclass
class SchemeSection:
    type: str = "upwind"
    cfl: float = 1.0


@dataclass
class IntegratorSection:
    type: str = "fe"
    auto: bool = True
    dt: Optional[float] = None
    delta_t: Optional[float] = None
    k: int = 1
    delta_t_r: Optional[float] = None
    k_r: int = 1


@dataclass
class BoundarySection:
    type: str = "periodic"


@dataclass
class RunSection:
    end_time: float = 0.1
    use_reference_dt: bool = False
    reference_dt: float = 3.85e-4
    snapshots: List[float] = field(default_factory=list)


@dataclass
class InitialSection:
    type: str = "riemann"
    left: List[float] = field(default_factory=lambda: [1.0, 0.5, 1.0])
    right: List[float] = field(default_factory=lambda: [1.0, -0.5, 1.0])


@dataclass
class SpectrumSection:
    tolerance: float = 1e-9


@dataclass
class TransitionSection:
    inflate: float = 1.0


@dataclass
class ExperimentConfig:
    model: ModelSection = field(default_factory=ModelSection)
    grid: GridSection = field(default_factory=GridSection)
    relaxation: RelaxationSection = field(default_factory=RelaxationSection)
    scheme: SchemeSection = field(default_factory=SchemeSection)
    integrator: IntegratorSection = field(default_factory=IntegratorSection)
    boundary: BoundarySection = field(default_factory=BoundarySection)
    run: RunSection = field(default_factory=RunSection)
    initial: InitialSection = field(default_factory=InitialSection)
    spectrum: SpectrumSection = field(default_factory=SpectrumSection)
    transition: TransitionSection = field(default_factory=TransitionSection)


def _sections() -> Dict[str, type]:
    return {f.name: get_type_hints(ExperimentConfig)[f.name] for f in dataclasses.fields(ExperimentConfig)}


def _coerce(raw: str, hint, where: str):
    text = raw.strip()
    low = text.lower()
    optional = getattr(hint, "__origin__", None) is not None and type(None) in getattr(hint, "__args__", ())
    if optional:
        if low == "none":
            return None
        hint = next(a for a in hint.__args__ if a is not type(None))
    try:
        if hint is bool:
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError
        if hint is int:
            val = float(text)
            if val != int(val):
                raise ValueError
            return int(val)
        if hint is float:
            return float(text)
        if hint is str:
            if not text:
                raise ValueError
            return low
        if getattr(hint, "__origin__", None) in (list, List):
            return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        name = getattr(hint, "__name__", str(hint))
        raise ConfigError(f"{where}: cannot read {raw.strip()!r} as {name}") from None
    raise ConfigError(f"{where}: unsupported type {hint}")


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    cfg = ExperimentConfig()
    sections = _sections()
    lines: Dict[Tuple[str, str], str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        where = f"{source}:{lineno}"
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'section.key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.count(".") != 1:
            raise ConfigError(f"{where}: key {key!r} must have the form section.key")
        sec, name = key.split(".")
        if sec not in sections:
            raise ConfigError(f"{where}: unknown section {sec!r}; expected one of {sorted(sections)}")
        hints = get_type_hints(sections[sec])
        if name not in hints:
            raise ConfigError(f"{where}: unknown key {key!r}; {sec} has {sorted(hints)}")
        if (sec, name) in lines:
            raise ConfigError(f"{where}: duplicate key {key!r} (first set at {lines[(sec, name)]})")
        lines[(sec, name)] = where
        setattr(getattr(cfg, sec), name, _coerce(value, hints[name], where))
    validate(cfg, lines)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return parse_config(text, str(path))


def validate(cfg: ExperimentConfig, lines: Optional[Dict[Tuple[str, str], str]] = None) -> None:
    lines = lines or {}

    def fail(sec, name, msg):
        where = lines.get((sec, name), "<default>")
        raise ConfigError(f"{where}: {sec}.{name} {msg}")

    for sec, name, allowed in (("model", "type", MODEL_TYPES), ("scheme", "type", SCHEME_TYPES),
                               ("integrator", "type", INTEGRATOR_TYPES), ("boundary", "type", BOUNDARY_TYPES),
                               ("initial", "type", INITIAL_TYPES)):
        val = getattr(getattr(cfg, sec), name)
        if val not in allowed:
            fail(sec, name, f"must be one of {allowed}, got {val!r}")
    m = cfg.model
    if m.type in ("hme", "hme_linearized") and m.m < 4:
        fail("model", "m", f"must be at least 4 for HME, got {m.m}")
    if m.type == "hsm" and m.m < 3:
        fail("model", "m", f"must be at least 3 for HSM, got {m.m}")
    for name in ("rho", "theta"):
        if not getattr(m, name) > 0:
            fail("model", name, "must be positive")
    if cfg.grid.n_cells < 1:
        fail("grid", "n_cells", "must be positive")
    if not cfg.grid.x_max > cfg.grid.x_min:
        fail("grid", "x_max", "must exceed grid.x_min")
    for name in ("eps_l", "eps_r"):
        if not getattr(cfg.relaxation, name) > 0:
            fail("relaxation", name, "must be positive (use inf to switch relaxation off)")
    if not 0 < cfg.scheme.cfl <= 1:
        fail("scheme", "cfl", f"must lie in (0, 1], got {cfg.scheme.cfl}")
    it = cfg.integrator
    for name in ("dt", "delta_t", "delta_t_r"):
        val = getattr(it, name)
        if val is not None and not val > 0:
            fail("integrator", name, "must be positive")
    for name in ("k", "k_r"):
        if getattr(it, name) < 0:
            fail("integrator", name, "must be non-negative")
    if not it.auto and it.type != "fe" and it.delta_t is None:
        fail("integrator", "delta_t", f"is required for {it.type} when integrator.auto = false")
    if not it.auto and it.type == "appfe" and it.delta_t_r is None:
        fail("integrator", "delta_t_r", "is required for appfe when integrator.auto = false")
    if not cfg.run.end_time > 0:
        fail("run", "end_time", "must be positive")
    if not cfg.run.reference_dt > 0:
        fail("run", "reference_dt", "must be positive")
    if not cfg.transition.inflate > 0:
        fail("transition", "inflate", "must be positive")
    if not cfg.spectrum.tolerance >= 0:
        fail("spectrum", "tolerance", "must be non-negative")


def _fmt_value(val) -> str:
    if val is None:
        return "none"
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, int):
        return str(val)
    if isinstance(val, float):
        return format(val, ".17g")
    if isinstance(val, list):
        return ", ".join(format(float(v), ".17g") for v in val)
    return str(val)


def dump_config(cfg: ExperimentConfig) -> str:
    """Full config text; :func:`parse_config` reads it back to an equal object."""
    out = []
    for sec in _sections():
        obj = getattr(cfg, sec)
        for f in dataclasses.fields(obj):
            out.append(f"{sec}.{f.name} = {_fmt_value(getattr(obj, f.name))}")
        out.append("")
    return "\n".join(out)
