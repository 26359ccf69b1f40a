"""Flat key=value run configuration with section-prefixed keys.

Example file::

    # coupling parameters
    params.k0 = 0.5
    params.k2 = 2
    variant = dyadic
    solver.tol_root = 1e-12
    schedule.tag = mu
    schedule.j_hi = 40
    output.dir = out

Unknown keys are rejected with the offending line number.  Values unset in
the file keep their defaults; command-line flags override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .coupling import CouplingParams, Variant, make_triple
from .errors import ConfigError
from .experiment import ScheduleTag
from .solver import SolverConfig

__all__ = ["RunConfig", "parse_config_file", "load_config"]

_SCHEDULE_TAGS = {tag.value: tag for tag in ScheduleTag}
_VARIANTS = {v.value: v for v in Variant}


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    """Everything a CLI run needs; validated into domain objects on demand."""

    # params.*
    k0: float | None = None  # default depends on the variant
    k1: float = 1.0
    k2: float = 2.0
    k_star: float = 1.6
    d: float = 1.0
    allow_small_d: bool = False
    # top level
    variant: Variant = Variant.DYADIC
    # solver.*
    tol_root: float = 1e-12
    tol_res: float = 1e-10
    max_iter: int = 2000
    bracket_expand: float = 2.0
    # schedule.*
    tag: ScheduleTag = ScheduleTag.MU
    j_lo: int = 1
    j_hi: int = 40
    lam_min: float | None = None
    lam_max: float | None = None
    # construct.*
    x_min: float = -1.5
    x_max: float = 0.5
    samples: int = 2001
    # pde.*
    grid_n: int = 64
    # limits.*
    j_max: int = 40
    gap_min: float = 1e-3
    # output.*
    out_dir: str = "."
    out_format: str = "csv"
    plot: bool = True

    def effective_k0(self) -> float:
        if self.k0 is not None:
            return self.k0
        return 0.25 if self.variant is Variant.SINLOG else 0.5

    def build_params(self) -> CouplingParams:
        return CouplingParams(k0=self.effective_k0(), k1=self.k1, k2=self.k2,
                              k_star=self.k_star, d=self.d, allow_small_d=self.allow_small_d)

    def build_triple(self):
        return make_triple(self.build_params(), self.variant)

    def build_solver_config(self) -> SolverConfig:
        return SolverConfig(tol_root=self.tol_root, tol_res=self.tol_res,
                            max_iter=self.max_iter, bracket_expand=self.bracket_expand)

    def params_echo(self) -> dict:
        return {"k0": self.effective_k0(), "k1": self.k1, "k2": self.k2,
                "k_star": self.k_star, "d": self.d}


def _variant_from_text(text: str) -> Variant:
    if text not in _VARIANTS:
        raise ValueError(f"unknown variant {text!r}; expected one of {sorted(_VARIANTS)}")
    return _VARIANTS[text]


def _tag_from_text(text: str) -> ScheduleTag:
    if text not in _SCHEDULE_TAGS:
        raise ValueError(f"unknown schedule tag {text!r}; expected one of {sorted(_SCHEDULE_TAGS)}")
    return _SCHEDULE_TAGS[text]


def _format_from_text(text: str) -> str:
    if text not in ("csv", "json"):
        raise ValueError(f"unknown format {text!r}; expected csv or json")
    return text


# key in file -> (RunConfig attribute, caster)
_KEY_TABLE = {
    "params.k0": ("k0", float),
    "params.k1": ("k1", float),
    "params.k2": ("k2", float),
    "params.k_star": ("k_star", float),
    "params.d": ("d", float),
    "params.allow_small_d": ("allow_small_d", _parse_bool),
    "variant": ("variant", _variant_from_text),
    "solver.tol_root": ("tol_root", float),
    "solver.tol_res": ("tol_res", float),
    "solver.max_iter": ("max_iter", int),
    "solver.bracket_expand": ("bracket_expand", float),
    "schedule.tag": ("tag", _tag_from_text),
    "schedule.j_lo": ("j_lo", int),
    "schedule.j_hi": ("j_hi", int),
    "schedule.lam_min": ("lam_min", float),
    "schedule.lam_max": ("lam_max", float),
    "construct.x_min": ("x_min", float),
    "construct.x_max": ("x_max", float),
    "construct.samples": ("samples", int),
    "pde.grid_n": ("grid_n", int),
    "limits.j_max": ("j_max", int),
    "limits.gap_min": ("gap_min", float),
    "output.dir": ("out_dir", str),
    "output.format": ("out_format", _format_from_text),
    "output.plot": ("plot", _parse_bool),
}


def parse_config_file(path) -> RunConfig:
    """Parse a key=value file into a RunConfig, rejecting unknown keys."""
    config = RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected KEY = VALUE, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KEY_TABLE:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        attr, caster = _KEY_TABLE[key]
        try:
            setattr(config, attr, caster(value))
        except ValueError as err:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {err}") from err
    return config


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Config from an optional file plus non-None attribute overrides."""
    config = parse_config_file(path) if path else RunConfig()
    valid = {f.name for f in fields(RunConfig)}
    for name, value in (overrides or {}).items():
        if value is None:
            continue
        if name not in valid:
            raise ConfigError(f"unknown config override {name!r}")
        setattr(config, name, value)
    return config
