"""Run configuration: JSON schema, validation, environment overrides."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, asdict

from . import chart
from .errors import AdmissibilityError, ConfigError
from .tensors import ModPair, check_weights

ENV_PREFIX = "SCRILAB_"

_GRID_DEFAULTS = dict(n_a=0, n_b=1400, a_min=-3.0, a_max=0.0,
                      b_min=-16.0, b_max=-0.8)
_MULT_DEFAULTS = dict(alpha0=0.0, alphaI=-1.0, c=1.0)


@dataclass
class RunConfig:
    mass: float = 0.0
    gammaC: float = 0.5
    gammaU: float = -0.25
    ell0: float = 0.5
    ellI: float = 0.2
    grid: dict = field(default_factory=lambda: dict(_GRID_DEFAULTS))
    lam: float = 0.0
    profile: str = "conforming"
    epsilon: float = 0.01
    damping: str = "constraint"      # 'constraint' (gammaC) or 'gauge' (-gammaU)
    fit_window: tuple = (1e-8, 1e-6)
    multiplier: dict = field(default_factory=lambda: dict(_MULT_DEFAULTS))
    iterations: int = 8
    probe_a: tuple = (-0.3,)
    seed: int = 0
    deterministic: bool = True
    allow_borderline: bool = False

    def pair(self):
        return ModPair(self.gammaC, self.gammaU,
                       allow_borderline=self.allow_borderline)

    def validate(self):
        try:
            pair = self.pair()
        except AdmissibilityError as exc:
            raise ConfigError(f"gammaC/gammaU: {exc}") from exc
        try:
            check_weights(self.ellI, self.ell0, self.gammaU)
        except AdmissibilityError as exc:
            raise ConfigError(f"ell0/ellI: {exc}") from exc
        g = self.grid
        for key in ("n_b", "b_min", "b_max"):
            if key not in g:
                raise ConfigError(f"grid.{key}: required field missing")
        if g["n_b"] < 16:
            raise ConfigError(f"grid.n_b: need at least 16 slices, got {g['n_b']}")
        if not g["b_min"] < g["b_max"]:
            raise ConfigError(f"grid.b_min/b_max: need b_min < b_max, got "
                              f"{g['b_min']} >= {g['b_max']}")
        xbar = chart.xI_bound(self.mass)
        if math.exp(g["b_max"]) >= xbar ** 2:
            raise ConfigError(
                f"grid.b_max: data slice rho_I = {math.exp(g['b_max']):.4f} outside "
                f"the chart bound x_I^2 < {xbar ** 2:.4f} for mass {self.mass}")
        m = self.multiplier
        if not (m["alphaI"] < min(m["alpha0"], 0.0)):
            raise ConfigError(f"multiplier: need alphaI < min(alpha0, 0), got {m}")
        if not m["c"] > 0.0:
            raise ConfigError(f"multiplier.c: need c > 0, got {m['c']}")
        if not (0 < self.iterations <= 20):
            raise ConfigError(f"iterations: need 1..20, got {self.iterations}")
        if self.damping not in ("constraint", "gauge"):
            raise ConfigError(f"damping: 'constraint' or 'gauge', got {self.damping!r}")
        if len(self.fit_window) != 2 or not (0 < self.fit_window[0] < self.fit_window[1]):
            raise ConfigError(f"fit_window: need 0 < lo < hi, got {self.fit_window}")
        return pair

    def char_grid(self, lam=None, **overrides):
        from .scri_solver import CharGrid
        g = dict(self.grid)
        g.update(overrides)
        return CharGrid(b_min=g["b_min"], b_max=g["b_max"], n_b=int(g["n_b"]),
                        a_min=g.get("a_min", -3.0), a_max=g.get("a_max", 0.0),
                        lam=self.lam if lam is None else lam,
                        n_a=int(g.get("n_a", 0) or 0))

    def gamma(self):
        """Scalar damping strength for the wave model, per the chosen sign."""
        return self.gammaC if self.damping == "constraint" else -self.gammaU

    def as_dict(self):
        return asdict(self)


def _apply_env(data):
    """Environment overrides: SCRILAB_<FIELD> for scalar top-level fields."""
    for key in ("mass", "gammaC", "gammaU", "ell0", "ellI", "lam", "epsilon",
                "iterations", "seed"):
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            data[key] = type(RunConfig.__dataclass_fields__[key].default)(
                float(env) if key != "seed" and key != "iterations" else int(env))
    det = os.environ.get(ENV_PREFIX + "DETERMINISTIC")
    if det is not None:
        data["deterministic"] = det.lower() in ("1", "true", "yes")
    return data


def load_config(path=None, overrides=None, use_env=True):
    data = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    if use_env:
        data = _apply_env(data)
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    merged_grid = dict(_GRID_DEFAULTS)
    merged_grid.update(data.get("grid", {}))
    data["grid"] = merged_grid
    merged_mult = dict(_MULT_DEFAULTS)
    merged_mult.update(data.get("multiplier", {}))
    data["multiplier"] = merged_mult
    if "fit_window" in data:
        data["fit_window"] = tuple(data["fit_window"])
    if "probe_a" in data:
        data["probe_a"] = tuple(data["probe_a"])
    cfg = RunConfig(**data)
    cfg.validate()
    return cfg
