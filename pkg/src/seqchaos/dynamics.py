"""Built-in dynamical systems, map iteration, and fixed-step RK4 integration.

Six systems ship with exact literature constants: the henon, logistic and
ikeda maps, and the period_doubling, rossler and intermittency flows.  Update
rules are encoded with fixed expression shapes so double-precision results
are reproducible bit for bit across runs and across the compiled/pure-Python
paths.  User systems are either scalar-parameter variants of the built-in
families (loadable from JSON) or arbitrary callables supplied in code.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .core import DEFAULT_SAMPLE_CAP, DivergenceError, TrajectoryGrid

__all__ = [
    "DiscreteMapSystem",
    "ContinuousSystem",
    "RegistryEntry",
    "REGISTRY_NAMES",
    "iterate_map",
    "integrate_rk4",
    "lookup_system",
    "make_system",
    "system_from_dict",
    "load_system_file",
    "registry_to_dicts",
]


@dataclass(frozen=True)
class DiscreteMapSystem:
    """Autonomous map x(i+1) = f(x(i)); ``update`` must preserve dimension."""

    name: str
    dimension: int
    parameters: dict
    update: Callable[[np.ndarray], np.ndarray]
    family: Optional[str] = None

    @property
    def kind(self) -> str:
        return "map"


@dataclass(frozen=True)
class ContinuousSystem:
    """Autonomous flow x'(t) = f(x(t)); ``vector_field`` is time-independent."""

    name: str
    dimension: int
    parameters: dict
    vector_field: Callable[[np.ndarray], np.ndarray]
    family: Optional[str] = None

    @property
    def kind(self) -> str:
        return "flow"


@dataclass(frozen=True)
class RegistryEntry:
    """A system together with its reference initial condition and the
    separation threshold / time cutoff used for its standard run."""

    system: object
    initial_condition: np.ndarray
    eps0: Optional[float]
    t_fix: float = 0.0

    def __post_init__(self):
        ic = np.asarray(self.initial_condition, dtype=np.float64).reshape(-1)
        if ic.shape[0] != self.system.dimension:
            raise ValueError(
                f"initial condition has dimension {ic.shape[0]}, "
                f"system {self.system.name!r} expects {self.system.dimension}"
            )
        ic.setflags(write=False)
        object.__setattr__(self, "initial_condition", ic)


# -- family definitions -------------------------------------------------
#
# Expression shapes are load-bearing: e.g. the henon x-update must be
# 1 - a*(x*x) + y (square first, then scale) for results to agree with
# conventional left-to-right scalar evaluation of 1 - a*x^2 + y.

def _henon_update(a, b):
    def update(v):
        x = v[0]
        y = v[1]
        return np.array([1.0 - a * (x * x) + y, b * x])
    return update


def _logistic_update(r):
    def update(v):
        x = v[0]
        return np.array([r * x * (1.0 - x)])
    return update


def _ikeda_update(u, a, b):
    def update(v):
        x = v[0]
        y = v[1]
        t = a - b / (1.0 + x * x + y * y)
        c = math.cos(t)
        s = math.sin(t)
        return np.array([1.0 + u * (x * c - y * s), u * (x * s + y * c)])
    return update


def _period_doubling_field(sigma, rho, beta):
    def field(v):
        x1, x2, x3 = v[0], v[1], v[2]
        return np.array([sigma * (x2 - x1), rho * x1 - x1 * x3 - x2, x1 * x2 - beta * x3])
    return field


def _rossler_field(a, b, c):
    def field(v):
        x1, x2, x3 = v[0], v[1], v[2]
        return np.array([-x2 - x3, x1 + a * x2, b + x1 * x3 - c * x3])
    return field


def _intermittency_field(sigma, rho, beta):
    def field(v):
        x1, x2, x3 = v[0], v[1], v[2]
        return np.array([sigma * (x2 - x1), -x1 * x3 + rho * x1 - x2, x1 * x2 - beta * x3])
    return field


@dataclass(frozen=True)
class _Family:
    kind: str
    dimension: int
    param_names: tuple
    fid: int
    builder: Callable


_FAMILIES = {
    "henon": _Family("map", 2, ("a", "b"), _kernels.MAP_HENON, _henon_update),
    "logistic": _Family("map", 1, ("r",), _kernels.MAP_LOGISTIC, _logistic_update),
    "ikeda": _Family("map", 2, ("u", "a", "b"), _kernels.MAP_IKEDA, _ikeda_update),
    "period_doubling": _Family(
        "flow", 3, ("sigma", "rho", "beta"), _kernels.FLOW_PERIOD_DOUBLING, _period_doubling_field
    ),
    "rossler": _Family("flow", 3, ("a", "b", "c"), _kernels.FLOW_ROSSLER, _rossler_field),
    "intermittency": _Family(
        "flow", 3, ("sigma", "rho", "beta"), _kernels.FLOW_INTERMITTENCY, _intermittency_field
    ),
}


def make_system(family: str, parameters: dict, name: Optional[str] = None):
    """Instantiate a built-in family with the given scalar parameters."""
    if family not in _FAMILIES:
        raise ValueError(
            f"unknown system family {family!r}; valid families: {', '.join(sorted(_FAMILIES))}"
        )
    fam = _FAMILIES[family]
    if set(parameters) != set(fam.param_names):
        raise ValueError(
            f"family {family!r} expects parameters {fam.param_names}, got {tuple(sorted(parameters))}"
        )
    params = {k: float(parameters[k]) for k in fam.param_names}
    fn = fam.builder(*(params[k] for k in fam.param_names))
    cls = DiscreteMapSystem if fam.kind == "map" else ContinuousSystem
    kwargs = {"update": fn} if fam.kind == "map" else {"vector_field": fn}
    return cls(name=name or family, dimension=fam.dimension, parameters=params,
               family=family, **kwargs)


_REGISTRY = {
    "henon": RegistryEntry(
        make_system("henon", {"a": 1.4, "b": 0.3}),
        [-0.27518575309954679, -0.32515652033839654],
        eps0=2.1, t_fix=0.0,
    ),
    "logistic": RegistryEntry(
        make_system("logistic", {"r": 3.9}),
        [0.5],
        eps0=0.7, t_fix=0.0,
    ),
    "period_doubling": RegistryEntry(
        make_system("period_doubling", {"sigma": 10.0, "rho": 99.51, "beta": 8.0 / 3.0}),
        [23.319088231571342, -15.11725273004282, 130.76383915267931],
        eps0=45.0, t_fix=631.36,
    ),
    "rossler": RegistryEntry(
        make_system("rossler", {"a": 0.2, "b": 0.2, "c": 5.7}),
        [-7.9208550704681606, -0.32213157410506699, 0.01470711076246217],
        eps0=22.0, t_fix=35.0,
    ),
    "ikeda": RegistryEntry(
        make_system("ikeda", {"u": 0.9, "a": 0.4, "b": 6.0}),
        [0.0, 0.0],
        eps0=2.0, t_fix=0.0,
    ),
    "intermittency": RegistryEntry(
        make_system("intermittency", {"sigma": 10.0, "rho": 166.29, "beta": 8.0 / 3.0}),
        [-6.9027101537827207, 6.1214285868616205, 146.73481404307805],
        eps0=200.0, t_fix=11.64,
    ),
}

REGISTRY_NAMES = tuple(_REGISTRY)


def lookup_system(name: str) -> RegistryEntry:
    """Registry entry for one of the built-in system names."""
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown system {name!r}; valid names: {', '.join(REGISTRY_NAMES)}"
        ) from None


def _check_budget(n_steps: int, max_samples: int) -> None:
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    if n_steps + 1 > max_samples:
        raise ValueError(
            f"run of {n_steps + 1} samples exceeds the in-memory cap of "
            f"{max_samples}; raise max_samples explicitly if you mean it"
        )


def _param_array(system) -> np.ndarray:
    fam = _FAMILIES[system.family]
    return np.array([system.parameters[k] for k in fam.param_names], dtype=np.float64)


def _as_state(x0, dimension: int) -> np.ndarray:
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    if x0.shape[0] != dimension:
        raise ValueError(f"initial state has dimension {x0.shape[0]}, expected {dimension}")
    return x0


def iterate_map(system: DiscreteMapSystem, x0, n_steps: int,
                max_samples: int = DEFAULT_SAMPLE_CAP) -> TrajectoryGrid:
    """Iterate a map: samples[i] = f^i(x0), grid spacing 1, start time 0."""
    n_steps = int(n_steps)
    _check_budget(n_steps, max_samples)
    x0 = _as_state(x0, system.dimension)
    if system.family in _FAMILIES:
        out, bad = _kernels.iterate_map(_FAMILIES[system.family].fid,
                                        _param_array(system), x0, n_steps)
    else:
        out = np.empty((n_steps + 1, system.dimension))
        out[0] = x0
        bad = -1
        x = x0
        for i in range(n_steps):
            x = np.asarray(system.update(x), dtype=np.float64).reshape(-1)
            if x.shape[0] != system.dimension:
                raise ValueError(f"update of {system.name!r} changed dimension")
            out[i + 1] = x
            if not np.isfinite(x).all():
                bad = i + 1
                break
    if bad >= 0:
        raise DivergenceError(bad, what=f"map {system.name!r}")
    out.setflags(write=False)
    return TrajectoryGrid(out, h=1.0, t0=0.0)


def integrate_rk4(system: ContinuousSystem, x0, h: float, n_steps: int,
                  max_samples: int = DEFAULT_SAMPLE_CAP) -> TrajectoryGrid:
    """Classical 4th-order Runge-Kutta with fixed step h, sampled every step."""
    n_steps = int(n_steps)
    _check_budget(n_steps, max_samples)
    h = float(h)
    if not h > 0:
        raise ValueError("step size h must be positive")
    x0 = _as_state(x0, system.dimension)
    if system.family in _FAMILIES:
        out, bad = _kernels.integrate_rk4(_FAMILIES[system.family].fid,
                                          _param_array(system), x0, h, n_steps)
    else:
        f = system.vector_field
        out = np.empty((n_steps + 1, system.dimension))
        out[0] = x0
        bad = -1
        x = x0
        for i in range(n_steps):
            k1 = np.asarray(f(x), dtype=np.float64)
            k2 = np.asarray(f(x + (0.5 * h) * k1), dtype=np.float64)
            k3 = np.asarray(f(x + (0.5 * h) * k2), dtype=np.float64)
            k4 = np.asarray(f(x + h * k3), dtype=np.float64)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out[i + 1] = x
            if not np.isfinite(x).all():
                bad = i + 1
                break
    if bad >= 0:
        raise DivergenceError(bad, what=f"flow {system.name!r}")
    out.setflags(write=False)
    return TrajectoryGrid(out, h=h, t0=0.0)


# -- JSON system definitions --------------------------------------------

def system_from_dict(d: dict) -> RegistryEntry:
    """Build a registry-style entry from a JSON system definition.

    Schema: {"family": str, "parameters": {…}, "initial_condition": […]}
    with optional "name", "eps0" and "t_fix".
    """
    if not isinstance(d, dict):
        raise ValueError("system definition must be a JSON object")
    missing = {"family", "parameters", "initial_condition"} - set(d)
    if missing:
        raise ValueError(f"system definition missing keys: {', '.join(sorted(missing))}")
    system = make_system(d["family"], d["parameters"], name=d.get("name"))
    eps0 = d.get("eps0")
    return RegistryEntry(
        system,
        d["initial_condition"],
        eps0=None if eps0 is None else float(eps0),
        t_fix=float(d.get("t_fix", 0.0)),
    )


def load_system_file(path) -> RegistryEntry:
    with open(path, "r", encoding="utf-8") as f:
        try:
            d = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"invalid system file {path}: {e}") from None
    return system_from_dict(d)


def registry_to_dicts() -> list:
    """JSON-compatible dump of the registry; entries reload via system_from_dict."""
    out = []
    for name, entry in _REGISTRY.items():
        sys_ = entry.system
        out.append({
            "name": name,
            "family": sys_.family,
            "kind": sys_.kind,
            "dimension": sys_.dimension,
            "parameters": dict(sys_.parameters),
            "initial_condition": [float(v) for v in entry.initial_condition],
            "eps0": entry.eps0,
            "t_fix": entry.t_fix,
        })
    return out
