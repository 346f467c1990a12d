"""Largest-Lyapunov-exponent estimation for maps and flows.

Two-trajectory finite-difference propagation with renormalization: a
companion state offset by 1e-8 is advanced alongside the orbit and rescaled
back to the offset magnitude (every step for maps, every
``renorm_interval`` steps for flows).  The exponent is the mean log growth
per iteration (maps) or per time unit (flows).  Finite differences keep the
estimator generic over user-supplied systems; no Jacobians required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import DivergenceError
from .dynamics import ContinuousSystem, DiscreteMapSystem, _FAMILIES, _as_state, _param_array

__all__ = ["LyapunovEstimate", "largest_lyapunov_map", "largest_lyapunov_flow",
           "DEFAULT_OFFSET"]

DEFAULT_OFFSET = 1e-8


@dataclass(frozen=True)
class LyapunovEstimate:
    exponent: float          # nats per iteration (maps) or per time unit (flows)
    n_steps: int             # steps actually measured
    transient_skipped: int
    renorm_interval: int

    def __post_init__(self):
        if self.n_steps <= 0:
            raise ValueError("n_steps must be positive")
        if self.renorm_interval < 1:
            raise ValueError("renorm_interval must be at least 1")


def largest_lyapunov_map(system: DiscreteMapSystem, x0, n_steps: int,
                         transient: int = 1000,
                         offset: float = DEFAULT_OFFSET) -> LyapunovEstimate:
    """Largest Lyapunov exponent of a map orbit, renormalizing every step."""
    n_steps = int(n_steps)
    transient = int(transient)
    if n_steps < 1000:
        raise ValueError("n_steps must be at least 1000 for a meaningful average")
    if transient < 0:
        raise ValueError("transient must be non-negative")
    offset = float(offset)
    if not offset > 0:
        raise ValueError("offset must be positive")
    x0 = _as_state(x0, system.dimension)

    if system.family in _FAMILIES:
        exponent, bad = _kernels.lyapunov_map(
            _FAMILIES[system.family].fid, _param_array(system), x0,
            n_steps, transient, offset)
    else:
        exponent, bad = _lyapunov_map_py(system, x0, n_steps, transient, offset)
    if bad >= 0:
        raise DivergenceError(bad, what=f"orbit of {system.name!r}")
    return LyapunovEstimate(exponent=float(exponent), n_steps=n_steps,
                            transient_skipped=transient, renorm_interval=1)


def _lyapunov_map_py(system, x0, n_steps, transient, offset):
    x = x0.copy()
    d = np.zeros_like(x)
    d[0] = offset
    acc = 0.0
    update = system.update
    for i in range(transient + n_steps):
        xn = np.asarray(update(x), dtype=np.float64)
        zn = np.asarray(update(x + d), dtype=np.float64)
        d = zn - xn
        nd = float(np.sqrt((d * d).sum()))
        if not (np.isfinite(xn).all() and math.isfinite(nd)):
            return math.nan, i + 1
        if i >= transient:
            acc += math.log(nd / offset) if nd > 0.0 else -math.inf
        if nd > 0.0:
            d = d * (offset / nd)
        x = xn
    return acc / n_steps, -1


def largest_lyapunov_flow(system: ContinuousSystem, x0, h: float, n_steps: int,
                          transient: int = 10000, renorm_interval: int = 10,
                          offset: float = DEFAULT_OFFSET) -> LyapunovEstimate:
    """Largest Lyapunov exponent of a flow via RK4 twin trajectories.

    ``renorm_interval * h`` should stay well below the inverse of the
    expected exponent so growth between renormalizations remains linear.
    """
    n_steps = int(n_steps)
    transient = int(transient)
    renorm_interval = int(renorm_interval)
    h = float(h)
    if n_steps < 1000:
        raise ValueError("n_steps must be at least 1000 for a meaningful average")
    if transient < 0:
        raise ValueError("transient must be non-negative")
    if renorm_interval < 1:
        raise ValueError("renorm_interval must be at least 1")
    if not h > 0:
        raise ValueError("step size h must be positive")
    offset = float(offset)
    if not offset > 0:
        raise ValueError("offset must be positive")
    x0 = _as_state(x0, system.dimension)

    n_blocks = n_steps // renorm_interval
    if n_blocks < 1:
        raise ValueError("n_steps smaller than one renormalization interval")
    transient_blocks = -(-transient // renorm_interval)

    if system.family in _FAMILIES:
        acc, bad = _kernels.lyapunov_flow(
            _FAMILIES[system.family].fid, _param_array(system), x0, h,
            n_blocks, transient_blocks, renorm_interval, offset)
    else:
        acc, bad = _lyapunov_flow_py(system, x0, h, n_blocks, transient_blocks,
                                     renorm_interval, offset)
    if bad >= 0:
        raise DivergenceError(bad * renorm_interval, what=f"orbit of {system.name!r}")
    measured = n_blocks * renorm_interval
    return LyapunovEstimate(exponent=float(acc) / (measured * h), n_steps=measured,
                            transient_skipped=transient_blocks * renorm_interval,
                            renorm_interval=renorm_interval)


def _rk4_step_py(f, x, h):
    k1 = np.asarray(f(x), dtype=np.float64)
    k2 = np.asarray(f(x + (0.5 * h) * k1), dtype=np.float64)
    k3 = np.asarray(f(x + (0.5 * h) * k2), dtype=np.float64)
    k4 = np.asarray(f(x + h * k3), dtype=np.float64)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _lyapunov_flow_py(system, x0, h, n_blocks, transient_blocks, renorm_interval, offset):
    f = system.vector_field
    x = x0.copy()
    z = x0.copy()
    z[0] += offset
    acc = 0.0
    for b in range(transient_blocks + n_blocks):
        for _ in range(renorm_interval):
            x = _rk4_step_py(f, x, h)
            z = _rk4_step_py(f, z, h)
        delta = z - x
        nd = float(np.sqrt((delta * delta).sum()))
        if not (np.isfinite(x).all() and math.isfinite(nd)):
            return math.nan, b
        if b >= transient_blocks:
            acc += math.log(nd / offset) if nd > 0.0 else -math.inf
        if nd > 0.0:
            z = x + delta * (offset / nd)
    return acc, -1
