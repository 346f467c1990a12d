"""Compiled inner loops for the built-in system families.

Every built-in map/flow gets an integer family id so one cached kernel per
driver covers all of them.  The expressions mirror the pure-Python system
definitions in ``dynamics`` token for token: both paths must produce
bit-identical float64 results (no fastmath, no reassociation), which the
test suite asserts.
"""

import math

import numpy as np
from numba import njit

MAP_HENON = 0
MAP_LOGISTIC = 1
MAP_IKEDA = 2

FLOW_PERIOD_DOUBLING = 0
FLOW_ROSSLER = 1
FLOW_INTERMITTENCY = 2


@njit(cache=True)
def _map_step(fid, x, p, out):
    if fid == MAP_HENON:
        out[0] = 1.0 - p[0] * (x[0] * x[0]) + x[1]
        out[1] = p[1] * x[0]
    elif fid == MAP_LOGISTIC:
        out[0] = p[0] * x[0] * (1.0 - x[0])
    else:
        t = p[1] - p[2] / (1.0 + x[0] * x[0] + x[1] * x[1])
        c = math.cos(t)
        s = math.sin(t)
        out[0] = 1.0 + p[0] * (x[0] * c - x[1] * s)
        out[1] = p[0] * (x[0] * s + x[1] * c)


@njit(cache=True)
def _flow_field(fid, x, p, out):
    if fid == FLOW_PERIOD_DOUBLING:
        out[0] = p[0] * (x[1] - x[0])
        out[1] = p[1] * x[0] - x[0] * x[2] - x[1]
        out[2] = x[0] * x[1] - p[2] * x[2]
    elif fid == FLOW_ROSSLER:
        out[0] = -x[1] - x[2]
        out[1] = x[0] + p[0] * x[1]
        out[2] = p[1] + x[0] * x[2] - p[2] * x[2]
    else:
        out[0] = p[0] * (x[1] - x[0])
        out[1] = -x[0] * x[2] + p[1] * x[0] - x[1]
        out[2] = x[0] * x[1] - p[2] * x[2]


@njit(cache=True)
def iterate_map(fid, p, x0, n_steps):
    """Fill (n_steps+1, m) with map iterates; returns (out, first_bad_index)."""
    m = x0.shape[0]
    out = np.empty((n_steps + 1, m))
    for j in range(m):
        out[0, j] = x0[j]
    for i in range(n_steps):
        _map_step(fid, out[i], p, out[i + 1])
        for j in range(m):
            if not math.isfinite(out[i + 1, j]):
                return out, i + 1
    return out, -1


@njit(cache=True)
def _rk4_step(fid, p, x, h, k1, k2, k3, k4, xt, xn):
    m = x.shape[0]
    _flow_field(fid, x, p, k1)
    hh = 0.5 * h
    for j in range(m):
        xt[j] = x[j] + hh * k1[j]
    _flow_field(fid, xt, p, k2)
    for j in range(m):
        xt[j] = x[j] + hh * k2[j]
    _flow_field(fid, xt, p, k3)
    for j in range(m):
        xt[j] = x[j] + h * k3[j]
    _flow_field(fid, xt, p, k4)
    h6 = h / 6.0
    for j in range(m):
        xn[j] = x[j] + h6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


@njit(cache=True)
def integrate_rk4(fid, p, x0, h, n_steps):
    """Classical fixed-step RK4; returns (out, first_bad_index)."""
    m = x0.shape[0]
    out = np.empty((n_steps + 1, m))
    for j in range(m):
        out[0, j] = x0[j]
    k1 = np.empty(m)
    k2 = np.empty(m)
    k3 = np.empty(m)
    k4 = np.empty(m)
    xt = np.empty(m)
    for i in range(n_steps):
        _rk4_step(fid, p, out[i], h, k1, k2, k3, k4, xt, out[i + 1])
        for j in range(m):
            if not math.isfinite(out[i + 1, j]):
                return out, i + 1
    return out, -1


@njit(cache=True)
def lyapunov_map(fid, p, x0, n_steps, transient, offset):
    """Mean log growth of a finite-difference perturbation, renormalized
    every step; returns (exponent, first_bad_index)."""
    m = x0.shape[0]
    x = x0.copy()
    d = np.zeros(m)
    d[0] = offset
    xn = np.empty(m)
    zn = np.empty(m)
    xp = np.empty(m)
    acc = 0.0
    for i in range(transient + n_steps):
        _map_step(fid, x, p, xn)
        for j in range(m):
            xp[j] = x[j] + d[j]
        _map_step(fid, xp, p, zn)
        nd = 0.0
        ok = True
        for j in range(m):
            dj = zn[j] - xn[j]
            d[j] = dj
            nd += dj * dj
            if not math.isfinite(xn[j]):
                ok = False
        nd = math.sqrt(nd)
        if not ok or not math.isfinite(nd):
            return math.nan, i + 1
        if i >= transient:
            if nd > 0.0:
                acc += math.log(nd / offset)
            else:
                acc += -math.inf
        if nd > 0.0:
            s = offset / nd
            for j in range(m):
                d[j] *= s
        for j in range(m):
            x[j] = xn[j]
    return acc / n_steps, -1


@njit(cache=True)
def lyapunov_flow(fid, p, x0, h, n_blocks, transient_blocks, renorm_interval, offset):
    """Two-trajectory growth-rate accumulator over RK4; renormalizes the
    companion trajectory to ``offset`` every ``renorm_interval`` steps.
    Returns (sum of log growth over measured blocks, first_bad_block)."""
    m = x0.shape[0]
    x = x0.copy()
    z = x0.copy()
    z[0] += offset
    k1 = np.empty(m)
    k2 = np.empty(m)
    k3 = np.empty(m)
    k4 = np.empty(m)
    xt = np.empty(m)
    xn = np.empty(m)
    acc = 0.0
    for b in range(transient_blocks + n_blocks):
        for _ in range(renorm_interval):
            _rk4_step(fid, p, x, h, k1, k2, k3, k4, xt, xn)
            for j in range(m):
                x[j] = xn[j]
            _rk4_step(fid, p, z, h, k1, k2, k3, k4, xt, xn)
            for j in range(m):
                z[j] = xn[j]
        nd = 0.0
        ok = True
        for j in range(m):
            dj = z[j] - x[j]
            nd += dj * dj
            if not math.isfinite(x[j]):
                ok = False
        nd = math.sqrt(nd)
        if not ok or not math.isfinite(nd):
            return math.nan, b
        if b >= transient_blocks:
            if nd > 0.0:
                acc += math.log(nd / offset)
            else:
                acc += -math.inf
        if nd > 0.0:
            s = offset / nd
            for j in range(m):
                z[j] = x[j] + (z[j] - x[j]) * s
    return acc, -1
