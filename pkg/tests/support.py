"""Shared test helpers: brute-force search oracle and synthetic trajectories.

The oracle re-implements the two greedy scans as literal per-element loops
with scalar arithmetic.  It is deliberately independent of the vectorized
chunked scans in seqchaos.seqtest; equality between the two on arbitrary
trajectories is the primary correctness check for the searches.
"""

import math

import numpy as np

from seqchaos import TrajectoryGrid


def oracle_distance(a, b):
    acc = 0.0
    for u, v in zip(a, b):
        d = float(u) - float(v)
        acc = acc + d * d
    return math.sqrt(acc)


def oracle_sequences(traj, t_fix, eps0, k_max):
    """Literal first-qualifying-point scans.

    Convergence candidates start at grid index 2, separation candidates at
    index 1; the monotonic lower bounds l and q persist across n.  Returns
    ([(index, value, delta)...], [(index, value, distance)...]).
    """
    s = traj.samples
    n_samples = traj.n_samples
    h, t0 = traj.h, traj.t0

    conv = []
    lower = float(t_fix)
    for n in range(1, k_max + 1):
        hit = None
        for m in range(2, n_samples):
            val = t0 + m * h
            if oracle_distance(s[m], s[0]) < 1.0 / n and lower < val:
                hit = (m, val, oracle_distance(s[m], s[0]))
                break
        if hit is None:
            break
        lower = hit[1]
        conv.append(hit)

    sep = []
    q = 0.0
    for (shift, _, _) in conv:
        hit = None
        for i in range(1, n_samples - shift):
            val = t0 + i * h
            d = oracle_distance(s[shift + i], s[i])
            if d > eps0 and q < val:
                hit = (i, val, d)
                break
        if hit is None:
            break
        q = hit[1]
        sep.append(hit)

    return conv, sep


def random_trajectory(rng, max_samples=10_000):
    """Bounded synthetic trajectory that recurs near its start point."""
    n = int(rng.integers(50, max_samples + 1))
    dim = int(rng.integers(1, 4))
    t = np.arange(n)[:, None]
    freq = rng.uniform(0.01, 0.5, size=dim)
    phase = rng.uniform(0, 2 * np.pi, size=dim)
    amp = rng.uniform(0.5, 3.0, size=dim)
    base = amp * np.sin(freq * t + phase)
    noise = rng.normal(0.0, rng.uniform(0.01, 0.3), size=(n, dim))
    h = float(rng.choice([1.0, 0.01, 0.1]))
    return TrajectoryGrid(base + noise, h=h, t0=0.0)


def assert_matches_oracle(traj, t_fix, eps0, k_max, convergence, separation):
    """Exact index/value agreement between library output and the oracle."""
    oc, os_ = oracle_sequences(traj, t_fix, eps0, k_max)
    assert [e.index for e in convergence] == [m for m, _, _ in oc]
    assert [e.index for e in separation] == [i for i, _, _ in os_]
    for e, (_, _, delta) in zip(convergence, oc):
        assert e.delta == delta
    for e, (_, _, d) in zip(separation, os_):
        assert e.distance == d
