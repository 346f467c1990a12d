import numpy as np
import pytest

import seqchaos as sc


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation before anything that asserts runtimes."""
    for name in ("henon", "logistic", "ikeda"):
        entry = sc.lookup_system(name)
        sc.iterate_map(entry.system, entry.initial_condition, 4)
        sc.largest_lyapunov_map(entry.system, entry.initial_condition, 1000, transient=0)
    for name in ("period_doubling", "rossler", "intermittency"):
        entry = sc.lookup_system(name)
        sc.integrate_rk4(entry.system, entry.initial_condition, 0.01, 4)
        sc.largest_lyapunov_flow(entry.system, entry.initial_condition, 0.01, 1000,
                                 transient=0, renorm_interval=10)


@pytest.fixture(scope="session")
def henon_traj():
    entry = sc.lookup_system("henon")
    return sc.iterate_map(entry.system, entry.initial_condition, 200_000)


@pytest.fixture(scope="session")
def logistic_traj():
    entry = sc.lookup_system("logistic")
    return sc.iterate_map(entry.system, entry.initial_condition, 100_000)
