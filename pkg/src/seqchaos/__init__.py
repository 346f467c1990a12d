"""Sequential test for chaos.

Numerical construction of a convergence sequence (return times t_n with
``||x(t_n) - x(0)|| < 1/n``) and a separation sequence (times s_n with
``||x(t_n + s_n) - x(s_n)|| > eps0``) for trajectories of discrete maps and
continuous flows, plus the shift-distance analyses built on them and a
largest-Lyapunov-exponent estimator for comparison.  Everything is
deterministic: identical inputs give bit-identical outputs.
"""

__version__ = "0.1.0"

from .core import (
    DEFAULT_SAMPLE_CAP,
    ConvergenceEntry,
    DivergenceError,
    SeparationEntry,
    SequentialTestOutcome,
    TestConfig,
    TestStatus,
    TrajectoryGrid,
    distance,
    format_float,
)
from .dynamics import (
    ContinuousSystem,
    DiscreteMapSystem,
    REGISTRY_NAMES,
    RegistryEntry,
    integrate_rk4,
    iterate_map,
    load_system_file,
    lookup_system,
    make_system,
    registry_to_dicts,
    system_from_dict,
)
from .lyapunov import LyapunovEstimate, largest_lyapunov_flow, largest_lyapunov_map
from .seqtest import (
    ClosenessReport,
    CrossSeparationMatrix,
    ShiftDistanceSeries,
    closeness_intervals,
    convergence_sequence,
    coordinate_distance_series,
    cross_separation_matrix,
    dominant_coordinate,
    exceedances,
    run_sequential_test,
    separation_sequence,
    shift_distance_series,
)

__all__ = [
    "__version__",
    "DEFAULT_SAMPLE_CAP",
    "ConvergenceEntry",
    "DivergenceError",
    "SeparationEntry",
    "SequentialTestOutcome",
    "TestConfig",
    "TestStatus",
    "TrajectoryGrid",
    "distance",
    "format_float",
    "ContinuousSystem",
    "DiscreteMapSystem",
    "REGISTRY_NAMES",
    "RegistryEntry",
    "integrate_rk4",
    "iterate_map",
    "load_system_file",
    "lookup_system",
    "make_system",
    "registry_to_dicts",
    "system_from_dict",
    "LyapunovEstimate",
    "largest_lyapunov_flow",
    "largest_lyapunov_map",
    "ClosenessReport",
    "CrossSeparationMatrix",
    "ShiftDistanceSeries",
    "closeness_intervals",
    "convergence_sequence",
    "coordinate_distance_series",
    "cross_separation_matrix",
    "dominant_coordinate",
    "exceedances",
    "run_sequential_test",
    "separation_sequence",
    "shift_distance_series",
]
