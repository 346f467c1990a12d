"""Shared domain types: state vectors, sampled trajectories, test configuration.

State vectors are plain float64 numpy arrays of dimension 1..3 (the library
itself is dimension-generic).  A trajectory is an immutable uniformly sampled
grid: sample ``m`` sits at time ``t0 + m*h``; discrete maps use ``h = 1`` so
times coincide with iteration indices.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_SAMPLE_CAP",
    "DivergenceError",
    "TrajectoryGrid",
    "TestConfig",
    "ConvergenceEntry",
    "SeparationEntry",
    "TestStatus",
    "SequentialTestOutcome",
    "distance",
    "format_float",
]

# Trajectories are held fully in memory (the search algorithms need random
# access at two offsets at once); runs that would exceed this fail fast.
DEFAULT_SAMPLE_CAP = 20_000_000

_BINARY_HEADER = struct.Struct("<IQdd")  # dimension, n_samples, h, t0


class DivergenceError(RuntimeError):
    """A trajectory or tangent computation produced a non-finite value."""

    def __init__(self, index: int, what: str = "trajectory"):
        self.index = int(index)
        super().__init__(f"{what} became non-finite at grid index {self.index}")


def format_float(v: float) -> str:
    """Shortest round-trip decimal representation (<= 17 significant digits)."""
    return repr(float(v))


def distance(a, b) -> float:
    """Euclidean distance between two state vectors of equal dimension.

    Uses the plain sum-of-squares form so scalar results are bit-identical
    to the vectorized distance series computed elsewhere in the package.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sqrt((d * d).sum()))


@dataclass(frozen=True)
class TrajectoryGrid:
    """Uniformly sampled trajectory: ``samples[m]`` is the state at ``t0 + m*h``."""

    samples: np.ndarray  # shape (n_samples, dimension), float64, read-only
    h: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim == 1:
            s = s.reshape(-1, 1)
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
            raise ValueError("samples must be a non-empty (n, dimension) array")
        if not float(self.h) > 0.0:
            raise ValueError("grid spacing h must be positive")
        if not np.isfinite(s).all():
            bad = int(np.nonzero(~np.isfinite(s).all(axis=1))[0][0])
            raise ValueError(f"non-finite sample at grid index {bad}")
        if s.flags.writeable:
            s = s.copy()
            s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "t0", float(self.t0))

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def dimension(self) -> int:
        return self.samples.shape[1]

    def sample_at(self, index: int) -> np.ndarray:
        """The stored sample at a grid index; out-of-range indices raise."""
        index = int(index)
        if not 0 <= index < self.n_samples:
            raise IndexError(
                f"grid index {index} out of range [0, {self.n_samples})"
            )
        return self.samples[index]

    def time_at(self, index: int) -> float:
        return self.t0 + index * self.h

    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.n_samples)

    def prefix(self, n_samples: int) -> "TrajectoryGrid":
        """View of the first ``n_samples`` samples (no copy)."""
        n_samples = int(n_samples)
        if not 1 <= n_samples <= self.n_samples:
            raise ValueError(f"prefix length {n_samples} out of range")
        if n_samples == self.n_samples:
            return self
        return TrajectoryGrid(self.samples[:n_samples], h=self.h, t0=self.t0)

    # -- serialization --------------------------------------------------

    def save(self, path) -> None:
        """Binary layout: little-endian header (dim u32, n u64, h f64, t0 f64)
        followed by row-major float64 samples."""
        with open(path, "wb") as f:
            f.write(_BINARY_HEADER.pack(self.dimension, self.n_samples, self.h, self.t0))
            f.write(np.ascontiguousarray(self.samples, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "TrajectoryGrid":
        with open(path, "rb") as f:
            raw = f.read(_BINARY_HEADER.size)
            if len(raw) != _BINARY_HEADER.size:
                raise ValueError("truncated trajectory file: short header")
            dim, n, h, t0 = _BINARY_HEADER.unpack(raw)
            body = f.read(8 * dim * n)
        if len(body) != 8 * dim * n:
            raise ValueError("truncated trajectory file: short sample block")
        samples = np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(n, dim)
        return cls(samples, h=h, t0=t0)

    def write_csv(self, path) -> None:
        """One row per sample: time, x1..xm, shortest round-trip decimals."""
        cols = ",".join(f"x{j + 1}" for j in range(self.dimension))
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(f"time,{cols}\n")
            for i in range(self.n_samples):
                t = format_float(self.time_at(i))
                row = ",".join(format_float(v) for v in self.samples[i])
                f.write(f"{t},{row}\n")


@dataclass(frozen=True)
class TestConfig:
    """Everything the sequential-test searches consume."""

    eps0: float          # separation threshold, same units as the state norm
    t_fix: float = 0.0   # lower time cutoff for the convergence search
    horizon: int = 0     # grid steps available to the searches
    k_max: int = 1       # number of threshold indices to attempt

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if self.t_fix < 0:
            raise ValueError("t_fix must be non-negative")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1 grid step")
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")


@dataclass(frozen=True)
class ConvergenceEntry:
    """Return entry: first admissible grid point with ||x(value) - x(0)|| < 1/n."""

    n: int        # threshold index
    index: int    # grid index
    value: float  # grid time (== index for discrete systems)
    delta: float  # ||x(value) - x(0)||

    def __post_init__(self):
        if not self.delta < 1.0 / self.n:
            raise ValueError(
                f"convergence entry n={self.n}: delta {self.delta} not below 1/{self.n}"
            )


@dataclass(frozen=True)
class SeparationEntry:
    """Separation entry: first admissible s with ||x(t_n + s) - x(s)|| > eps0."""

    n: int
    index: int
    value: float
    distance: float


@dataclass(frozen=True)
class TestStatus:
    """Outcome kind plus the threshold index it refers to.

    ``confirmed(k)`` means both sequences reached k entries; the truncation
    statuses carry the first threshold index for which no qualifying grid
    point exists.
    """

    kind: str
    index: int

    CONFIRMED = "confirmed"
    TRUNCATED_AT_CONVERGENCE = "truncated_at_convergence"
    TRUNCATED_AT_SEPARATION = "truncated_at_separation"

    @classmethod
    def confirmed(cls, k: int) -> "TestStatus":
        return cls(cls.CONFIRMED, k)

    @classmethod
    def truncated_at_convergence(cls, n: int) -> "TestStatus":
        return cls(cls.TRUNCATED_AT_CONVERGENCE, n)

    @classmethod
    def truncated_at_separation(cls, n: int) -> "TestStatus":
        return cls(cls.TRUNCATED_AT_SEPARATION, n)

    @property
    def is_confirmed(self) -> bool:
        return self.kind == self.CONFIRMED

    def __str__(self) -> str:
        camel = {
            self.CONFIRMED: "Confirmed",
            self.TRUNCATED_AT_CONVERGENCE: "TruncatedAtConvergence",
            self.TRUNCATED_AT_SEPARATION: "TruncatedAtSeparation",
        }[self.kind]
        return f"{camel}({self.index})"


@dataclass(frozen=True)
class SequentialTestOutcome:
    """Paired convergence/separation sequences plus the resulting status.

    Both value sequences are strictly increasing and the separation list is
    an aligned prefix of the convergence list; violations raise at
    construction time.
    """

    config: TestConfig
    convergence: tuple = field(default_factory=tuple)
    separation: tuple = field(default_factory=tuple)
    status: TestStatus = None

    def __post_init__(self):
        conv = tuple(self.convergence)
        sep = tuple(self.separation)
        object.__setattr__(self, "convergence", conv)
        object.__setattr__(self, "separation", sep)
        if len(sep) > len(conv):
            raise ValueError("separation list longer than convergence list")
        for a, b in zip(conv, conv[1:]):
            if not b.value > a.value:
                raise ValueError("convergence values must strictly increase")
        for a, b in zip(sep, sep[1:]):
            if not b.value > a.value:
                raise ValueError("separation values must strictly increase")
        for c, s in zip(conv, sep):
            if c.n != s.n:
                raise ValueError("misaligned convergence/separation indices")
            if not s.distance > self.config.eps0:
                raise ValueError(
                    f"separation entry n={s.n}: distance {s.distance} not above eps0"
                )

    def pairs(self):
        """Aligned (convergence, separation) entry pairs."""
        return list(zip(self.convergence, self.separation))

    @property
    def k_reached(self) -> int:
        return len(self.separation)
