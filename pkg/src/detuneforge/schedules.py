"""Control waveform construction.

All schedules drive the qubit through H(t) = wx(t) sx/2 + wy(t) sy/2 with the
field strength bound sqrt(wx^2 + wy^2) <= 1 and time measured in units of the
maximum Rabi rate, so every waveform here is dimensionless.

Three families are provided:

* the direct pulse: one constant full-strength segment of duration theta_f,
* the short-CORPSE sequence: three full-strength coaxial segments with
  alternating sense and durations (theta1, theta2, theta1),
* the pulse-area-optimal waveform: the smooth coaxial control
  wx(t) = dn((t - T/2)/2, k) obtained from a solved pendulum parameter k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, NamedTuple, Union

import numpy as np

from .elliptic import jacobi_sn_cn_dn

if TYPE_CHECKING:
    from .solver import PendulumSolution

__all__ = [
    "Segment",
    "PiecewiseSchedule",
    "SampledSchedule",
    "Schedule",
    "ShortCorpseParams",
    "DEFAULT_SAMPLES",
    "direct_schedule",
    "short_corpse",
    "pa_optimal_schedule",
    "rotate_axis",
]

FIELD_BOUND_TOL = 1e-12

# Uniform sample count for synthesized smooth waveforms.  Odd on purpose: the
# grid then contains t = T/2 where the speed attains its maximum 1, and the
# integrators can consume sample pairs without interpolating.
DEFAULT_SAMPLES = 4097


class Segment(NamedTuple):
    """One piecewise-constant segment of a control schedule."""

    duration: float
    omega_x: float
    omega_y: float


@dataclass(frozen=True)
class PiecewiseSchedule:
    """Piecewise-constant control waveform.

    ``phi_f`` records the azimuth of the target-gate axis so downstream code
    can reconstruct the intended gate without re-deriving it from the fields.
    """

    segments: tuple[Segment, ...]
    phi_f: float = 0.0

    def __post_init__(self):
        segs = tuple(Segment(*s) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        for i, s in enumerate(segs):
            if s.duration <= 0.0:
                raise ValueError(f"segment {i} has nonpositive duration {s.duration!r}")
            if s.omega_x**2 + s.omega_y**2 > 1.0 + FIELD_BOUND_TOL:
                raise ValueError(f"segment {i} exceeds the unit field bound")

    @property
    def duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    def to_csv(self, path) -> None:
        """Write columns index, duration, omega_x, omega_y."""
        with open(path, "w", newline="") as fh:
            fh.write("index,duration,omega_x,omega_y\n")
            for i, s in enumerate(self.segments):
                fh.write(f"{i},{s.duration:.12g},{s.omega_x:.12g},{s.omega_y:.12g}\n")


@dataclass(frozen=True)
class SampledSchedule:
    """Control waveform sampled on the uniform grid t_i = i T / (n - 1)."""

    T: float
    samples: np.ndarray  # shape (n, 2), columns (omega_x, omega_y)

    def __post_init__(self):
        arr = np.array(self.samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise ValueError("samples must have shape (n >= 2, 2)")
        if self.T < 0.0:
            raise ValueError("duration must be nonnegative")
        if np.any(np.einsum("ij,ij->i", arr, arr) > 1.0 + FIELD_BOUND_TOL):
            raise ValueError("a sample exceeds the unit field bound")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return self.T

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n)

    def to_csv(self, path) -> None:
        """Write columns t, omega_x, omega_y."""
        t = self.times()
        with open(path, "w", newline="") as fh:
            fh.write("t,omega_x,omega_y\n")
            for ti, (wx, wy) in zip(t, self.samples):
                fh.write(f"{ti:.12g},{wx:.12g},{wy:.12g}\n")


Schedule = Union[PiecewiseSchedule, SampledSchedule]


@dataclass(frozen=True)
class ShortCorpseParams:
    """Angles parametrizing the short-CORPSE sequence for a target theta_f.

    kappa = arcsin(sin(theta_f/2)/2), theta1 = pi - kappa - theta_f/2 and
    theta2 = 2 pi - 2 kappa; the segment durations are (theta1, theta2,
    theta1) with rotation sense (-, +, -).
    """

    theta_f: float
    kappa: float
    theta1: float
    theta2: float

    @property
    def total_time(self) -> float:
        return 2.0 * self.theta1 + self.theta2


def _check_theta_f(theta_f: float) -> None:
    if not 0.0 <= theta_f <= 2.0 * math.pi:
        raise ValueError(f"theta_f = {theta_f!r} outside [0, 2 pi]")


def direct_schedule(theta_f: float, phi_f: float = 0.0) -> PiecewiseSchedule:
    """Single constant full-strength segment of duration theta_f.

    theta_f = 0 yields the empty schedule, which propagates to the identity.
    """
    _check_theta_f(theta_f)
    if theta_f == 0.0:
        return PiecewiseSchedule((), phi_f=phi_f)
    seg = Segment(theta_f, math.cos(phi_f), math.sin(phi_f))
    return PiecewiseSchedule((seg,), phi_f=phi_f)


def short_corpse_params(theta_f: float) -> ShortCorpseParams:
    """Sequence angles for a target rotation angle theta_f."""
    _check_theta_f(theta_f)
    kappa = math.asin(0.5 * math.sin(0.5 * theta_f))
    theta1 = math.pi - kappa - 0.5 * theta_f
    theta2 = 2.0 * math.pi - 2.0 * kappa
    return ShortCorpseParams(theta_f, kappa, theta1, theta2)


def short_corpse(
    theta_f: float, phi_f: float = 0.0, use_complement: bool = False
) -> tuple[PiecewiseSchedule, ShortCorpseParams]:
    """Three-segment detuning-robust sequence reaching the target gate.

    Segments run at full strength along the phi_f axis with sense (-, +, -)
    and durations (theta1, theta2, theta1).  With ``use_complement`` set and
    theta_f <= pi, the shorter sequence for 2 pi - theta_f about the opposite
    axis is built instead; it realizes the same gate up to a global phase.
    """
    _check_theta_f(theta_f)
    angle, axis_phi = theta_f, phi_f
    if use_complement and theta_f <= math.pi:
        angle = 2.0 * math.pi - theta_f
        axis_phi = phi_f + math.pi
    params = short_corpse_params(angle)
    nx, ny = math.cos(axis_phi), math.sin(axis_phi)
    raw = [
        (params.theta1, -nx, -ny),
        (params.theta2, nx, ny),
        (params.theta1, -nx, -ny),
    ]
    # theta1 underflows to a tiny negative number at theta_f = 2 pi; the
    # sequence then degenerates to the direct 2 pi rotation.
    segs = tuple(Segment(*s) for s in raw if s[0] > FIELD_BOUND_TOL)
    return PiecewiseSchedule(segs, phi_f=phi_f), params


def pa_optimal_schedule(sol: "PendulumSolution", n: int = DEFAULT_SAMPLES) -> SampledSchedule:
    """Sampled pulse-area-optimal waveform for a solved pendulum parameter.

    The coaxial control is wx(t) = dn((t - T/2)/2, k) before any axis
    rotation; its pendulum angle 2 am((t - T/2)/2, k) runs from -theta_f/2 to
    +theta_f/2 so the accumulated rotation angle runs from 0 to theta_f.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    if not math.isfinite(sol.T) or sol.T < 0.0:
        raise ValueError(f"unsolved pendulum solution: T = {sol.T!r}")
    if sol.T == 0.0:
        return SampledSchedule(0.0, np.zeros((n, 2)))
    if abs(sol.g_residual) > 1e-6:
        raise ValueError(
            f"pendulum solution violates the robustness constraint: g = {sol.g_residual!r}"
        )
    half = 0.5 * sol.T
    t = np.linspace(0.0, sol.T, n)
    wx = np.array([jacobi_sn_cn_dn(0.5 * (ti - half), sol.k)[2] for ti in t])
    samples = np.column_stack([wx, np.zeros_like(wx)])
    return SampledSchedule(sol.T, samples)


def rotate_axis(s: Schedule, phi_f: float):
    """Rotate the control field about the z axis by phi_f, pointwise."""
    c, sn = math.cos(phi_f), math.sin(phi_f)
    if isinstance(s, PiecewiseSchedule):
        segs = tuple(
            Segment(d, wx * c - wy * sn, wx * sn + wy * c) for d, wx, wy in s.segments
        )
        return PiecewiseSchedule(segs, phi_f=s.phi_f + phi_f)
    if isinstance(s, SampledSchedule):
        rot = np.array([[c, sn], [-sn, c]])  # right-multiplied row convention
        return SampledSchedule(s.T, s.samples @ rot)
    raise TypeError(f"not a schedule: {type(s)!r}")
