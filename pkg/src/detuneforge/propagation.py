"""Propagation of control schedules and robustness diagnostics.

The faulty dynamics dU/dt = -i (H_cont(t) + f sz/2) U is integrated entirely
in Pauli coefficients.  Piecewise-constant schedules propagate exactly as
ordered products of closed-form segment rotors; sampled schedules propagate
with fixed-step RK4.  When no step is given, a sampled schedule is integrated
on its own grid two cells at a time, so every field evaluation uses an exact
sample and no interpolation bias enters.

Alongside the full faulty propagator this module integrates the order-by-order
pair (U0, U1),

    dU0/dt = -i H_cont U0,
    dU1/dt = -i (H_cont U1 + (sz/2) U0),      U1(0) = 0,

whose endpoint U1(T) is the first-order detuning-robustness certificate, and
the equivalent global integral int U0^dag sz U0 dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from .schedules import PiecewiseSchedule, SampledSchedule, Schedule
from .su2 import IDENTITY, BlochPoint, Rotor, apply_to_bloch, compose, dagger, trace_fidelity

__all__ = [
    "FirstOrderTerm",
    "CostReport",
    "SimulationResult",
    "DEFAULT_STEP",
    "DEFAULT_SCAN_GRID",
    "propagate_exact",
    "propagate_rk4",
    "propagate_order_by_order",
    "robustness_integral",
    "bloch_trajectory",
    "costs",
    "infidelity_scan",
    "fit_loglog_slope",
    "simulate",
]

DEFAULT_STEP = 1e-3
DEFAULT_SCAN_GRID = (1e-3, 3e-3, 1e-2, 3e-2, 1e-1)

_RENORM_EVERY = 1000  # damp norm drift in long products of segment rotors


class FirstOrderTerm(NamedTuple):
    """Pauli coefficients of the first-order response U1 (no norm constraint)."""

    u_i: float
    u_x: float
    u_y: float
    u_z: float

    def norm(self) -> float:
        return math.sqrt(self.u_i**2 + self.u_x**2 + self.u_y**2 + self.u_z**2)


class CostReport(NamedTuple):
    """Operation time, pulse area and energy integral of a schedule."""

    L_t: float
    L_p: float
    L_e: float


@dataclass(frozen=True)
class SimulationResult:
    """Outcome of a faulty-propagation run at error strength f."""

    u_final: Rotor
    u0_final: Rotor
    u1_final: FirstOrderTerm
    f: float
    trajectory: Optional[list[tuple[float, BlochPoint]]] = None


# ---------------------------------------------------------------------------
# exact segment propagation


def _segment_rotor(duration: float, wx: float, wy: float, f: float) -> Rotor:
    # closed-form exponential of a constant H = (wx sx + wy sy + f sz)/2
    w = math.sqrt(wx * wx + wy * wy + f * f)
    if w == 0.0:
        return IDENTITY
    half = 0.5 * duration * w
    s = math.sin(half) / w
    return Rotor(math.cos(half), s * wx, s * wy, s * f)


def propagate_exact(s: PiecewiseSchedule, f: float) -> Rotor:
    """Ordered product of closed-form segment rotors at error strength f."""
    if not isinstance(s, PiecewiseSchedule):
        raise TypeError("propagate_exact requires a piecewise-constant schedule")
    u = IDENTITY
    for i, seg in enumerate(s.segments, start=1):
        u = compose(_segment_rotor(seg.duration, seg.omega_x, seg.omega_y, f), u)
        if i % _RENORM_EVERY == 0:
            u = u.normalized()
    return u


# ---------------------------------------------------------------------------
# RK4 cores (plain floats; the state vectors have 4 or 8 components)


def _du(u, wx, wy, hz):
    ui, ux, uy, uz = u
    return (
        -0.5 * (wx * ux + wy * uy + hz * uz),
        0.5 * (ui * wx + wy * uz - hz * uy),
        0.5 * (ui * wy + hz * ux - wx * uz),
        0.5 * (ui * hz + wx * uy - wy * ux),
    )


def _rk4_u(u, h, w0, wm, w1, hz):
    k1 = _du(u, w0[0], w0[1], hz)
    k2 = _du(tuple(x + 0.5 * h * d for x, d in zip(u, k1)), wm[0], wm[1], hz)
    k3 = _du(tuple(x + 0.5 * h * d for x, d in zip(u, k2)), wm[0], wm[1], hz)
    k4 = _du(tuple(x + h * d for x, d in zip(u, k3)), w1[0], w1[1], hz)
    return tuple(
        x + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        for x, a, b, c, d in zip(u, k1, k2, k3, k4)
    )


def _du_pair(state, wx, wy):
    # errorless U0 plus first-order response U1 driven by (sz/2) U0
    ai, ax, ay, az, bi, bx, by, bz = state
    return (
        -0.5 * (wx * ax + wy * ay),
        0.5 * (ai * wx + wy * az),
        0.5 * (ai * wy - wx * az),
        0.5 * (wx * ay - wy * ax),
        -0.5 * (wx * bx + wy * by) - 0.5 * az,
        0.5 * (bi * wx + wy * bz) - 0.5 * ay,
        0.5 * (bi * wy - wx * bz) + 0.5 * ax,
        0.5 * (wx * by - wy * bx) + 0.5 * ai,
    )


def _rk4_pair(state, h, w0, wm, w1):
    k1 = _du_pair(state, w0[0], w0[1])
    k2 = _du_pair(tuple(x + 0.5 * h * d for x, d in zip(state, k1)), wm[0], wm[1])
    k3 = _du_pair(tuple(x + 0.5 * h * d for x, d in zip(state, k2)), wm[0], wm[1])
    k4 = _du_pair(tuple(x + h * d for x, d in zip(state, k3)), w1[0], w1[1])
    return tuple(
        x + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        for x, a, b, c, d in zip(state, k1, k2, k3, k4)
    )


# ---------------------------------------------------------------------------
# grid walking for sampled schedules


def _quad_mid(wa, wb, wc, forward: bool):
    # quadratic interpolation of the field at the midpoint of the cell
    # (a, b) when forward (tail cell uses (b, c)); O(dt^3) accurate
    if forward:
        return tuple((3.0 * a + 6.0 * b - c) / 8.0 for a, b, c in zip(wa, wb, wc))
    return tuple((-a + 6.0 * b + 3.0 * c) / 8.0 for a, b, c in zip(wa, wb, wc))


def _walk_sampled(s: SampledSchedule, step, keep: bool):
    """Integrate over the sample grid; returns the final state or all states.

    ``step(state, h, w0, wm, w1)`` advances one RK4 step.  The walk covers two
    cells at a time so every field evaluation is an exact sample.  With
    ``keep``, states at every grid index are recorded: odd indices come from a
    single step whose midpoint field is quadratically interpolated.
    """
    W = [tuple(row) for row in s.samples]
    n = len(W)
    dt = s.T / (n - 1)
    dim = 8 if step is _rk4_pair else 4
    cur = (1.0,) + (0.0,) * (dim - 1)
    states = [cur] if keep else None
    i = 0
    while i + 2 <= n - 1:
        if keep:
            mid = _quad_mid(W[i], W[i + 1], W[i + 2], True)
            states.append(step(cur, dt, W[i], mid, W[i + 1]))
        cur = step(cur, 2.0 * dt, W[i], W[i + 1], W[i + 2])
        if keep:
            states.append(cur)
        i += 2
    if i == n - 2:  # odd number of cells: one trailing single step
        mid = _quad_mid(W[n - 3], W[n - 2], W[n - 1], False) if n >= 3 else W[n - 2]
        cur = step(cur, dt, W[n - 2], mid, W[n - 1])
        if keep:
            states.append(cur)
    return states if keep else cur


def _lerp(wa, wb, x):
    return tuple(a + (b - a) * x for a, b in zip(wa, wb))


def _final_rotor(state) -> Rotor:
    return Rotor(*state[:4]).normalized()


def propagate_rk4(s: Schedule, f: float, h: Optional[float] = None) -> Rotor:
    """RK4 propagation of the full faulty dynamics at error strength f.

    Piecewise schedules are stepped segment by segment so discontinuities
    align with step boundaries; sampled schedules walk their own grid when h
    is omitted.
    """
    if isinstance(s, PiecewiseSchedule):
        hh = DEFAULT_STEP if h is None else h
        if hh <= 0.0:
            raise ValueError("step must be positive")
        u = (1.0, 0.0, 0.0, 0.0)
        for seg in s.segments:
            steps = max(1, math.ceil(seg.duration / hh))
            sub = seg.duration / steps
            w = (seg.omega_x, seg.omega_y)
            for _ in range(steps):
                u = _rk4_u(u, sub, w, w, w, f)
        return _final_rotor(u)
    if isinstance(s, SampledSchedule):
        if s.T == 0.0:
            return IDENTITY
        stepper = lambda st, hh, w0, wm, w1: _rk4_u(st, hh, w0, wm, w1, f)
        if h is None:
            return _final_rotor(_walk_sampled(s, stepper, keep=False))
        return _final_rotor(_substep_walk(s, stepper, h))
    raise TypeError(f"not a schedule: {type(s)!r}")


def _substep_walk(s: SampledSchedule, step, h: float):
    if h <= 0.0:
        raise ValueError("step must be positive")
    W = [tuple(row) for row in s.samples]
    n = len(W)
    dt = s.T / (n - 1)
    cur = (1.0, 0.0, 0.0, 0.0)
    for i in range(n - 1):
        k = max(1, math.ceil(dt / h))
        sub = dt / k
        for j in range(k):
            x0 = j / k
            xm = (j + 0.5) / k
            x1 = (j + 1.0) / k
            cur = step(cur, sub, _lerp(W[i], W[i + 1], x0),
                       _lerp(W[i], W[i + 1], xm), _lerp(W[i], W[i + 1], x1))
    return cur


def propagate_order_by_order(
    s: Schedule, h: Optional[float] = None
) -> tuple[Rotor, FirstOrderTerm]:
    """Joint integration of the errorless propagator and its first-order term.

    Returns (U0(T), U1(T)).  A vanishing U1(T) certifies first-order
    robustness against the detuning error.
    """
    if isinstance(s, PiecewiseSchedule):
        hh = DEFAULT_STEP if h is None else h
        if hh <= 0.0:
            raise ValueError("step must be positive")
        state = (1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        for seg in s.segments:
            steps = max(1, math.ceil(seg.duration / hh))
            sub = seg.duration / steps
            w = (seg.omega_x, seg.omega_y)
            for _ in range(steps):
                state = _rk4_pair(state, sub, w, w, w)
    elif isinstance(s, SampledSchedule):
        if s.T == 0.0:
            return IDENTITY, FirstOrderTerm(0.0, 0.0, 0.0, 0.0)
        state = _walk_sampled(s, _rk4_pair, keep=False)
    else:
        raise TypeError(f"not a schedule: {type(s)!r}")
    return Rotor(*state[:4]).normalized(), FirstOrderTerm(*state[4:])


# ---------------------------------------------------------------------------
# robustness integral and trajectories


def _rotating_axis_integral(duration: float, wx: float, wy: float):
    # int_0^d of the z axis dragged backwards by the segment rotation,
    # q(tau) = cos(w tau) z - sin(w tau) (n x z) with n = (wx, wy, 0)/w
    w = math.sqrt(wx * wx + wy * wy)
    if w == 0.0:
        return (0.0, 0.0, duration)
    nxz = (wy / w, -wx / w, 0.0)  # n x z
    sw = math.sin(w * duration) / w
    cw = (math.cos(w * duration) - 1.0) / w
    return (cw * nxz[0], cw * nxz[1], sw)


def robustness_integral(s: Schedule, h: Optional[float] = None) -> np.ndarray:
    """The 3-vector int_0^T U0(t)^dag sz U0(t) dt in Pauli coordinates.

    The zero vector is equivalent to U1(T) = 0.  Piecewise schedules are
    integrated in closed form; sampled schedules use Simpson's rule over the
    grid states.
    """
    if isinstance(s, PiecewiseSchedule):
        total = np.zeros(3)
        u0 = IDENTITY
        for seg in s.segments:
            q = _rotating_axis_integral(seg.duration, seg.omega_x, seg.omega_y)
            p = apply_to_bloch(dagger(u0), BlochPoint(*q))
            total += np.array(p)
            u0 = compose(_segment_rotor(seg.duration, seg.omega_x, seg.omega_y, 0.0), u0)
        return total
    if isinstance(s, SampledSchedule):
        if s.T == 0.0:
            return np.zeros(3)
        stepper = lambda st, hh, w0, wm, w1: _rk4_u(st, hh, w0, wm, w1, 0.0)
        states = _walk_sampled(s, stepper, keep=True)
        B = np.array(
            [apply_to_bloch(dagger(Rotor(*st)), BlochPoint(0.0, 0.0, 1.0)) for st in states]
        )
        t = s.times()
        return np.array([simpson(B[:, k], x=t) for k in range(3)])
    raise TypeError(f"not a schedule: {type(s)!r}")


def bloch_trajectory(
    s: Schedule,
    f: float,
    start: BlochPoint = BlochPoint(0.0, 0.0, 1.0),
    n_out: int = 200,
) -> list[tuple[float, BlochPoint]]:
    """Bloch vector of the faulty evolution at n_out uniformly spaced times.

    For sampled schedules the output times snap to the sample grid.
    """
    start = BlochPoint(*start)
    if abs(start.norm() - 1.0) > 1e-9:
        raise ValueError("start point must lie on the Bloch sphere")
    if n_out < 2:
        raise ValueError("need at least two output points")
    if isinstance(s, PiecewiseSchedule):
        T = s.duration
        if T == 0.0:
            return [(0.0, start) for _ in range(n_out)]
        bounds = [0.0]
        prefix = [IDENTITY]
        for seg in s.segments:
            bounds.append(bounds[-1] + seg.duration)
            prefix.append(
                compose(_segment_rotor(seg.duration, seg.omega_x, seg.omega_y, f), prefix[-1])
            )
        out = []
        for j in range(n_out):
            t = T * j / (n_out - 1)
            i = min(int(np.searchsorted(bounds, t, side="right")) - 1, len(s.segments) - 1)
            seg = s.segments[i]
            u = compose(_segment_rotor(t - bounds[i], seg.omega_x, seg.omega_y, f), prefix[i])
            out.append((t, apply_to_bloch(u, start)))
        return out
    if isinstance(s, SampledSchedule):
        if s.T == 0.0:
            return [(0.0, start) for _ in range(n_out)]
        stepper = lambda st, hh, w0, wm, w1: _rk4_u(st, hh, w0, wm, w1, f)
        states = _walk_sampled(s, stepper, keep=True)
        t = s.times()
        n = len(states)
        out = []
        for j in range(n_out):
            idx = round(j * (n - 1) / (n_out - 1))
            out.append((float(t[idx]), apply_to_bloch(Rotor(*states[idx]).normalized(), start)))
        return out
    raise TypeError(f"not a schedule: {type(s)!r}")


# ---------------------------------------------------------------------------
# costs and error scans


def costs(s: Schedule) -> CostReport:
    """Operation time, pulse area and energy integral.

    Exact sums for piecewise schedules, trapezoid rule for sampled ones.
    """
    if isinstance(s, PiecewiseSchedule):
        L_t = s.duration
        L_p = sum(d * math.hypot(wx, wy) for d, wx, wy in s.segments)
        L_e = sum(d * (wx * wx + wy * wy) for d, wx, wy in s.segments)
        return CostReport(float(L_t), float(L_p), float(L_e))
    if isinstance(s, SampledSchedule):
        t = s.times()
        mag = np.hypot(s.samples[:, 0], s.samples[:, 1])
        return CostReport(
            float(s.T),
            float(np.trapezoid(mag, t)),
            float(np.trapezoid(mag * mag, t)),
        )
    raise TypeError(f"not a schedule: {type(s)!r}")


def _propagate(s: Schedule, f: float, h: Optional[float] = None) -> Rotor:
    if isinstance(s, PiecewiseSchedule):
        return propagate_exact(s, f)
    return propagate_rk4(s, f, h)


def infidelity_scan(
    s: Schedule,
    target: Rotor,
    f_list: Sequence[float] = DEFAULT_SCAN_GRID,
    h: Optional[float] = None,
) -> list[tuple[float, float]]:
    """Infidelity 1 - F against the target over a list of error strengths."""
    out = []
    for f in f_list:
        if not 0.0 < f <= 0.5:
            raise ValueError(f"error strength f = {f!r} outside (0, 0.5]")
        out.append((float(f), 1.0 - trace_fidelity(target, _propagate(s, f, h))))
    return out


def fit_loglog_slope(scan: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(1 - F) against log(f)."""
    fs = np.array([p[0] for p in scan])
    infid = np.array([max(p[1], 1e-300) for p in scan])
    return float(np.polyfit(np.log(fs), np.log(infid), 1)[0])


def simulate(
    s: Schedule,
    f: float,
    n_trajectory: int = 0,
    start: BlochPoint = BlochPoint(0.0, 0.0, 1.0),
    h: Optional[float] = None,
) -> SimulationResult:
    """Full faulty propagation plus the order-by-order robustness pair."""
    u_final = _propagate(s, f, h)
    u0, u1 = propagate_order_by_order(s, h)
    traj = bloch_trajectory(s, f, start, n_trajectory) if n_trajectory else None
    return SimulationResult(u_final=u_final, u0_final=u0, u1_final=u1, f=f, trajectory=traj)
