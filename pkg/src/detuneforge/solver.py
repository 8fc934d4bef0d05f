"""Root solving for the detuning-robust pendulum parameter.

The smooth pulse-area-optimal control is fixed by a single parameter k: its
coaxial rotation angle follows theta(t) = theta_f/2 + 2 am((t - T/2)/2, k),
with the operation time taken from one of two branches,

    branch A:  T = 4 F(theta_f/4, k)                       (any k),
    branch B:  T = 4 (2 Re K(k) - F(theta_f/4, k))         (k > 1),

and k chosen so the accumulated-detuning constraint

    g(k) = int_0^T cos(2 am((t - T/2)/2, k)) dt = 0

holds.  Branch B produces waveforms whose speed changes sign (switchbacks);
branch A waveforms are monotone.  The solved branch flips from B to A at the
angle where k meets its real-domain ceiling k_sup = 1 / sin^2(theta_f/4).

This module also evaluates the bang-bang phase-portrait quantities of the
candidate time-optimal control, which reproduce the short-CORPSE sequence.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Optional, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .elliptic import EllipticDomainError, ellip_F, ellip_K, jacobi_am
from .propagation import costs, propagate_order_by_order
from .schedules import DEFAULT_SAMPLES, pa_optimal_schedule, short_corpse_params

__all__ = [
    "Branch",
    "PendulumSolution",
    "TimeOptimalParams",
    "SweepRow",
    "SolverError",
    "G_TOL",
    "k_sup",
    "operation_time",
    "constraint_g",
    "solve_k",
    "sweep",
    "branch_switch_threshold",
    "time_optimal_params",
    "phase_portrait",
]

Branch = Literal["A", "B"]

G_TOL = 1e-8  # accepted residual of the robustness constraint
_EDGE = 1e-9  # stay this far inside open parameter intervals
_K_SEARCH_MAX = 50.0
_SCAN_POINTS = 600


class SolverError(RuntimeError):
    """No pendulum parameter satisfying the robustness constraint was found."""


@dataclass(frozen=True)
class PendulumSolution:
    """Solved parameters of the pulse-area-optimal control.

    ``theta_offset`` (= theta_f / 2) is the constant separating the rotation
    angle from the pendulum angle: theta(t) = theta_offset + Theta(t).
    """

    theta_f: float
    k: float
    branch: Branch
    T: float
    theta_offset: float
    g_residual: float


@dataclass(frozen=True)
class TimeOptimalParams:
    """Bang-bang phase-portrait parameters of the candidate time optimum.

    ``theta_sb`` is the principal solution of 4 sin x = 2 sin(theta_f/2); the
    control speed actually reverses where the flow crosses gamma_x = 0, at
    the supplementary angle ``switchback_theta`` = pi - theta_sb.  ``b`` is
    the conserved offset of the flow, cos(kappa), with |b| < 1 required for
    any sign reversal to occur.
    """

    theta_f: float
    theta_sb: float
    b: float
    kappa: float

    @property
    def switchback_theta(self) -> float:
        return math.pi - self.theta_sb


@dataclass(frozen=True)
class SweepRow:
    theta_f: float
    k: float
    branch: str
    T: float
    L_p: float
    g_residual: float
    u1_norm: float
    error: Optional[str] = None


def k_sup(theta_f: float) -> float:
    """Largest parameter for which F(theta_f/4, k) stays real."""
    s = math.sin(0.25 * theta_f)
    if s == 0.0:
        return math.inf
    return 1.0 / (s * s)


def operation_time(theta_f: float, k: float, branch: Branch) -> float:
    """Duration of the optimal waveform on the given branch."""
    F = ellip_F(0.25 * theta_f, k)
    if branch == "A":
        return 4.0 * F
    if branch == "B":
        if k <= 1.0:
            raise ValueError("branch B requires k > 1")
        return 4.0 * (2.0 * ellip_K(k) - F)
    raise ValueError(f"unknown branch {branch!r}")


def _g_closed(theta_f: float, k: float, branch: Branch) -> float:
    # g = T - 8 int_0^{T/4} sn^2(u, k) du, with the sn^2 integral expressed
    # through the incomplete second-kind integral E(phi, m):
    # int_0^x sn^2(u, m) du = (x - E(am(x, m), m)) / m for m <= 1, and via the
    # reciprocal-modulus transformation for m > 1.
    T = operation_time(theta_f, k, branch)
    x = 0.25 * T
    if k == 0.0:
        return 2.0 * math.sin(0.5 * T)
    if k <= 1.0:
        sn2 = (x - special.ellipeinc(jacobi_am(x, k), k)) / k
    else:
        rk = math.sqrt(k)
        mp = 1.0 / k
        y = rk * x
        psi = math.asin(min(1.0, rk * math.sin(0.25 * theta_f)))
        am_y = psi if branch == "A" else math.pi - psi
        sn2 = (y - special.ellipeinc(am_y, mp)) / rk
    return float(T - 8.0 * sn2)


def _g_quadrature(theta_f: float, k: float, branch: Branch) -> float:
    T = operation_time(theta_f, k, branch)
    val, _ = integrate.quad(
        lambda u: math.cos(2.0 * jacobi_am(u, k)),
        -0.25 * T,
        0.25 * T,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=400,
    )
    return 2.0 * val


def constraint_g(
    theta_f: float, k: float, branch: Branch = "A", method: str = "closed"
) -> float:
    """Residual of the robustness constraint int_0^T cos(Theta(t)) dt.

    ``method`` selects the closed form (default) or adaptive quadrature of
    cos(2 am(u, k)); the two agree to better than 1e-9.
    """
    if k < 0.0:
        raise ValueError("parameter k must be nonnegative")
    if method == "closed":
        return _g_closed(theta_f, k, branch)
    if method == "quadrature":
        return _g_quadrature(theta_f, k, branch)
    raise ValueError(f"unknown method {method!r}")


def _bracket_root(theta_f: float, branch: Branch) -> Optional[float]:
    ks = k_sup(theta_f)
    if branch == "B":
        lo = 1.0 + _EDGE
        hi = min(ks - _EDGE, _K_SEARCH_MAX)
    else:
        lo = 0.0
        hi = min(ks - _EDGE, _K_SEARCH_MAX)
    if hi <= lo:
        return None
    grid = np.linspace(lo, hi, _SCAN_POINTS)
    g_prev = _g_closed(theta_f, grid[0], branch)
    for a, b in zip(grid[:-1], grid[1:]):
        g_next = _g_closed(theta_f, float(b), branch)
        if g_prev == 0.0:
            return float(a)
        if g_prev * g_next < 0.0:
            return float(
                optimize.brentq(
                    lambda kk: _g_closed(theta_f, kk, branch),
                    float(a),
                    float(b),
                    xtol=1e-13,
                    rtol=4.0 * np.finfo(float).eps,
                )
            )
        g_prev = g_next
    return None


def solve_k(theta_f: float, nontrivial: bool = False) -> PendulumSolution:
    """Find (k, branch, T) satisfying the robustness constraint for theta_f.

    The branch with switchbacks is searched first below the switch threshold,
    the monotone branch first above it, each falling back to the other.  At
    theta_f = 0 the zero-duration identity solution is returned unless
    ``nontrivial`` asks for the one-lap oscillation (k near 1.2).

    Raises
    ------
    SolverError
        If neither branch brackets a constraint root.
    """
    if not 0.0 <= theta_f <= 2.0 * math.pi:
        raise ValueError(f"theta_f = {theta_f!r} outside [0, 2 pi]")
    if theta_f == 0.0:
        if not nontrivial:
            return PendulumSolution(0.0, 0.0, "A", 0.0, 0.0, 0.0)
    else:
        # k = 0 solves the constraint only for the full 2 pi rotation
        g0 = _g_closed(theta_f, 0.0, "A")
        if abs(g0) < G_TOL:
            return PendulumSolution(
                theta_f, 0.0, "A", operation_time(theta_f, 0.0, "A"), 0.5 * theta_f, g0
            )
    order: tuple[Branch, ...] = (
        ("B", "A") if theta_f < branch_switch_threshold() else ("A", "B")
    )
    for branch in order:
        k = _bracket_root(theta_f, branch)
        if k is None:
            continue
        g = _g_closed(theta_f, k, branch)
        if abs(g) > G_TOL:
            continue
        return PendulumSolution(
            theta_f, k, branch, operation_time(theta_f, k, branch), 0.5 * theta_f, g
        )
    raise SolverError(
        f"no robustness-constraint root for theta_f = {theta_f!r} "
        f"(searched branches {order}, k_sup = {k_sup(theta_f)!r})"
    )


def _sweep_row(theta_f: float, n: int, strict: bool) -> SweepRow:
    try:
        sol = solve_k(theta_f)
        sched = pa_optimal_schedule(sol, n)
        rep = costs(sched)
        _, u1 = propagate_order_by_order(sched)
        return SweepRow(
            theta_f, sol.k, sol.branch, sol.T, rep.L_p, sol.g_residual, u1.norm()
        )
    except (SolverError, EllipticDomainError, ValueError) as exc:
        if strict:
            raise SolverError(f"sweep failed at theta_f = {theta_f!r}: {exc}") from exc
        nan = math.nan
        return SweepRow(theta_f, nan, "", nan, nan, nan, nan, error=str(exc))


def sweep(
    theta_f_grid: Sequence[float],
    n: int = DEFAULT_SAMPLES,
    threads: int = 1,
    strict: bool = True,
) -> list[SweepRow]:
    """Solve every grid point and report (k, branch, T, L_p, g, |U1|) rows.

    Row order always follows the input grid.  With ``strict`` off, failures
    are recorded in the row's ``error`` field instead of raised.
    """
    grid = [float(t) for t in theta_f_grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda t: _sweep_row(t, n, strict), grid))
    return [_sweep_row(t, n, strict) for t in grid]


@lru_cache(maxsize=1)
def _threshold() -> float:
    # At the branch switch, k touches k_sup and the quarter time F reaches
    # Re K; there the constraint reduces to 4 sin(theta_f/4) (2 E(m) - K(m))
    # with m = sin^2(theta_f/4), so the switch solves 2 E(m) = K(m).
    def w(theta_f: float) -> float:
        m = math.sin(0.25 * theta_f) ** 2
        return 2.0 * special.ellipe(m) - special.ellipk(m)

    return float(optimize.brentq(w, 1.0, 2.0 * math.pi - 1e-9, xtol=1e-12))


def branch_switch_threshold() -> float:
    """The target angle where the solved branch changes from B to A."""
    return _threshold()


def time_optimal_params(theta_f: float) -> TimeOptimalParams:
    """Switchback angle and flow offset of the bang-bang candidate optimum.

    The values coincide with the short-CORPSE construction: theta_sb equals
    its kappa, and the sequence reverses exactly where the pendulum angle
    reaches -(pi - theta_sb) and +(pi - theta_sb).
    """
    if not 0.0 <= theta_f <= 2.0 * math.pi:
        raise ValueError(f"theta_f = {theta_f!r} outside [0, 2 pi]")
    theta_sb = math.asin(0.5 * math.sin(0.5 * theta_f))
    kappa = short_corpse_params(theta_f).kappa
    return TimeOptimalParams(theta_f, theta_sb, math.cos(kappa), kappa)


def phase_portrait(theta_f: float, n: int = 512) -> list[tuple[float, float, int]]:
    """Sampled (Theta, gamma_x, segment_index) rows of the bang-bang solution.

    The curve runs from (-theta_f/2, -k_b) to (+theta_f/2, -k_b) with
    k_b = cos(theta_f/2) + b, following gamma_x = -(b + cos Theta) on the
    outer legs and gamma_x = +(b + cos Theta) between the two switchbacks,
    which sit at gamma_x = 0.
    """
    p = time_optimal_params(theta_f)
    sb = p.switchback_theta
    legs = [
        (-0.5 * theta_f, -sb, -1.0),
        (-sb, sb, +1.0),
        (sb, 0.5 * theta_f, -1.0),
    ]
    lengths = [abs(b - a) for a, b, _ in legs]
    total = sum(lengths) or 1.0
    rows: list[tuple[float, float, int]] = []
    for idx, ((a, b, sign), length) in enumerate(zip(legs, lengths)):
        pts = max(2, int(round(n * length / total))) if length > 0.0 else 1
        for theta in np.linspace(a, b, pts):
            rows.append((float(theta), float(sign * (p.b + math.cos(theta))), idx))
    return rows
