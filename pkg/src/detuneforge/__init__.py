"""Synthesis, simulation and verification of detuning-robust one-qubit controls."""

from .elliptic import EllipticDomainError, ellip_F, ellip_K, jacobi_am, jacobi_sn_cn_dn
from .propagation import (
    CostReport,
    FirstOrderTerm,
    SimulationResult,
    bloch_trajectory,
    costs,
    fit_loglog_slope,
    infidelity_scan,
    propagate_exact,
    propagate_order_by_order,
    propagate_rk4,
    robustness_integral,
    simulate,
)
from .schedules import (
    PiecewiseSchedule,
    SampledSchedule,
    Segment,
    ShortCorpseParams,
    direct_schedule,
    pa_optimal_schedule,
    rotate_axis,
    short_corpse,
    short_corpse_params,
)
from .solver import (
    PendulumSolution,
    SolverError,
    SweepRow,
    TimeOptimalParams,
    branch_switch_threshold,
    constraint_g,
    k_sup,
    operation_time,
    phase_portrait,
    solve_k,
    sweep,
    time_optimal_params,
)
from .su2 import (
    IDENTITY,
    BlochPoint,
    Rotor,
    apply_to_bloch,
    compose,
    dagger,
    rotor_distance,
    rotor_from_axis_angle,
    target_gate,
    trace_fidelity,
)

__version__ = "0.1.0"
