import math

import numpy as np
import pytest

from detuneforge.elliptic import jacobi_sn_cn_dn
from detuneforge.propagation import propagate_exact, propagate_rk4, robustness_integral
from detuneforge.schedules import (
    PiecewiseSchedule,
    SampledSchedule,
    Segment,
    direct_schedule,
    pa_optimal_schedule,
    rotate_axis,
    short_corpse,
    short_corpse_params,
)
from detuneforge.solver import PendulumSolution, solve_k
from detuneforge.su2 import rotor_distance, target_gate, trace_fidelity

import _oracles as orc

PI = math.pi


def test_schedule_validation():
    with pytest.raises(ValueError):
        PiecewiseSchedule((Segment(1.0, 0.9, 0.9),))  # field bound
    with pytest.raises(ValueError):
        PiecewiseSchedule((Segment(-0.1, 0.5, 0.0),))
    with pytest.raises(ValueError):
        SampledSchedule(1.0, np.full((5, 2), 0.9))


def test_direct_schedule():
    empty = direct_schedule(0.0, 0.0)
    assert empty.segments == ()
    assert propagate_exact(empty, 0.0) == (1.0, 0.0, 0.0, 0.0)
    s = direct_schedule(PI, 0.0)
    assert len(s.segments) == 1
    assert s.segments[0] == pytest.approx((PI, 1.0, 0.0))
    with pytest.raises(ValueError):
        direct_schedule(-0.2)
    with pytest.raises(ValueError):
        direct_schedule(2 * PI + 0.2)


def test_direct_two_pi_rotation_is_robust():
    s = direct_schedule(2 * PI, 0.0)
    assert np.linalg.norm(robustness_integral(s)) < 1e-8


def test_short_corpse_pi_parameters():
    s, p = short_corpse(PI, 0.0)
    assert p.kappa == pytest.approx(PI / 6, abs=1e-14)
    assert p.theta1 == pytest.approx(PI / 3, abs=1e-14)
    assert p.theta2 == pytest.approx(5 * PI / 3, abs=1e-14)
    assert p.total_time == pytest.approx(7 * PI / 3, abs=1e-13)
    assert s.duration == pytest.approx(7 * PI / 3, abs=1e-13)
    # sense pattern (-, +, -) at full strength
    signs = [np.sign(seg.omega_x) for seg in s.segments]
    assert signs == [-1.0, 1.0, -1.0]
    assert all(abs(math.hypot(seg.omega_x, seg.omega_y) - 1.0) < 1e-15 for seg in s.segments)


def test_short_corpse_two_pi_degenerates_to_direct():
    s, p = short_corpse(2 * PI, 0.0)
    assert p.kappa == pytest.approx(0.0, abs=1e-15)
    assert p.theta1 == pytest.approx(0.0, abs=1e-15)
    assert len(s.segments) == 1
    assert s.segments[0].duration == pytest.approx(2 * PI, abs=1e-12)


def test_short_corpse_reaches_target():
    u = propagate_exact(short_corpse(PI, 0.0)[0], 0.0)
    assert trace_fidelity(target_gate(PI, 0.0), u) > 1.0 - 1e-10


def test_short_corpse_accumulated_angle():
    # theta(0) = 0 and theta(T) = theta2 - 2 theta1, which equals theta_f
    for theta_f in (0.3, PI / 2, PI, 2.8, 2 * PI):
        s, p = short_corpse(theta_f, 0.0)
        acc = sum(seg.duration * seg.omega_x for seg in s.segments)
        assert acc == pytest.approx(p.theta2 - 2 * p.theta1, abs=1e-12)
        assert acc == pytest.approx(theta_f, abs=1e-12)


def test_short_corpse_complement_same_gate_shorter():
    plain, p_plain = short_corpse(PI / 2, 0.3)
    comp, p_comp = short_corpse(PI / 2, 0.3, use_complement=True)
    target = target_gate(PI / 2, 0.3)
    assert trace_fidelity(target, propagate_exact(comp, 0.0)) > 1.0 - 1e-12
    assert comp.duration < plain.duration
    # flag is a no-op above pi
    above, _ = short_corpse(1.5 * PI, 0.0, use_complement=True)
    assert above.duration == pytest.approx(short_corpse(1.5 * PI, 0.0)[0].duration)


@pytest.fixture(scope="module")
def sol_pi():
    return solve_k(PI)


@pytest.fixture(scope="module")
def sched_pi(sol_pi):
    return pa_optimal_schedule(sol_pi)


def test_pa_schedule_k_zero_is_direct_pulse():
    sched = pa_optimal_schedule(solve_k(2 * PI))
    assert np.allclose(sched.samples[:, 0], 1.0, atol=1e-12)
    assert np.allclose(sched.samples[:, 1], 0.0)
    assert sched.T == pytest.approx(2 * PI, abs=1e-12)


def test_pa_schedule_pi_has_switchbacks(sol_pi, sched_pi):
    wx = sched_pi.samples[:, 0]
    assert wx.min() < -0.1 and wx.max() > 0.9
    # accumulated angle theta(T) from the amplitude-function form
    from detuneforge.elliptic import jacobi_am

    theta_T = 2.0 * jacobi_am(sol_pi.T / 4.0, sol_pi.k) + sol_pi.theta_offset
    assert theta_T == pytest.approx(PI, abs=1e-8)


def test_pa_schedule_three_half_pi_monotone():
    sched = pa_optimal_schedule(solve_k(1.5 * PI))
    assert np.all(sched.samples[:, 0] > 0.0)


def test_pa_schedule_peak_speed_and_symmetry(sched_pi):
    wx = sched_pi.samples[:, 0]
    assert abs(np.abs(wx).max() - 1.0) < 1e-6
    assert np.max(np.abs(wx - wx[::-1])) < 1e-9


def test_pa_schedule_pendulum_energy(sol_pi, sched_pi):
    # speed^2 + (k/2)(1 - cos Theta) = 1 pointwise, with 1 - cos Theta = 2 sn^2
    t = sched_pi.times()
    u = 0.5 * (t - 0.5 * sol_pi.T)
    sn = np.array([jacobi_sn_cn_dn(ui, sol_pi.k)[0] for ui in u])
    energy = sched_pi.samples[:, 0] ** 2 + sol_pi.k * sn**2
    assert np.max(np.abs(energy - 1.0)) < 1e-8


def test_pa_schedule_rejects_bad_solution():
    bogus = PendulumSolution(PI, 1.1, "B", 9.0, PI / 2, 0.5)
    with pytest.raises(ValueError):
        pa_optimal_schedule(bogus)
    nan = PendulumSolution(PI, 1.1, "B", math.nan, PI / 2, 0.0)
    with pytest.raises(ValueError):
        pa_optimal_schedule(nan)


def test_pa_schedule_zero_angle_identity():
    sched = pa_optimal_schedule(solve_k(0.0), n=64)
    assert sched.T == 0.0
    assert not sched.samples.any()


def test_rotate_axis_pointwise():
    s = direct_schedule(PI, 0.0)
    assert rotate_axis(s, 0.0).segments == s.segments
    quarter = rotate_axis(s, PI / 2)
    assert quarter.segments[0].omega_x == pytest.approx(0.0, abs=1e-15)
    assert quarter.segments[0].omega_y == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("phi", [0.4, 2.0, -1.1])
def test_rotated_schedule_hits_rotated_target(phi, sched_pi):
    # conjugation by the z rotation, checked against the matrix oracle
    s = rotate_axis(short_corpse(1.2, 0.0)[0], phi)
    u = propagate_exact(s, 0.0)
    rz = orc.axis_angle_matrix(phi, (0, 0, 1))
    ref = rz @ orc.axis_angle_matrix(1.2, (1, 0, 0)) @ rz.conj().T
    assert trace_fidelity(orc.matrix_to_rotor(ref), u) > 1.0 - 1e-12
    rotated = rotate_axis(sched_pi, phi)
    assert trace_fidelity(target_gate(PI, phi), propagate_rk4(rotated, 0.0)) > 1.0 - 1e-8


def test_field_bound_holds_everywhere(sched_pi):
    assert np.all(np.hypot(sched_pi.samples[:, 0], sched_pi.samples[:, 1]) <= 1.0 + 1e-12)
    s, _ = short_corpse(2.1, 0.9)
    assert all(seg.omega_x**2 + seg.omega_y**2 <= 1.0 + 1e-12 for seg in s.segments)


def test_csv_writers(tmp_path, sched_pi):
    p1 = tmp_path / "piecewise.csv"
    short_corpse(PI, 0.0)[0].to_csv(p1)
    lines = p1.read_text().strip().splitlines()
    assert lines[0] == "index,duration,omega_x,omega_y"
    assert len(lines) == 4
    p2 = tmp_path / "sampled.csv"
    sched_pi.to_csv(p2)
    lines = p2.read_text().strip().splitlines()
    assert lines[0] == "t,omega_x,omega_y"
    assert len(lines) == sched_pi.n + 1
