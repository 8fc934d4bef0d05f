import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from detuneforge.elliptic import (
    EllipticDomainError,
    ellip_F,
    ellip_K,
    jacobi_am,
    jacobi_sn_cn_dn,
)


def quad_F(phi, m):
    """Adaptive-quadrature oracle for the first-kind integral."""
    val, _ = quad(lambda x: 1.0 / math.sqrt(1.0 - m * math.sin(x) ** 2), 0.0, phi,
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def ode_sn_cn_dn(u, m):
    """High-order integration of sn' = cn dn, cn' = -sn dn, dn' = -m sn cn."""
    def rhs(_, y):
        s, c, d = y
        return [c * d, -s * d, -m * s * c]

    sol = solve_ivp(rhs, (0.0, u), [0.0, 1.0, 1.0], method="DOP853",
                    rtol=1e-12, atol=1e-14)
    return tuple(sol.y[:, -1])


class TestCompleteK:
    def test_zero_parameter(self):
        assert ellip_K(0.0) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_half_parameter_against_quadrature(self):
        assert ellip_K(0.5) == pytest.approx(quad_F(math.pi / 2, 0.5), abs=1e-12)
        assert ellip_K(0.5) == pytest.approx(1.854074677, abs=1e-9)

    def test_reciprocal_parameter(self):
        # real part for m > 1 comes from the reciprocal-modulus rule
        assert ellip_K(4.0) == pytest.approx(quad_F(math.pi / 2, 0.25) / 2.0, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(EllipticDomainError):
            ellip_K(1.0)
        with pytest.raises(EllipticDomainError):
            ellip_K(-0.5)


class TestIncompleteF:
    def test_trivial_values(self):
        assert ellip_F(math.pi / 2, 0.0) == pytest.approx(math.pi / 2, abs=1e-15)
        assert ellip_F(0.0, 0.77) == 0.0

    def test_against_quadrature(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            m = rng.uniform(0.0, 0.99)
            phi = rng.uniform(-1.5, 1.5)
            assert ellip_F(phi, m) == pytest.approx(quad_F(phi, m), abs=1e-12)

    def test_amplitude_inverse(self):
        assert jacobi_am(ellip_F(0.7, 0.5), 0.5) == pytest.approx(0.7, abs=1e-10)

    def test_beyond_domain_for_large_parameter(self):
        with pytest.raises(EllipticDomainError, match="beyond k_sup"):
            ellip_F(1.2, 2.0)


class TestAmplitude:
    def test_free_limit(self):
        for u in (-3.0, 0.4, 11.0):
            assert jacobi_am(u, 0.0) == u
        assert jacobi_am(0.0, 0.83) == 0.0

    def test_monotone_below_one(self):
        u = np.linspace(-8, 8, 200)
        vals = [jacobi_am(x, 0.9) for x in u]
        assert np.all(np.diff(vals) > 0)

    def test_reflection_identity_above_one(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            m = rng.uniform(1.01, 4.0)
            u = rng.uniform(-10.0, 10.0)
            k_re = ellip_K(m)
            assert jacobi_am(2 * k_re - u, m) == pytest.approx(jacobi_am(u, m), abs=1e-9)

    def test_inverse_of_F_bulk(self):
        # 1e3 random pairs, parameter up to 0.99
        rng = np.random.default_rng(6)
        worst = 0.0
        for _ in range(1000):
            m = rng.uniform(0.0, 0.99)
            phi = rng.uniform(-3.0, 3.0)
            worst = max(worst, abs(jacobi_am(ellip_F(phi, m), m) - phi))
        assert worst < 1e-9

    def test_derivative_is_dn(self):
        rng = np.random.default_rng(8)
        step = 1e-5
        for _ in range(100):
            m = rng.uniform(0.0, 3.5)
            u = rng.uniform(-5.0, 5.0)
            num = (jacobi_am(u + step, m) - jacobi_am(u - step, m)) / (2 * step)
            assert num == pytest.approx(jacobi_sn_cn_dn(u, m)[2], abs=1e-6)


class TestSnCnDn:
    def test_trig_limit(self):
        s, c, d = jacobi_sn_cn_dn(1.234, 0.0)
        assert (s, c, d) == pytest.approx((math.sin(1.234), math.cos(1.234), 1.0), abs=1e-15)

    def test_origin(self):
        assert jacobi_sn_cn_dn(0.0, 0.42) == pytest.approx((0.0, 1.0, 1.0), abs=1e-15)

    def test_against_ode_oracle(self):
        s, c, d = jacobi_sn_cn_dn(1.0, 0.7)
        ref = ode_sn_cn_dn(1.0, 0.7)
        assert (s, c, d) == pytest.approx(ref, abs=1e-10)
        assert s * s + c * c == pytest.approx(1.0, abs=1e-10)
        assert d * d + 0.7 * s * s == pytest.approx(1.0, abs=1e-10)

    def test_ode_oracle_above_one(self):
        s, c, d = jacobi_sn_cn_dn(2.5, 2.3)
        ref = ode_sn_cn_dn(2.5, 2.3)
        assert (s, c, d) == pytest.approx(ref, abs=1e-9)

    def test_pythagorean_identities_bulk(self):
        rng = np.random.default_rng(10)
        worst = 0.0
        for _ in range(1000):
            m = rng.uniform(0.0, 4.0)
            u = rng.uniform(-12.0, 12.0)
            s, c, d = jacobi_sn_cn_dn(u, m)
            worst = max(worst, abs(s * s + c * c - 1.0), abs(d * d + m * s * s - 1.0))
        assert worst < 1e-9
