"""Jacobi elliptic functions and elliptic integrals in the parameter convention.

Throughout this module ``m`` is the parameter multiplying sin^2 in the
integrand of the first elliptic integral,

    F(phi, m) = int_0^phi dpsi / sqrt(1 - m sin^2 psi),

i.e. m corresponds to k^2 in the modulus convention.  Values of m above 1 are
supported through the reciprocal-modulus transformation (DLMF 19.7(ii) and
22.17), which is exactly the regime where the amplitude function describes a
librating pendulum:

    sn(u, m) = sn(u sqrt(m), 1/m) / sqrt(m)
    cn(u, m) = dn(u sqrt(m), 1/m)
    dn(u, m) = cn(u sqrt(m), 1/m)
    Re K(m)  = K(1/m) / sqrt(m)

For m > 1 only the real part of K is ever needed here, and F(phi, m) is real
only while sin(phi) <= 1/sqrt(m); arguments beyond that raise
:class:`EllipticDomainError` ("beyond k_sup").

Algorithms: arithmetic-geometric mean for K, the ascending AGM phase
recurrence for F (DLMF 19.8(iii)) and the descending Gauss transformation for
am (DLMF 22.20(ii)).  Absolute accuracy is a few 1e-15 over the ranges used
by the solver, comfortably beyond the 1e-12 target.
"""

from __future__ import annotations

import math

__all__ = [
    "EllipticDomainError",
    "ellip_K",
    "ellip_F",
    "jacobi_am",
    "jacobi_sn_cn_dn",
]

_MAX_ITER = 200
_REL_EPS = 1e-16


class EllipticDomainError(ValueError):
    """Argument outside the real domain of an elliptic integral."""


def _check_parameter(m: float) -> None:
    if m < 0.0:
        raise EllipticDomainError(f"negative parameter m = {m!r} is out of scope")


def ellip_K(m: float) -> float:
    """Complete elliptic integral of the first kind K(m).

    For m > 1 returns the real part, Re K(m) = K(1/m) / sqrt(m).  The integral
    diverges at m = 1.
    """
    _check_parameter(m)
    if m == 1.0:
        raise EllipticDomainError("K(m) diverges at m = 1")
    if m > 1.0:
        return ellip_K(1.0 / m) / math.sqrt(m)
    a, b = 1.0, math.sqrt(1.0 - m)
    for _ in range(_MAX_ITER):
        if abs(a - b) <= _REL_EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def ellip_F(phi: float, m: float) -> float:
    """Incomplete elliptic integral of the first kind F(phi, m).

    Satisfies am(F(phi, m), m) = phi on the principal range.  For m > 1 the
    integral is real only while sin(phi) <= 1/sqrt(m).
    """
    _check_parameter(m)
    if phi == 0.0:
        return 0.0
    if m == 0.0:
        return phi
    if m > 1.0:
        s = math.sqrt(m) * math.sin(phi)
        if abs(s) > 1.0 + 1e-12:
            raise EllipticDomainError(
                f"F(phi, m) with sin(phi) = {math.sin(phi)!r} > 1/sqrt(m): beyond k_sup"
            )
        s = max(-1.0, min(1.0, s))
        return ellip_F(math.asin(s), 1.0 / m) / math.sqrt(m)
    if m == 1.0:
        if abs(phi) >= 0.5 * math.pi:
            raise EllipticDomainError("F(phi, 1) diverges for |phi| >= pi/2")
        return math.atanh(math.sin(phi))
    a, b = 1.0, math.sqrt(1.0 - m)
    twon = 1.0
    for _ in range(_MAX_ITER):
        if abs(a - b) <= _REL_EPS * a:
            break
        # tan(d) = (b/a) tan(phi); pick the branch with phi_next ~ 2 phi
        d = math.atan2((b / a) * math.sin(phi), math.cos(phi))
        j = round((phi - d) / math.pi)
        phi = phi + d + j * math.pi
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        twon *= 2.0
    return phi / (twon * a)


def _am_seq(m: float) -> tuple[list[float], list[float]]:
    # AGM scales a_n and half-differences c_n for the descending recurrence.
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    a_seq, c_seq = [a], [c]
    for _ in range(_MAX_ITER):
        if abs(c) < 1e-17:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def jacobi_am(u: float, m: float) -> float:
    """Jacobi amplitude am(u, m) for any real u and parameter m >= 0.

    For m < 1 the amplitude is monotone in u; for m > 1 it oscillates with
    period 4 Re K(m) and satisfies the reflection identity
    am(2 Re K(m) - u, m) = am(u, m).
    """
    _check_parameter(m)
    if m == 0.0:
        return u
    if m > 1.0:
        return math.asin(jacobi_sn_cn_dn(u, m)[0])
    if m == 1.0:
        return math.asin(math.tanh(u))
    a_seq, c_seq = _am_seq(m)
    n = len(a_seq) - 1
    phi = math.ldexp(a_seq[n] * u, n)
    for i in range(n, 0, -1):
        s = c_seq[i] / a_seq[i] * math.sin(phi)
        s = max(-1.0, min(1.0, s))
        phi = 0.5 * (phi + math.asin(s))
    return phi


def jacobi_sn_cn_dn(u: float, m: float) -> tuple[float, float, float]:
    """The triple (sn, cn, dn)(u, m), for any real u and parameter m >= 0.

    The results satisfy sn^2 + cn^2 = 1 and dn^2 + m sn^2 = 1.
    """
    _check_parameter(m)
    if m > 1.0:
        rm = math.sqrt(m)
        sn, cn, dn = jacobi_sn_cn_dn(rm * u, 1.0 / m)
        return sn / rm, dn, cn
    if m == 0.0:
        return math.sin(u), math.cos(u), 1.0
    if m == 1.0:
        sech = 1.0 / math.cosh(u)
        return math.tanh(u), sech, sech
    phi = jacobi_am(u, m)
    sn = math.sin(phi)
    cn = math.cos(phi)
    # dn stays positive for m < 1 since dn^2 = 1 - m sn^2 >= 1 - m
    dn = math.sqrt(max(0.0, 1.0 - m * sn * sn))
    return sn, cn, dn
