"""Real-quaternion arithmetic for SU(2) gates on a single qubit.

A unitary U = u_i * 1 - i (u_x sx + u_y sy + u_z sz) with real coefficients
is stored as the unit 4-vector (u_i, u_x, u_y, u_z).  Composition, inversion,
gate fidelity and the induced rotation of Bloch vectors are all carried out
in these real coordinates; complex 2x2 matrices never appear outside of test
oracles.

All operations are pure functions on immutable values.
"""

from __future__ import annotations

import math
from typing import NamedTuple

__all__ = [
    "Rotor",
    "BlochPoint",
    "IDENTITY",
    "rotor_from_axis_angle",
    "target_gate",
    "compose",
    "dagger",
    "trace_fidelity",
    "apply_to_bloch",
    "rotor_distance",
]

_AXIS_TOL = 1e-9


class Rotor(NamedTuple):
    """Unit 4-vector of Pauli coefficients representing an SU(2) element."""

    u_i: float
    u_x: float
    u_y: float
    u_z: float

    def norm(self) -> float:
        return math.sqrt(self.u_i**2 + self.u_x**2 + self.u_y**2 + self.u_z**2)

    def normalized(self) -> "Rotor":
        n = self.norm()
        return Rotor(self.u_i / n, self.u_x / n, self.u_y / n, self.u_z / n)


class BlochPoint(NamedTuple):
    """Point on the Bloch sphere."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)


IDENTITY = Rotor(1.0, 0.0, 0.0, 0.0)


def rotor_from_axis_angle(theta: float, axis) -> Rotor:
    """Rotation by angle ``theta`` about a unit 3-vector ``axis``.

    Returns (cos(theta/2), sin(theta/2) * axis) as Pauli coefficients.

    Raises
    ------
    ValueError
        If ``axis`` is not a unit vector (tolerance 1e-9).
    """
    ax, ay, az = float(axis[0]), float(axis[1]), float(axis[2])
    n = math.sqrt(ax * ax + ay * ay + az * az)
    if abs(n - 1.0) > _AXIS_TOL:
        raise ValueError(f"rotation axis must be a unit vector, got |axis| = {n!r}")
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    return Rotor(c, s * ax, s * ay, s * az)


def target_gate(theta_f: float, phi_f: float = 0.0) -> Rotor:
    """Rotation by ``theta_f`` about the equatorial axis (cos phi_f, sin phi_f, 0)."""
    return rotor_from_axis_angle(theta_f, (math.cos(phi_f), math.sin(phi_f), 0.0))


def compose(a: Rotor, b: Rotor) -> Rotor:
    """Pauli coefficients of the matrix product a . b.

    The scalar part is a_i b_i - a_vec . b_vec; the vector part is
    a_i b_vec + b_i a_vec + a_vec x b_vec.
    """
    return Rotor(
        a.u_i * b.u_i - a.u_x * b.u_x - a.u_y * b.u_y - a.u_z * b.u_z,
        a.u_i * b.u_x + b.u_i * a.u_x + a.u_y * b.u_z - a.u_z * b.u_y,
        a.u_i * b.u_y + b.u_i * a.u_y + a.u_z * b.u_x - a.u_x * b.u_z,
        a.u_i * b.u_z + b.u_i * a.u_z + a.u_x * b.u_y - a.u_y * b.u_x,
    )


def dagger(a: Rotor) -> Rotor:
    """Hermitian conjugate: negate the vector part."""
    return Rotor(a.u_i, -a.u_x, -a.u_y, -a.u_z)


def trace_fidelity(a: Rotor, b: Rotor) -> float:
    """Global-phase-insensitive gate fidelity |Tr(a^dag b)| / 2.

    Since the Pauli matrices are traceless, the trace of a^dag b is twice the
    identity coefficient of the product, so F is just its magnitude.
    """
    p = compose(dagger(a), b)
    return abs(p.u_i)


def apply_to_bloch(a: Rotor, p: BlochPoint) -> BlochPoint:
    """Bloch vector of a (p . sigma) a^dag.

    With a = (w, v), the rotated point is
    (w^2 - |v|^2) p + 2 (v . p) v + 2 w (v x p).
    """
    w = a.u_i
    vx, vy, vz = a.u_x, a.u_y, a.u_z
    px, py, pz = p
    s = w * w - (vx * vx + vy * vy + vz * vz)
    d = 2.0 * (vx * px + vy * py + vz * pz)
    return BlochPoint(
        s * px + d * vx + 2.0 * w * (vy * pz - vz * py),
        s * py + d * vy + 2.0 * w * (vz * px - vx * pz),
        s * pz + d * vz + 2.0 * w * (vx * py - vy * px),
    )


def rotor_distance(a: Rotor, b: Rotor) -> float:
    """Euclidean 4-vector distance, minimized over the global sign of b."""
    plus = math.sqrt(sum((x + y) ** 2 for x, y in zip(a, b)))
    minus = math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))
    return min(plus, minus)
