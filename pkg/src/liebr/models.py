"""Concrete bracket systems: pendulum, charged particle, rigid body.

Each constructor packages a :class:`~liebr.poisson.HamiltonianSystem` (with
analytic gradients and, where meaningful, Casimir functions) together with
the pseudocanonical coordinate map that produced it.  Default units are
m = e = c = hbar = g = l = 1, B = (0, 0, 1), I = (1, 2, 3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ._accel import (
    KIND_CHARGED_CANONICAL,
    KIND_CHARGED_NONCANONICAL,
    KIND_CHARGED_TRANSVERSE,
    KIND_PENDULUM,
    KIND_PENDULUM_EXTENDED,
    KIND_RIGID_BODY,
)
from .poisson import (
    CoordinateMap,
    FastFlow,
    HamiltonianSystem,
    Observable,
    PoissonStructure,
    constant_structure,
)

__all__ = [
    "PhysicalConstants",
    "pendulum_canonical",
    "pendulum_extended",
    "charged_particle_canonical",
    "charged_particle_noncanonical",
    "charged_particle_transverse",
    "rigid_body",
    "oscillator_algebra_check",
    "OscillatorAlgebraReport",
    "symmetric_vector_potential",
    "skew",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Model constants; everything defaults to 1 (B along z, I = (1, 2, 3))."""

    m: float = 1.0
    e: float = 1.0
    c: float = 1.0
    hbar: float = 1.0
    g: float = 1.0
    l: float = 1.0
    B: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    I: Tuple[float, float, float] = (1.0, 2.0, 3.0)

    def __post_init__(self):
        for attr in ("m", "c", "hbar"):
            if getattr(self, attr) <= 0:
                raise ValueError(f"{attr} must be positive")
        if any(i <= 0 for i in self.I):
            raise ValueError("principal inertia entries must be positive")
        object.__setattr__(self, "B", tuple(float(b) for b in self.B))
        object.__setattr__(self, "I", tuple(float(i) for i in self.I))

    @property
    def B_vec(self):
        return np.array(self.B)

    @property
    def I_vec(self):
        return np.array(self.I)

    def cyclotron_frequency(self):
        """Omega = e |B| / (m c)."""
        return self.e * float(np.linalg.norm(self.B)) / (self.m * self.c)


def skew(v):
    """Matrix S with S @ x = v cross x."""
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def symmetric_vector_potential(B):
    """A(q) = B x q / 2 for a constant field; curl A = B."""
    B = np.asarray(B, dtype=float)

    def vec_a(q):
        return 0.5 * np.cross(B, q)

    return vec_a


# ---------------------------------------------------------------------------
# pendulum


def pendulum_canonical(consts=PhysicalConstants()):
    """Planar pendulum in canonical coordinates (phi, p_phi)."""
    m, g, l = consts.m, consts.g, consts.l
    if g <= 0 or l <= 0:
        raise ValueError("pendulum requires g > 0 and l > 0")

    ham = Observable(
        "pendulum_energy",
        lambda z: z[1] ** 2 / (2.0 * m * l * l) - m * g * l * np.cos(z[0]),
        lambda z: np.array([m * g * l * np.sin(z[0]), z[1] / (m * l * l)]),
    )
    return HamiltonianSystem(
        structure=constant_structure([[0.0, 1.0], [-1.0, 0.0]], name="omega_pendulum"),
        hamiltonian=ham,
        name="pendulum",
        fast_flow=FastFlow(KIND_PENDULUM, np.array([m, g, l])),
    )


def _polar_forward(z):
    x, px, y, py = z
    r = np.hypot(x, y)
    if r <= 0:
        raise ValueError("polar map is singular at the origin")
    phi = np.arctan2(y, x)
    pr = (x * px + y * py) / r
    pphi = x * py - y * px
    return np.array([r, pr, phi, pphi])


def _polar_inverse(w):
    r, pr, phi, pphi = w
    if r <= 0:
        raise ValueError("radius must be positive")
    cp, sp = np.cos(phi), np.sin(phi)
    return np.array([r * cp, pr * cp - pphi / r * sp, r * sp, pr * sp + pphi / r * cp])


def _polar_jacobian(z):
    x, px, y, py = z
    r = np.hypot(x, y)
    pr = (x * px + y * py) / r
    return np.array(
        [
            [x / r, 0.0, y / r, 0.0],
            [px / r - x * pr / r**2, x / r, py / r - y * pr / r**2, y / r],
            [-y / r**2, 0.0, x / r**2, 0.0],
            [py, -y, -px, x],
        ]
    )


def pendulum_extended(consts=PhysicalConstants()):
    """Pendulum on the 4-d pseudocanonical phase space (r, p_r, phi, p_phi).

    The constraint functions r^2 and p_r are Casimirs of the reduced block
    structure: the bracket matrix vanishes on the (r, p_r) pair and is
    canonical on (phi, p_phi).  Returns the system together with the
    invertible map from Cartesian (x, p_x, y, p_y) coordinates.
    """
    m, g, l = consts.m, consts.g, consts.l
    if g <= 0 or l <= 0:
        raise ValueError("pendulum requires g > 0 and l > 0")

    sigma = np.zeros((4, 4))
    sigma[2, 3] = 1.0
    sigma[3, 2] = -1.0

    def ham_fn(z):
        r, pr, phi, pphi = z
        return (pr * pr + pphi * pphi / (r * r)) / (2.0 * m) - m * g * r * np.cos(phi)

    def ham_grad(z):
        r, pr, phi, pphi = z
        return np.array(
            [
                -pphi * pphi / (m * r**3) - m * g * np.cos(phi),
                pr / m,
                m * g * r * np.sin(phi),
                pphi / (m * r * r),
            ]
        )

    system = HamiltonianSystem(
        structure=constant_structure(sigma, name="sigma_pendulum_extended"),
        hamiltonian=Observable("pendulum_extended_energy", ham_fn, ham_grad),
        casimirs=(
            Observable(
                "r_squared",
                lambda z: z[0] ** 2,
                lambda z: np.array([2.0 * z[0], 0.0, 0.0, 0.0]),
            ),
            Observable(
                "p_r",
                lambda z: z[1],
                lambda z: np.array([0.0, 1.0, 0.0, 0.0]),
            ),
        ),
        name="pendulum_extended",
        fast_flow=FastFlow(KIND_PENDULUM_EXTENDED, np.array([m, g, l])),
    )
    cmap = CoordinateMap(
        forward=_polar_forward,
        inverse=_polar_inverse,
        jacobian=_polar_jacobian,
        name="cartesian_to_polar",
    )
    return system, cmap


# ---------------------------------------------------------------------------
# charged particle in a constant magnetic field


def charged_particle_canonical(consts=PhysicalConstants()):
    """Charged particle, canonical (q, p) with the symmetric gauge A = B x q / 2."""
    m, e, c = consts.m, consts.e, consts.c
    B = consts.B_vec
    vec_a = symmetric_vector_potential(B)

    def ham_fn(z):
        pi = z[3:] - e / c * vec_a(z[:3])
        return float(pi @ pi) / (2.0 * m)

    def ham_grad(z):
        pi = z[3:] - e / c * vec_a(z[:3])
        return np.concatenate([-e / (2.0 * m * c) * np.cross(pi, B), pi / m])

    omega6 = np.zeros((6, 6))
    omega6[:3, 3:] = np.eye(3)
    omega6[3:, :3] = -np.eye(3)
    return HamiltonianSystem(
        structure=constant_structure(omega6, name="omega_blocked_6"),
        hamiltonian=Observable("minimal_coupling_energy", ham_fn, ham_grad),
        name="charged_particle",
        fast_flow=FastFlow(KIND_CHARGED_CANONICAL, np.array([m, e, c, *B])),
    )


def charged_particle_noncanonical(consts=PhysicalConstants()):
    """Charged particle in gauge-invariant coordinates (x', v').

    The bracket tensor is (1/m) [[0, 1], [-1, Omega]] with
    Omega_ij = (e/mc) eps_ijk B_k, and H' = m v'^2 / 2; the vector potential
    appears only in the structure, not in the energy.  Returns the system and
    the map from canonical (q, p).
    """
    m, e, c = consts.m, consts.e, consts.c
    B = consts.B_vec
    vec_a = symmetric_vector_potential(B)

    omega_blk = -(e / (m * c)) * skew(B)  # Omega_ij = (e/mc) eps_ijk B_k
    sigma = np.zeros((6, 6))
    sigma[:3, 3:] = np.eye(3) / m
    sigma[3:, :3] = -np.eye(3) / m
    sigma[3:, 3:] = omega_blk / m

    def ham_fn(z):
        v = z[3:]
        return 0.5 * m * float(v @ v)

    def ham_grad(z):
        return np.concatenate([np.zeros(3), m * z[3:]])

    system = HamiltonianSystem(
        structure=constant_structure(sigma, name="sigma_charged_noncanonical"),
        hamiltonian=Observable("kinetic_energy", ham_fn, ham_grad),
        name="charged_particle_noncanonical",
        fast_flow=FastFlow(KIND_CHARGED_NONCANONICAL, np.array([m, e, c, *B])),
    )

    def forward(z):
        q, p = z[:3], z[3:]
        return np.concatenate([q, (p - e / c * vec_a(q)) / m])

    def inverse(w):
        x, v = w[:3], w[3:]
        return np.concatenate([x, m * v + e / c * vec_a(x)])

    da = 0.5 * skew(B)  # dA_i/dq_j for the symmetric gauge

    def jacobian(z):
        jac = np.zeros((6, 6))
        jac[:3, :3] = np.eye(3)
        jac[3:, :3] = -(e / (m * c)) * da
        jac[3:, 3:] = np.eye(3) / m
        return jac

    cmap = CoordinateMap(forward, inverse, jacobian, name="canonical_to_gauge_invariant")
    return system, cmap


def charged_particle_transverse(consts=PhysicalConstants()):
    """Planar reduction for B along z: coordinates (x1, x2, v1, v2)."""
    m, e, c = consts.m, consts.e, consts.c
    if abs(consts.B[0]) > 0 or abs(consts.B[1]) > 0:
        raise ValueError("transverse reduction requires B along the z axis")
    bz = consts.B[2]
    eps = np.array([[0.0, 1.0], [-1.0, 0.0]])
    sigma = np.zeros((4, 4))
    sigma[:2, 2:] = np.eye(2) / m
    sigma[2:, :2] = -np.eye(2) / m
    sigma[2:, 2:] = (e * bz / (m * c)) * eps / m

    return HamiltonianSystem(
        structure=constant_structure(sigma, name="sigma_charged_transverse"),
        hamiltonian=Observable(
            "transverse_kinetic_energy",
            lambda z: 0.5 * m * (z[2] ** 2 + z[3] ** 2),
            lambda z: np.array([0.0, 0.0, m * z[2], m * z[3]]),
        ),
        name="charged_particle_transverse",
        fast_flow=FastFlow(KIND_CHARGED_TRANSVERSE, np.array([m, e, c, bz])),
    )


# ---------------------------------------------------------------------------
# force-free rigid body


def rigid_body(consts=PhysicalConstants()):
    """Force-free rigid body in body angular momentum coordinates K.

    Bracket tensor sigma^{ab} = -eps^{abc} K_c (note the minus sign), energy
    sum K_i^2 / 2 I_i, Casimir |K|^2.  The flow is Euler's equations.
    """
    inertia = consts.I_vec

    def sigma_fn(z):
        return np.array(
            [
                [0.0, -z[2], z[1]],
                [z[2], 0.0, -z[0]],
                [-z[1], z[0], 0.0],
            ]
        )

    basis_grad = np.stack([-skew(e) for e in np.eye(3)], axis=0)

    structure = PoissonStructure(
        3,
        sigma_fn,
        is_constant=False,
        grad=lambda z: basis_grad,
        name="sigma_rigid_body",
    )
    ham = Observable(
        "rotational_energy",
        lambda z: 0.5 * float(z @ (z / inertia)),
        lambda z: z / inertia,
    )
    casimir = Observable("K_squared", lambda z: float(z @ z), lambda z: 2.0 * z)
    return HamiltonianSystem(
        structure=structure,
        hamiltonian=ham,
        casimirs=(casimir,),
        name="rigid_body",
        fast_flow=FastFlow(KIND_RIGID_BODY, inertia.copy()),
    )


# ---------------------------------------------------------------------------
# oscillator raising/lowering algebra on the monomial basis


@dataclass(frozen=True)
class OscillatorAlgebraReport:
    """Commutator residuals of the oscillator operator triple.

    The operators (x^2/2, -d^2/dx^2 / 2, x d/dx / 2 + 1/4) act on monomials
    x^n, n <= max_degree; all matrix entries are quarter-integers, so the
    commutators are computed in exact integer arithmetic (scaled by 4) and
    compared on the truncation-safe subspace n <= max_degree - 2.

    ``sign_lower`` is the computed scalar c in [L3, L-] = c L-; it comes out
    -1 (the raising partner has +1).
    """

    max_degree: int
    subspace_degree: int
    residual_raise_lower: float  # || [L+, L-] - 2 L3 ||
    residual_l3_raise: float  # || [L3, L+] - L+ ||
    residual_l3_lower: float  # || [L3, L-] + L- ||
    residual_l3_lower_plus_sign: float  # || [L3, L-] - L- || (for comparison)
    sign_raise: int
    sign_lower: int

    @property
    def algebra_closes(self):
        return (
            self.residual_raise_lower == 0.0
            and self.residual_l3_raise == 0.0
            and self.residual_l3_lower == 0.0
        )


def oscillator_algebra_check(max_degree=16):
    """Represent L+ = x^2/2, L- = -d^2/2, L3 = x d/dx / 2 + 1/4 as matrices.

    Matrices are built in units of 1/4 (so all entries are integers) on the
    monomial basis {x^n : n <= max_degree} and the three commutators are
    evaluated exactly.  Residuals are reported on the common invariant
    subspace n <= max_degree - 2, where truncation cannot leak.
    """
    if max_degree < 2:
        raise ValueError("max_degree must be at least 2")
    n = max_degree + 1
    a_plus = np.zeros((n, n), dtype=np.int64)  # 4 L+
    a_minus = np.zeros((n, n), dtype=np.int64)  # 4 L-
    a_three = np.zeros((n, n), dtype=np.int64)  # 4 L3
    for k in range(n):
        if k + 2 < n:
            a_plus[k + 2, k] = 2
        if k >= 2:
            a_minus[k - 2, k] = -2 * k * (k - 1)
        a_three[k, k] = 2 * k + 1

    def comm(a, b):
        return a @ b - b @ a

    sub = max_degree - 1  # columns 0 .. max_degree-2
    res_pm = comm(a_plus, a_minus) - 8 * a_three  # 16([L+,L-] - 2 L3)
    res_3p = comm(a_three, a_plus) - 4 * a_plus  # 16([L3,L+] - L+)
    res_3m_minus = comm(a_three, a_minus) + 4 * a_minus  # 16([L3,L-] + L-)
    res_3m_plus = comm(a_three, a_minus) - 4 * a_minus  # 16([L3,L-] - L-)

    def norm(mat):
        return float(np.max(np.abs(mat[:, :sub]))) / 16.0

    # scalar c with [L3, L-] = c L-, read off a nonzero entry
    c3m = comm(a_three, a_minus)
    k = 2
    sign_lower = int(round(c3m[0, k] / a_minus[0, k]))
    c3p = comm(a_three, a_plus)
    sign_raise = int(round(c3p[2, 0] / a_plus[2, 0]))

    return OscillatorAlgebraReport(
        max_degree=max_degree,
        subspace_degree=max_degree - 2,
        residual_raise_lower=norm(res_pm),
        residual_l3_raise=norm(res_3p),
        residual_l3_lower=norm(res_3m_minus),
        residual_l3_lower_plus_sign=norm(res_3m_plus),
        sign_raise=sign_raise,
        sign_lower=sign_lower,
    )
