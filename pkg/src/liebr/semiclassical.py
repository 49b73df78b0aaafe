"""Exact non-relativistic propagation kernels.

Free particle, harmonic oscillator, and the charged particle in a constant
magnetic field along z (the 2+1-dimensional Landau problem).  All three are
Gaussian, so the van Vleck form ``prefactor * exp(i S_cl / hbar)`` is exact.

Conventions: ``kernel(x, x', tau)`` is the amplitude to propagate *from* x'
*to* x in time tau, i.e. the matrix element <x| U(tau) |x'> for the
minimal-coupling Hamiltonian in the symmetric gauge A = B x r / 2.  The
transverse kernel factorizes into a straight-line holonomy phase
exp{(i/hbar) e int_L dzeta . A} (the entire gauge dependence) times a
gauge-invariant part; the two pieces are reported in ``decomposition``.

Evaluation is vectorized: endpoint arguments may carry leading batch axes.

Caustics: evaluation is restricted to times before the first focal time
(omega tau = pi for the oscillator, omega tau = 2 pi for the Landau kernel);
at or beyond it a :class:`~liebr.errors.CausticError` is raised carrying the
nearest caustic time.  Metaplectic sign tracking past the first caustic is
out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CausticError, CoincidenceLimitError
from .models import PhysicalConstants

__all__ = [
    "KernelValue",
    "KernelDecomposition",
    "free_kernel_1d",
    "free_kernel",
    "ho_kernel",
    "landau_action",
    "landau_kernel",
    "landau_kernel_transverse",
    "holonomy_phase",
    "cyclotron_frequency",
]

# |sin| below this counts as "at a caustic"
EPS_CAUSTIC = 1e-12
# |u| below this switches u/sin(u) and u*cot(u) to their series forms
EPS_SERIES = 1e-4


@dataclass(frozen=True)
class KernelDecomposition:
    """Gauge/holonomy factor (unit modulus) and gauge-invariant exponent."""

    gauge_phase: complex
    invariant_exponent: complex


@dataclass(frozen=True)
class KernelValue:
    """Complex amplitude with its van Vleck split.

    ``amplitude = prefactor * exp(phase_exponent)`` always; when
    ``decomposition`` is present, equally
    ``amplitude = prefactor * gauge_phase * exp(invariant_exponent)``.
    """

    amplitude: complex
    prefactor: complex
    phase_exponent: complex
    decomposition: Optional[KernelDecomposition] = None


def _u_over_sin(u):
    """u / sin(u), stable through u = 0."""
    if abs(u) < EPS_SERIES:
        u2 = u * u
        return 1.0 + u2 / 6.0 + 7.0 * u2 * u2 / 360.0
    return u / np.sin(u)


def _u_cot_u(u):
    """u * cot(u), stable through u = 0."""
    if abs(u) < EPS_SERIES:
        u2 = u * u
        return 1.0 - u2 / 3.0 - u2 * u2 / 45.0
    return u * np.cos(u) / np.sin(u)


def _guard_caustic(u, tau, label):
    """Reject |u| at or beyond the first zero of sin(u) (u scales with tau)."""
    if abs(u) < EPS_SERIES:
        return
    nearest = np.pi * max(1.0, np.round(abs(u) / np.pi)) * abs(tau) / abs(u)
    if abs(np.sin(u)) < EPS_CAUSTIC:
        raise CausticError(
            f"{label} kernel is singular at the caustic (nearest caustic time {nearest:g})",
            nearest_caustic=nearest,
        )
    if abs(u) > np.pi:
        raise CausticError(
            f"{label} kernel requested beyond the first caustic at time {nearest:g}; "
            "sign continuation past a focal point is not supported",
            nearest_caustic=nearest,
        )


def cyclotron_frequency(consts):
    """omega = e B_z / (m c); requires B along the z axis."""
    if abs(consts.B[0]) > 0 or abs(consts.B[1]) > 0:
        raise ValueError("Landau kernels require B along the z axis")
    return consts.e * consts.B[2] / (consts.m * consts.c)


def free_kernel_1d(x, xp, tau, m=1.0, hbar=1.0):
    """Free 1-d kernel sqrt(m / 2 pi i hbar tau) exp{i m (x - x')^2 / 2 hbar tau}."""
    if tau == 0:
        raise CoincidenceLimitError("free kernel at tau = 0 is a delta function")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    prefactor = np.sqrt(m / (2j * np.pi * hbar * tau))
    exponent = 1j * m * (x - xp) ** 2 / (2.0 * hbar * tau)
    return KernelValue(prefactor * np.exp(exponent), prefactor, exponent)


def free_kernel(x, xp, tau, m=1.0, hbar=1.0):
    """Free kernel in d dimensions; endpoints are (..., d) arrays."""
    if tau == 0:
        raise CoincidenceLimitError("free kernel at tau = 0 is a delta function")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    d = x.shape[-1]
    delta2 = np.sum((x - xp) ** 2, axis=-1)
    prefactor = np.sqrt(m / (2j * np.pi * hbar * tau)) ** d
    exponent = 1j * m * delta2 / (2.0 * hbar * tau)
    return KernelValue(prefactor * np.exp(exponent), prefactor, exponent)


def ho_kernel(x, xp, tau, m=1.0, omega=1.0, hbar=1.0):
    """Harmonic-oscillator kernel (Mehler form).

    (m omega / 2 pi i hbar sin(omega tau))^{1/2}
        exp{ (i m omega / 2 hbar sin(omega tau))
             [(x^2 + x'^2) cos(omega tau) - 2 x x'] }

    The omega -> 0 limit reproduces the free kernel.  Caustics sit at
    omega tau = k pi.
    """
    if tau == 0:
        raise CoincidenceLimitError("oscillator kernel at tau = 0 is a delta function")
    if omega == 0:
        return free_kernel_1d(x, xp, tau, m=m, hbar=hbar)
    v = omega * tau
    _guard_caustic(v, tau, "oscillator")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    fac = _u_over_sin(v)  # = omega tau / sin(omega tau) > 0 before the caustic
    prefactor = np.sqrt(m * fac / (2j * np.pi * hbar * tau))
    exponent = (1j * m / (2.0 * hbar * tau)) * fac * ((x**2 + xp**2) * np.cos(v) - 2.0 * x * xp)
    return KernelValue(prefactor * np.exp(exponent), prefactor, exponent)


def landau_action(r, rp, tau, consts=PhysicalConstants()):
    """Transverse classical action for a charged particle in B = B_z zhat.

    S = (m/2) [ (omega/2) cot(omega tau / 2) |r - r'|^2
                + omega (r'_1 r_2 - r'_2 r_1) ],   omega = e B / m c,

    for the path from r' to r in time tau.  The cross term equals the
    straight-line line integral of (e/c) A in the symmetric gauge, so it is
    exactly the holonomy phase angle times hbar.
    """
    if tau == 0:
        raise CoincidenceLimitError("coincidence limit: classical action needs tau != 0")
    omega = cyclotron_frequency(consts)
    u = 0.5 * omega * tau
    _guard_caustic(u, tau, "Landau")
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    delta2 = np.sum((r - rp) ** 2, axis=-1)
    cross = rp[..., 0] * r[..., 1] - rp[..., 1] * r[..., 0]
    m = consts.m
    return (0.5 * m / tau) * _u_cot_u(u) * delta2 + 0.5 * m * omega * cross


def holonomy_phase(r, rp, consts=PhysicalConstants()):
    """exp{(i/hbar) e int_L dzeta . A(zeta)} along the straight path r' -> r.

    For the symmetric gauge and B = B_z zhat the closed form is
    exp{(i/hbar)(e/2c) B (r'_1 r_2 - r'_2 r_1)}: a flux (signed-area times B)
    phase.  Unit modulus by construction.
    """
    if abs(consts.B[0]) > 0 or abs(consts.B[1]) > 0:
        raise ValueError("holonomy phase requires B along the z axis")
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    cross = rp[..., 0] * r[..., 1] - rp[..., 1] * r[..., 0]
    theta = consts.e * consts.B[2] / (2.0 * consts.c * consts.hbar) * cross
    return np.exp(1j * theta)


def landau_kernel_transverse(r, rp, tau, consts=PhysicalConstants()):
    """Transverse (2-d) Landau kernel with its holonomy/invariant split.

    (1 / 2 pi i hbar) (m/2) (omega / sin(omega tau / 2))
        * exp{(i/hbar) e int_L dzeta . A}
        * exp{(i/hbar) (m/2) (omega/2) cot(omega tau / 2) |r - r'|^2}

    B -> 0 reduces smoothly to the free 2-d kernel.
    """
    if tau == 0:
        raise CoincidenceLimitError("Landau kernel at tau = 0 is a delta function")
    omega = cyclotron_frequency(consts)
    u = 0.5 * omega * tau
    _guard_caustic(u, tau, "Landau")
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    m, hbar = consts.m, consts.hbar

    delta2 = np.sum((r - rp) ** 2, axis=-1)
    cross = rp[..., 0] * r[..., 1] - rp[..., 1] * r[..., 0]
    prefactor = (1.0 / (2j * np.pi * hbar)) * (m / tau) * _u_over_sin(u)
    theta = 0.5 * m * omega / hbar * cross
    invariant = (0.5j * m / (hbar * tau)) * _u_cot_u(u) * delta2
    gauge = np.exp(1j * theta)
    return KernelValue(
        amplitude=prefactor * gauge * np.exp(invariant),
        prefactor=prefactor,
        phase_exponent=invariant + 1j * theta,
        decomposition=KernelDecomposition(gauge_phase=gauge, invariant_exponent=invariant),
    )


def landau_kernel(r, rp, x3, x3p, tau, consts=PhysicalConstants()):
    """Full 2+1-d kernel: transverse Landau kernel times the free z kernel.

    The decomposition carries the transverse holonomy factor as gauge_phase
    and folds the free z exponent into the gauge-invariant part.
    """
    perp = landau_kernel_transverse(r, rp, tau, consts)
    kz = free_kernel_1d(x3, x3p, tau, m=consts.m, hbar=consts.hbar)
    invariant = perp.decomposition.invariant_exponent + kz.phase_exponent
    gauge = perp.decomposition.gauge_phase
    prefactor = perp.prefactor * kz.prefactor
    return KernelValue(
        amplitude=perp.amplitude * kz.amplitude,
        prefactor=prefactor,
        phase_exponent=perp.phase_exponent + kz.phase_exponent,
        decomposition=KernelDecomposition(gauge_phase=gauge, invariant_exponent=invariant),
    )
