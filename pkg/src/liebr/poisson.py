"""Bracket structures on phase space.

A bracket structure is an antisymmetric tensor field ``sigma_ab(z)`` giving
the fundamental brackets ``[z_a, z_b]``.  The bracket of two scalar
observables is ``[A, B](z) = grad A . sigma(z) . grad B``; Hamiltonian flows
are ``zdot = sigma(z) grad H``.  Canonical mechanics is the special case of a
constant block tensor, but nothing here assumes invertibility or evenness of
the dimension: degenerate structures (with Casimir functions) are first-class
citizens and only :func:`invert_structure` rejects them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _accel
from .errors import (
    BlowUpError,
    DegenerateStructureError,
    DimensionMismatchError,
    SingularJacobianError,
)

__all__ = [
    "Observable",
    "PoissonStructure",
    "HamiltonianSystem",
    "Trajectory",
    "CoordinateMap",
    "FastFlow",
    "as_phase_point",
    "canonical_structure",
    "constant_structure",
    "bracket_eval",
    "antisymmetry_residual",
    "jacobi_residual",
    "invert_structure",
    "pushforward_structure",
    "hamiltonian_rhs",
    "evolve",
]

# Default relative scale for central finite-difference steps.
FD_SCALE = 1e-6

# Smallest singular value (relative to the largest) below which a bracket
# tensor is treated as singular.
SINGULAR_RTOL = 1e-10


def as_phase_point(z, dim=None):
    """Validate and return a phase point as a 1-d float array.

    Requires at least one finite entry; ``dim``, when given, pins the length.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.ndim != 1 or z.size < 1:
        raise DimensionMismatchError(f"phase point must be a 1-d vector, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("phase point has non-finite entries")
    if dim is not None and z.size != dim:
        raise DimensionMismatchError(f"phase point has dimension {z.size}, expected {dim}")
    return z


def _fd_step(z, scale=None):
    scale = FD_SCALE if scale is None else scale
    return scale * max(1.0, float(np.max(np.abs(z))))


def central_gradient(fn, z, step=None):
    """Central-difference gradient of a scalar function, O(h^2)."""
    z = np.asarray(z, dtype=float)
    h = _fd_step(z) if step is None else step
    grad = np.empty(z.size)
    for a in range(z.size):
        zp = z.copy()
        zm = z.copy()
        zp[a] += h
        zm[a] -= h
        grad[a] = (fn(zp) - fn(zm)) / (2.0 * h)
    return grad


def central_jacobian(fn, z, step=None):
    """Central-difference derivative of a vector/matrix-valued function.

    Returns an array whose leading axis indexes the differentiation
    direction: ``out[a] = d fn / d z_a``.
    """
    z = np.asarray(z, dtype=float)
    h = _fd_step(z) if step is None else step
    cols = []
    for a in range(z.size):
        zp = z.copy()
        zm = z.copy()
        zp[a] += h
        zm[a] -= h
        cols.append((np.asarray(fn(zp)) - np.asarray(fn(zm))) / (2.0 * h))
    return np.stack(cols, axis=0)


@dataclass(frozen=True)
class Observable:
    """Differentiable scalar field on phase space.

    ``grad`` is an analytic gradient callable when available; otherwise the
    gradient falls back to central finite differences of ``fn`` with step
    ``fd_scale * max(1, |z|_inf)``.
    """

    name: str
    fn: Callable[[np.ndarray], float]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_scale: float = FD_SCALE

    def __call__(self, z):
        return float(self.fn(np.asarray(z, dtype=float)))

    def gradient(self, z):
        z = np.asarray(z, dtype=float)
        if self.grad is not None:
            g = np.asarray(self.grad(z), dtype=float)
        else:
            g = central_gradient(self.fn, z, step=_fd_step(z, self.fd_scale))
        if not np.all(np.isfinite(g)):
            raise ValueError(f"gradient of observable {self.name!r} is non-finite at z={z}")
        return g

    def __mul__(self, other):
        if not isinstance(other, Observable):
            return NotImplemented
        f, g = self, other
        grad = None
        if f.grad is not None and g.grad is not None:
            grad = lambda z: f(z) * g.gradient(z) + g(z) * f.gradient(z)
        return Observable(f"({f.name})*({g.name})", lambda z: f(z) * g(z), grad)

    def __add__(self, other):
        if not isinstance(other, Observable):
            return NotImplemented
        f, g = self, other
        grad = None
        if f.grad is not None and g.grad is not None:
            grad = lambda z: f.gradient(z) + g.gradient(z)
        return Observable(f"({f.name})+({g.name})", lambda z: f(z) + g(z), grad)

    def scaled(self, alpha):
        grad = None if self.grad is None else (lambda z: alpha * self.gradient(z))
        return Observable(f"{alpha}*({self.name})", lambda z: alpha * self.fn(z), grad)


def coordinate_observable(index, dim, name=None):
    """The coordinate function z -> z[index] with its exact gradient."""
    e = np.zeros(dim)
    e[index] = 1.0
    return Observable(name or f"z{index}", lambda z: z[index], lambda z: e.copy())


@dataclass(frozen=True)
class PoissonStructure:
    """Antisymmetric bracket tensor field ``sigma_ab(z)`` of a given dimension.

    Parameters
    ----------
    dim : int
        Phase-space dimension N.
    matrix : callable
        ``z -> (N, N)`` array of fundamental brackets.
    is_constant : bool
        Declares the tensor z-independent; derivative-based residuals then
        short-circuit to zero.
    grad : callable, optional
        Analytic derivative ``z -> (N, N, N)`` with ``grad(z)[a] = d sigma / d z_a``.
        When absent, central finite differences of ``matrix`` are used.
    """

    dim: int
    matrix: Callable[[np.ndarray], np.ndarray]
    is_constant: bool = False
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_scale: float = FD_SCALE
    name: str = "sigma"

    def __call__(self, z):
        z = as_phase_point(z, self.dim)
        sig = np.asarray(self.matrix(z), dtype=float)
        if sig.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"structure {self.name!r} returned shape {sig.shape}, expected {(self.dim, self.dim)}"
            )
        return sig

    def derivative(self, z):
        """d sigma / d z_a stacked on the leading axis."""
        z = as_phase_point(z, self.dim)
        if self.is_constant:
            return np.zeros((self.dim, self.dim, self.dim))
        if self.grad is not None:
            return np.asarray(self.grad(z), dtype=float)
        h = _fd_step(z, self.fd_scale)
        if h == 0.0:
            raise FloatingPointError("finite-difference step underflowed to zero")
        return central_jacobian(self.matrix, z, step=h)


def constant_structure(matrix, name="sigma"):
    """Wrap a fixed matrix of fundamental brackets as a structure."""
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatchError("structure matrix must be square")
    mat = mat.copy()
    mat.setflags(write=False)
    return PoissonStructure(mat.shape[0], lambda z: mat, is_constant=True, name=name)


def canonical_structure(n_pairs, layout="interleaved"):
    """The canonical tensor for ``n_pairs`` conjugate pairs.

    ``layout='interleaved'`` orders coordinates (q1, p1, q2, p2, ...) giving
    2x2 diagonal blocks [[0, 1], [-1, 0]]; ``layout='blocked'`` orders them
    (q1..qn, p1..pn) giving [[0, I], [-I, 0]].
    """
    n = 2 * n_pairs
    omega = np.zeros((n, n))
    if layout == "interleaved":
        for k in range(n_pairs):
            omega[2 * k, 2 * k + 1] = 1.0
            omega[2 * k + 1, 2 * k] = -1.0
    elif layout == "blocked":
        omega[:n_pairs, n_pairs:] = np.eye(n_pairs)
        omega[n_pairs:, :n_pairs] = -np.eye(n_pairs)
    else:
        raise ValueError(f"unknown layout {layout!r}")
    return constant_structure(omega, name=f"omega_{layout}_{n}")


@dataclass(frozen=True)
class FastFlow:
    """Key into the compiled stepping kernels of :mod:`liebr._accel`."""

    kind: int
    params: np.ndarray


@dataclass(frozen=True)
class HamiltonianSystem:
    structure: PoissonStructure
    hamiltonian: Observable
    casimirs: tuple = ()
    name: str = ""
    fast_flow: Optional[FastFlow] = None

    @property
    def dim(self):
        return self.structure.dim


@dataclass(frozen=True)
class Trajectory:
    """Time series of phase points with per-step invariant logs."""

    times: np.ndarray
    points: np.ndarray
    energy: np.ndarray
    casimir_logs: np.ndarray  # shape (n_times, n_casimirs)

    def __post_init__(self):
        if len(self.times) != len(self.points):
            raise DimensionMismatchError("times and points length mismatch")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def energy_drift(self):
        return float(np.max(np.abs(self.energy - self.energy[0])))

    def casimir_drifts(self):
        if self.casimir_logs.shape[1] == 0:
            return np.zeros(0)
        return np.max(np.abs(self.casimir_logs - self.casimir_logs[0]), axis=0)


@dataclass(frozen=True)
class CoordinateMap:
    """Invertible phase-space coordinate change with its Jacobian.

    ``jacobian`` maps z to the matrix ``J[a, c] = d forward(z)_a / d z_c``;
    when omitted it is computed by central differences of ``forward``.
    """

    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_scale: float = FD_SCALE
    name: str = "map"

    def jacobian_at(self, z):
        z = np.asarray(z, dtype=float)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(z), dtype=float)
        # central_jacobian stacks d/dz_c on the leading axis -> transpose
        return central_jacobian(self.forward, z, step=_fd_step(z, self.fd_scale)).T


def bracket_eval(structure, a, b, z):
    """Lie bracket [a, b](z) = grad a . sigma(z) . grad b."""
    z = as_phase_point(z, structure.dim)
    ga = a.gradient(z)
    gb = b.gradient(z)
    if ga.size != structure.dim or gb.size != structure.dim:
        raise DimensionMismatchError("observable gradient dimension does not match structure")
    return float(ga @ structure(z) @ gb)


def antisymmetry_residual(structure, z):
    """max_ab |sigma_ab + sigma_ba| at z."""
    sig = structure(z)
    return float(np.max(np.abs(sig + sig.T)))


def jacobi_residual(structure, z, contracted=True):
    """Residual of the Jacobi identity for the bracket tensor at z.

    With ``contracted=True`` (default) this is the genuine Jacobi condition
    for the fundamental brackets,

        max_abc | sigma_ad d_d sigma_bc + sigma_bd d_d sigma_ca
                  + sigma_cd d_d sigma_ab |,

    which vanishes for every valid bracket tensor, constant or not (the
    rigid-body tensor is the canonical nonconstant example).

    With ``contracted=False`` the plain cyclic derivative sum
    ``max_abc |d_a sigma_bc + d_b sigma_ca + d_c sigma_ab|`` is returned
    instead.  That is the closedness condition appropriate for the *inverse*
    (two-form) of an invertible tensor; it agrees with the contracted form on
    constant tensors but is not implied by the Jacobi identity in general.
    """
    if structure.is_constant:
        return 0.0
    d = structure.derivative(z)  # d[a, b, c] = d_a sigma_bc
    if contracted:
        sig = structure(z)
        # t[a, b, c] = sum_d sigma_ad * d_d sigma_bc
        t = np.einsum("ad,dbc->abc", sig, d)
    else:
        t = d
    cyc = t + np.transpose(t, (1, 2, 0)) + np.transpose(t, (2, 0, 1))
    return float(np.max(np.abs(cyc)))


def invert_structure(structure, z):
    """Inverse tensor sigma^ab(z) with sigma_ac sigma^cb = delta.

    Raises :class:`DegenerateStructureError` when sigma(z) is singular, which
    is automatic for odd N (an odd antisymmetric matrix has determinant 0).
    """
    sig = structure(z)
    svals = np.linalg.svd(sig, compute_uv=False)
    if svals[-1] <= SINGULAR_RTOL * max(svals[0], 1e-300):
        raise DegenerateStructureError(
            f"bracket tensor {structure.name!r} is singular at z={np.asarray(z)} "
            f"(smallest singular value {svals[-1]:.3e})"
        )
    return np.linalg.inv(sig)


def pushforward_structure(coord_map, structure):
    """Transform a bracket tensor under an invertible coordinate map.

    The fundamental brackets transform as a rank-2 contravariant tensor,
    ``sigma'_ab(z') = (dz'_a/dz_c)(dz'_b/dz_d) sigma_cd(z)`` evaluated at
    ``z = inverse(z')``.
    """

    def matrix(zp):
        z = np.asarray(coord_map.inverse(zp), dtype=float)
        jac = coord_map.jacobian_at(z)
        if jac.shape != (structure.dim, structure.dim):
            raise DimensionMismatchError("map Jacobian shape does not match structure dimension")
        svals = np.linalg.svd(jac, compute_uv=False)
        if svals[-1] <= SINGULAR_RTOL * max(svals[0], 1e-300):
            raise SingularJacobianError(f"map {coord_map.name!r} has singular Jacobian at z={z}")
        return jac @ structure(z) @ jac.T

    return PoissonStructure(
        structure.dim,
        matrix,
        is_constant=False,
        name=f"pushforward({structure.name})",
    )


def hamiltonian_rhs(system, z):
    """Right-hand side sigma(z) . grad H(z) of the induced flow."""
    z = as_phase_point(z, system.dim)
    return system.structure(z) @ system.hamiltonian.gradient(z)


_METHOD_IDS = {"rk4": 0, "midpoint": 1}


def _evolve_python(system, z0, h, n_steps, method):
    dim = z0.size
    n_cas = len(system.casimirs)
    points = np.empty((n_steps + 1, dim))
    energy = np.empty(n_steps + 1)
    cas = np.empty((n_steps + 1, n_cas))

    def log(i, z):
        points[i] = z
        energy[i] = system.hamiltonian(z)
        for k, c in enumerate(system.casimirs):
            cas[i, k] = c(z)

    rhs = lambda z: system.structure.matrix(z) @ system.hamiltonian.gradient(z)
    z = z0.copy()
    log(0, z)
    for step in range(n_steps):
        if method == "rk4":
            k1 = rhs(z)
            k2 = rhs(z + 0.5 * h * k1)
            k3 = rhs(z + 0.5 * h * k2)
            k4 = rhs(z + h * k3)
            z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            k1 = rhs(z)
            z = z + h * rhs(z + 0.5 * h * k1)
        if not np.all(np.isfinite(z)):
            raise BlowUpError(
                f"state became non-finite at step {step + 1}", step=step + 1, time=(step + 1) * h
            )
        log(step + 1, z)
    return points, energy, cas


def evolve(system, z0, t_final, dt, method="rk4", use_fast=True):
    """Integrate ``zdot = sigma(z) grad H(z)`` with a fixed-step scheme.

    ``dt`` is adjusted to the nearest value that divides ``t_final`` exactly.
    Energy and every declared Casimir are logged at each step.  Systems built
    by :mod:`liebr.models` carry a compiled fast path (see
    :mod:`liebr._accel`); pass ``use_fast=False`` to force the generic
    closure-based loop.

    Raises :class:`BlowUpError` with the offending step index if the state
    becomes non-finite.
    """
    if dt <= 0 or t_final <= 0:
        raise ValueError("t_final and dt must be positive")
    if method not in _METHOD_IDS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(_METHOD_IDS)}")
    z0 = as_phase_point(z0, system.dim)
    n_steps = max(1, int(round(t_final / dt)))
    h = t_final / n_steps

    fast = system.fast_flow if use_fast else None
    if fast is not None:
        points, energy, cas, blow = _accel._evolve_loop(
            int(fast.kind), fast.params, z0, h, n_steps, _METHOD_IDS[method]
        )
        if blow >= 0:
            raise BlowUpError(
                f"state became non-finite at step {blow + 1}", step=blow + 1, time=(blow + 1) * h
            )
    else:
        points, energy, cas = _evolve_python(system, z0, h, n_steps, method)

    times = np.linspace(0.0, t_final, n_steps + 1)
    return Trajectory(times=times, points=points, energy=energy, casimir_logs=cas)
