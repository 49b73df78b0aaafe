"""Independent brute-force verifiers.

Everything here deliberately avoids the closed forms it is used to check:
time-sliced kernels are built by exact sequential complex-Gaussian reduction
of the lattice chain (no Monte Carlo), the semigroup property is checked by
grid convolution, the defining Schroedinger equation by finite-difference
stencils, and gradients by central differences.

Oscillatory (Fresnel-type) integrals are regularized by a convergence factor
exp(-eta |x - c|^2) on a schedule of decreasing eta and extrapolated to
eta -> 0 by Neville polynomial extrapolation (a Richardson step for a
general-node schedule).  Results are deterministic given the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from .errors import CausticError
from .models import PhysicalConstants
from .poisson import central_gradient

__all__ = [
    "GridSpec",
    "neville_to_zero",
    "damped_integral",
    "trotter_kernel",
    "semigroup_check",
    "schrodinger_residual",
    "gradient_check",
]

_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned evaluation grid with a time step and an eta schedule.

    ``dt`` is the step used for time derivatives; ``etas`` is the strictly
    decreasing convergence-factor schedule for oscillatory integrals.
    """

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    points: Tuple[int, ...]
    dt: float = 1e-3
    etas: Tuple[float, ...] = (1e-2, 1e-3, 1e-4)

    def __post_init__(self):
        if not (len(self.lower) == len(self.upper) == len(self.points)):
            raise ValueError("lower/upper/points must have equal lengths")
        if any(n < 16 for n in self.points):
            raise ValueError("need at least 16 points per axis")
        if not all(np.isfinite(self.lower)) or not all(np.isfinite(self.upper)):
            raise ValueError("grid bounds must be finite")
        if any(u <= lo for lo, u in zip(self.lower, self.upper)):
            raise ValueError("upper bounds must exceed lower bounds")
        if any(e <= 0 for e in self.etas) or any(
            self.etas[i + 1] >= self.etas[i] for i in range(len(self.etas) - 1)
        ):
            raise ValueError("etas must be positive and strictly decreasing")

    @property
    def ndim(self):
        return len(self.points)

    def axes(self):
        return [np.linspace(lo, up, n) for lo, up, n in zip(self.lower, self.upper, self.points)]


def neville_to_zero(xs, ys):
    """Polynomial extrapolation of samples (xs, ys) to x = 0.

    Returns (value, error_estimate) where the estimate is the change from the
    previous Neville column.
    """
    xs = list(map(float, xs))
    t = list(ys)
    n = len(t)
    if n == 1:
        return t[0], abs(t[0])
    prev = t[-1]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            t[i] = ((0.0 - xs[i - j]) * t[i] - (0.0 - xs[i]) * t[i - 1]) / (xs[i] - xs[i - j])
    return t[-1], abs(t[-1] - prev)


def damped_integral(values, axes, center, etas):
    """Integrate oscillatory grid values with Gaussian damping, eta -> 0.

    ``values`` is an n-d array sampled on the tensor grid of ``axes``; the
    damping is exp(-eta |x - center|^2).  Trapezoidal quadrature per eta,
    then Neville extrapolation of the eta sequence to zero.
    """
    values = np.asarray(values)
    ndim = values.ndim
    dist2 = np.zeros(values.shape)
    for axis, (ax, c) in enumerate(zip(axes, center if ndim > 1 else [center])):
        shape = [1] * ndim
        shape[axis] = ax.size
        dist2 = dist2 + ((ax - c).reshape(shape)) ** 2
    results = []
    for eta in etas:
        damped = values * np.exp(-eta * dist2)
        acc = damped
        for axis in reversed(range(ndim)):
            acc = _trapz(acc, axes[axis], axis=axis)
        results.append(acc)
    return neville_to_zero(etas, results)


# ---------------------------------------------------------------------------
# time-sliced lattice kernels (exact sequential Gaussian reduction)


def _gauss_reduce_1d(a, b, add_p, add_r):
    """Integrate exp(a w^2 + b w) against a slice exp(p(w^2+y^2) + r w y).

    Returns the updated (a, b, log-free multiplicative factor) of the reduced
    Gaussian in y.
    """
    alpha = a + add_p
    norm = np.sqrt(-np.pi / alpha)
    factor = norm * np.exp(-b * b / (4.0 * alpha))
    new_a = add_p - add_r * add_r / (4.0 * alpha)
    new_b = -b * add_r / (2.0 * alpha)
    return new_a, new_b, factor


def _trotter_1d(x, xp, tau, n_slices, m, hbar, omega):
    # Symmetric (Strang) slice: free kernel with the potential at trapezoid
    # weight exp{-i eps [V(y) + V(w)] / 2 hbar}; local error O(eps^3), so the
    # chain converges to the continuum kernel at O(1/N^2).
    eps = tau / n_slices
    amp = np.sqrt(m / (2j * np.pi * hbar * eps))
    kappa = 1j * m / (2.0 * hbar * eps)
    nu = 1j * eps * m * omega * omega / (4.0 * hbar)
    p = kappa - nu
    r = -2.0 * kappa

    c = amp * np.exp(p * xp * xp)
    a = p
    b = r * xp
    for _ in range(n_slices - 1):
        a, b, factor = _gauss_reduce_1d(a, b, p, r)
        c = c * amp * factor
    return c * np.exp(a * x * x + b * x)


def _gauss_reduce_2d(a, b, p_mat, r_mat):
    """Two-dimensional analogue of :func:`_gauss_reduce_1d`.

    ``a`` is 2x2 complex symmetric, ``b`` a 2-vector; the slice couples w and
    y through exp(w^T P w + y^T P y + w^T R y).  The normalization is done as
    two sequential scalar Gaussians so each square root stays on the
    principal branch.
    """
    alpha = a + p_mat
    a1 = alpha[0, 0]
    a2 = alpha[1, 1] - alpha[0, 1] ** 2 / alpha[0, 0]
    norm = np.sqrt(-np.pi / a1) * np.sqrt(-np.pi / a2)
    alpha_inv = np.linalg.inv(alpha)
    factor = norm * np.exp(-0.25 * b @ alpha_inv @ b)
    new_a = p_mat - 0.25 * r_mat.T @ alpha_inv @ r_mat
    new_a = 0.5 * (new_a + new_a.T)
    new_b = -0.5 * r_mat.T @ alpha_inv @ b
    return new_a, new_b, factor


def _trotter_landau2d(x, xp, tau, n_slices, consts):
    # Symmetric split of the minimal-coupling Hamiltonian in the symmetric
    # gauge: H = p^2/2m + [V_iso - (omega/2) L_z] with the isotropic
    # potential V_iso = m omega^2 |r|^2 / 8.  V_iso commutes with L_z, so the
    # half-step exp(-i H_B eps/2) is an exact rotation of each endpoint by
    # omega eps / 4 times a trapezoid potential weight; the slice exponent
    # stays a quadratic form and the chain converges at O(1/N^2).
    from .semiclassical import cyclotron_frequency

    m, hbar = consts.m, consts.hbar
    omega = cyclotron_frequency(consts)
    eps = tau / n_slices
    amp = m / (2j * np.pi * hbar * eps)  # two transverse dimensions per slice
    kappa = 1j * m / (2.0 * hbar * eps)
    eye = np.eye(2)
    jmat = np.array([[0.0, 1.0], [-1.0, 0.0]])
    half = 0.5 * omega * eps
    p_mat = (kappa - 1j * eps * m * omega**2 / (16.0 * hbar)) * eye
    r_mat = -2.0 * kappa * np.cos(half) * eye + 2.0 * kappa * np.sin(half) * jmat

    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    c = amp * np.exp(xp @ p_mat @ xp)
    a = p_mat.astype(complex)
    b = r_mat.T @ xp
    for _ in range(n_slices - 1):
        a, b, factor = _gauss_reduce_2d(a, b, p_mat, r_mat)
        c = c * amp * factor
    return c * np.exp(x @ a @ x + b @ x)


def trotter_kernel(system, x, xp, tau, n_slices, consts=PhysicalConstants(), omega=1.0):
    """Time-sliced lattice kernel from x' to x, reduced exactly slice by slice.

    ``system`` is one of ``'free'``, ``'ho'`` (with angular frequency
    ``omega``) or ``'landau2d'`` (transverse plane, B along z from
    ``consts``).  Each slice uses the midpoint rule for the potential /
    vector potential, so the lattice kernel converges to the continuum one at
    O(1/N^2); for the free particle it is exact at every N.
    """
    if n_slices < 2:
        raise ValueError("need at least 2 slices")
    if tau <= 0:
        raise ValueError("tau must be positive")
    if system == "free":
        return _trotter_1d(x, xp, tau, n_slices, consts.m, consts.hbar, 0.0)
    if system == "ho":
        if omega * tau >= np.pi:
            raise CausticError(
                "caustic crossed inside [0, tau]", nearest_caustic=np.pi / omega
            )
        return _trotter_1d(x, xp, tau, n_slices, consts.m, consts.hbar, omega)
    if system == "landau2d":
        from .semiclassical import cyclotron_frequency

        w = cyclotron_frequency(consts)
        if abs(w) * tau >= 2.0 * np.pi:
            raise CausticError(
                "caustic crossed inside [0, tau]", nearest_caustic=2.0 * np.pi / abs(w)
            )
        return _trotter_landau2d(x, xp, tau, n_slices, consts)
    raise ValueError(f"unknown system {system!r}")


# ---------------------------------------------------------------------------
# semigroup (composition) check by grid convolution


def semigroup_check(kernel_fn, tau1, tau2, grid, pairs=None):
    """Max deviation of int K(x,s;tau1) K(s,x';tau2) ds from K(x,x';tau1+tau2).

    ``kernel_fn(a, b, tau)`` must return the complex amplitude and broadcast
    over leading axes of its endpoint arguments (1-d scalars or (..., 2)
    arrays matching ``grid.ndim``).  The convolution variable runs over the
    grid with the damping schedule ``grid.etas``; endpoint pairs default to a
    small interior set near the grid center.
    """
    axes = grid.axes()
    if grid.ndim == 1:
        s = axes[0]
        lo, up = grid.lower[0], grid.upper[0]
        mid, span = 0.5 * (lo + up), up - lo
        if pairs is None:
            offs = [-0.06 * span, 0.0, 0.05 * span]
            pairs = [(mid + dx, mid + dxp) for dx in offs for dxp in offs]
        worst = 0.0
        for xx, xxp in pairs:
            vals = kernel_fn(xx, s, tau1) * kernel_fn(s, xxp, tau2)
            center = (tau2 * xx + tau1 * xxp) / (tau1 + tau2)
            conv, _ = damped_integral(vals, [s], center, grid.etas)
            target = kernel_fn(xx, xxp, tau1 + tau2)
            worst = max(worst, abs(conv - target))
        return worst

    if grid.ndim == 2:
        ax, ay = axes
        mesh = np.stack(np.meshgrid(ax, ay, indexing="ij"), axis=-1)
        mid = np.array([0.5 * (grid.lower[0] + grid.upper[0]), 0.5 * (grid.lower[1] + grid.upper[1])])
        if pairs is None:
            pairs = [
                (mid + np.array([0.12, 0.05]), mid + np.array([-0.08, -0.1])),
                (mid + np.array([0.0, 0.15]), mid + np.array([0.05, -0.05])),
                (mid, mid + np.array([-0.12, 0.08])),
            ]
        worst = 0.0
        for rr, rrp in pairs:
            vals = kernel_fn(rr, mesh, tau1) * kernel_fn(mesh, rrp, tau2)
            center = (tau2 * np.asarray(rr) + tau1 * np.asarray(rrp)) / (tau1 + tau2)
            conv, _ = damped_integral(vals, [ax, ay], center, grid.etas)
            target = kernel_fn(rr, rrp, tau1 + tau2)
            worst = max(worst, abs(conv - target))
        return worst

    raise ValueError("semigroup_check supports 1-d and 2-d grids")


# ---------------------------------------------------------------------------
# Schroedinger-equation residual on a grid


def _d1_4th(f, h, axis):
    """Fourth-order first derivative, valid two layers away from the edges."""
    s = [slice(2, -2)] * f.ndim
    out = np.zeros_like(f)

    def shifted(k):
        idx = list(s)
        idx[axis] = slice(2 + k, f.shape[axis] - 2 + k if k != 2 else None)
        return f[tuple(idx)]

    out[tuple(s)] = (shifted(-2) - 8 * shifted(-1) + 8 * shifted(1) - shifted(2)) / (12.0 * h)
    return out[tuple(s)]


def _d2_4th(f, h, axis):
    """Fourth-order second derivative, valid two layers away from the edges."""
    s = [slice(2, -2)] * f.ndim

    def shifted(k):
        idx = list(s)
        idx[axis] = slice(2 + k, f.shape[axis] - 2 + k if k != 2 else None)
        return f[tuple(idx)]

    return (
        -shifted(-2) + 16 * shifted(-1) - 30 * shifted(0) + 16 * shifted(1) - shifted(2)
    ) / (12.0 * h * h)


def _interior(f):
    return f[tuple([slice(2, -2)] * f.ndim)]


def schrodinger_residual(kernel_fn, ham, grid, tau):
    """Relative grid norm of (i hbar d_tau - H) K at time tau.

    ``ham`` is ``('free', {m, hbar})``, ``('ho', {m, omega, hbar})`` or
    ``('landau2d', PhysicalConstants)``; H is discretized with fourth-order
    central stencils (minimal coupling in the symmetric gauge for
    'landau2d'), d_tau with a five-point stencil of step ``grid.dt``.
    ``kernel_fn(points, tau)`` evaluates the kernel on the grid.
    """
    kind, pars = ham
    axes = grid.axes()
    dt = grid.dt

    if kind in ("free", "ho"):
        (xs,) = axes
        h = xs[1] - xs[0]
        m, hbar = pars["m"], pars["hbar"]
        ks = [kernel_fn(xs, tau + k * dt) for k in (-2, -1, 1, 2)]
        k0 = kernel_fn(xs, tau)
        dkdt = (_interior(ks[0]) - 8 * _interior(ks[1]) + 8 * _interior(ks[2]) - _interior(ks[3])) / (
            12.0 * dt
        )
        lap = _d2_4th(k0, h, 0)
        hk = -(hbar**2) / (2.0 * m) * lap
        if kind == "ho":
            hk = hk + 0.5 * m * pars["omega"] ** 2 * _interior(xs**2 * k0)
        resid = 1j * hbar * dkdt - hk
        scale = np.linalg.norm(hk.ravel())
        return float(np.linalg.norm(resid.ravel()) / scale)

    if kind == "landau2d":
        consts = pars
        m, hbar, e, c = consts.m, consts.hbar, consts.e, consts.c
        bz = consts.B[2]
        ax, ay = axes
        hx, hy = ax[1] - ax[0], ay[1] - ay[0]
        mesh = np.stack(np.meshgrid(ax, ay, indexing="ij"), axis=-1)
        ks = [kernel_fn(mesh, tau + k * dt) for k in (-2, -1, 1, 2)]
        k0 = kernel_fn(mesh, tau)
        dkdt = (_interior(ks[0]) - 8 * _interior(ks[1]) + 8 * _interior(ks[2]) - _interior(ks[3])) / (
            12.0 * dt
        )
        lap = _d2_4th(k0, hx, 0) + _d2_4th(k0, hy, 1)
        dx = _d1_4th(k0, hx, 0)
        dy = _d1_4th(k0, hy, 1)
        a1 = -0.5 * bz * _interior(mesh[..., 1])
        a2 = 0.5 * bz * _interior(mesh[..., 0])
        a_sq = a1**2 + a2**2
        hk = (
            -(hbar**2) / (2.0 * m) * lap
            + (1j * hbar * e / (m * c)) * (a1 * dx + a2 * dy)
            + (e**2 / (2.0 * m * c**2)) * a_sq * _interior(k0)
        )
        resid = 1j * hbar * dkdt - hk
        scale = np.linalg.norm(hk.ravel())
        return float(np.linalg.norm(resid.ravel()) / scale)

    raise ValueError(f"unknown hamiltonian kind {kind!r}")


def gradient_check(f, grad_f, points, h=None):
    """Max relative deviation between grad_f and central differences of f."""
    worst = 0.0
    for z in points:
        z = np.asarray(z, dtype=float)
        g = np.asarray(grad_f(z), dtype=float)
        g_fd = central_gradient(f, z, step=h)
        scale = max(1.0, float(np.max(np.abs(g))))
        worst = max(worst, float(np.max(np.abs(g - g_fd))) / scale)
    return worst
