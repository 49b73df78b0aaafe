"""Compiled inner loops for the fixed-step integrators.

The shipped model flows (pendulum, charged particle, rigid body) have simple
closed-form right-hand sides, so their time loops are written once here in
scalar form and JIT-compiled with numba.  Setting the environment variable
``LIEBR_PURE_NUMPY=1`` (or running without numba installed) keeps the exact
same code as plain Python/numpy; results agree with the compiled path to
rounding.  ``benchmarks/bench_evolve.py`` compares the two.

Flow kind ids (params layout in parentheses):

    1  pendulum, canonical (m, g, l)                    z = (phi, p_phi)
    2  pendulum, extended  (m, g, l)                    z = (r, p_r, phi, p_phi)
    3  charged particle, canonical (m, e, c, Bx, By, Bz)   z = (q, p)
    4  charged particle, noncanonical (m, e, c, Bx, By, Bz) z = (x, v)
    5  rigid body (I1, I2, I3)                          z = K
    6  charged particle, transverse (m, e, c, Bz)       z = (x1, x2, v1, v2)
"""

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("LIEBR_PURE_NUMPY", "0") not in ("0", "", "false")

try:
    if _FORCE_NUMPY:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


USING_NUMBA = HAVE_NUMBA and not _FORCE_NUMPY

KIND_PENDULUM = 1
KIND_PENDULUM_EXTENDED = 2
KIND_CHARGED_CANONICAL = 3
KIND_CHARGED_NONCANONICAL = 4
KIND_RIGID_BODY = 5
KIND_CHARGED_TRANSVERSE = 6

N_CASIMIRS = {
    KIND_PENDULUM: 0,
    KIND_PENDULUM_EXTENDED: 2,
    KIND_CHARGED_CANONICAL: 0,
    KIND_CHARGED_NONCANONICAL: 0,
    KIND_RIGID_BODY: 1,
    KIND_CHARGED_TRANSVERSE: 0,
}


@njit(cache=True)
def _rhs(kind, params, z, out):
    if kind == 1:
        m, g, l = params[0], params[1], params[2]
        out[0] = z[1] / (m * l * l)
        out[1] = -m * g * l * np.sin(z[0])
    elif kind == 2:
        m, g = params[0], params[1]
        r, phi, pphi = z[0], z[2], z[3]
        out[0] = 0.0
        out[1] = 0.0
        out[2] = pphi / (m * r * r)
        out[3] = -m * g * r * np.sin(phi)
    elif kind == 3:
        m, e, c = params[0], params[1], params[2]
        bx, by, bz = params[3], params[4], params[5]
        # Pi = p - (e/c) A(q), A = B x q / 2
        ax = 0.5 * (by * z[2] - bz * z[1])
        ay = 0.5 * (bz * z[0] - bx * z[2])
        az = 0.5 * (bx * z[1] - by * z[0])
        px = z[3] - e / c * ax
        py = z[4] - e / c * ay
        pz = z[5] - e / c * az
        out[0] = px / m
        out[1] = py / m
        out[2] = pz / m
        k = e / (2.0 * m * c)
        out[3] = k * (py * bz - pz * by)
        out[4] = k * (pz * bx - px * bz)
        out[5] = k * (px * by - py * bx)
    elif kind == 4:
        m, e, c = params[0], params[1], params[2]
        bx, by, bz = params[3], params[4], params[5]
        vx, vy, vz = z[3], z[4], z[5]
        out[0] = vx
        out[1] = vy
        out[2] = vz
        k = e / (m * c)
        out[3] = k * (vy * bz - vz * by)
        out[4] = k * (vz * bx - vx * bz)
        out[5] = k * (vx * by - vy * bx)
    elif kind == 5:
        i1, i2, i3 = params[0], params[1], params[2]
        k1, k2, k3 = z[0], z[1], z[2]
        out[0] = (1.0 / i3 - 1.0 / i2) * k2 * k3
        out[1] = (1.0 / i1 - 1.0 / i3) * k3 * k1
        out[2] = (1.0 / i2 - 1.0 / i1) * k1 * k2
    else:
        m, e, c, bz = params[0], params[1], params[2], params[3]
        omega = e * bz / (m * c)
        out[0] = z[2]
        out[1] = z[3]
        out[2] = omega * z[3]
        out[3] = -omega * z[2]


@njit(cache=True)
def _energy(kind, params, z):
    if kind == 1:
        m, g, l = params[0], params[1], params[2]
        return z[1] * z[1] / (2.0 * m * l * l) - m * g * l * np.cos(z[0])
    if kind == 2:
        m, g = params[0], params[1]
        r, pr, phi, pphi = z[0], z[1], z[2], z[3]
        return (pr * pr + pphi * pphi / (r * r)) / (2.0 * m) - m * g * r * np.cos(phi)
    if kind == 3:
        m, e, c = params[0], params[1], params[2]
        bx, by, bz = params[3], params[4], params[5]
        ax = 0.5 * (by * z[2] - bz * z[1])
        ay = 0.5 * (bz * z[0] - bx * z[2])
        az = 0.5 * (bx * z[1] - by * z[0])
        px = z[3] - e / c * ax
        py = z[4] - e / c * ay
        pz = z[5] - e / c * az
        return (px * px + py * py + pz * pz) / (2.0 * m)
    if kind == 4:
        m = params[0]
        return 0.5 * m * (z[3] * z[3] + z[4] * z[4] + z[5] * z[5])
    if kind == 5:
        i1, i2, i3 = params[0], params[1], params[2]
        return 0.5 * (z[0] * z[0] / i1 + z[1] * z[1] / i2 + z[2] * z[2] / i3)
    m = params[0]
    return 0.5 * m * (z[2] * z[2] + z[3] * z[3])


@njit(cache=True)
def _casimirs(kind, params, z, out):
    if kind == 2:
        out[0] = z[0] * z[0]
        out[1] = z[1]
    elif kind == 5:
        out[0] = z[0] * z[0] + z[1] * z[1] + z[2] * z[2]


@njit(cache=True)
def _evolve_loop(kind, params, z0, h, n_steps, method_id):
    """Fixed-step integration of the keyed flow with per-step invariant logs.

    method_id: 0 = classical RK4, 1 = explicit midpoint.
    Returns (points, energy, casimir_logs, blowup_step); blowup_step is -1 on
    success, else the first step index at which the state went non-finite.
    """
    dim = z0.shape[0]
    n_cas = 0
    if kind == 2:
        n_cas = 2
    elif kind == 5:
        n_cas = 1
    points = np.empty((n_steps + 1, dim))
    energy = np.empty(n_steps + 1)
    cas = np.empty((n_steps + 1, n_cas))
    z = z0.copy()
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    tmp = np.empty(dim)

    points[0] = z
    energy[0] = _energy(kind, params, z)
    _casimirs(kind, params, z, cas[0])

    for step in range(n_steps):
        if method_id == 0:
            _rhs(kind, params, z, k1)
            for i in range(dim):
                tmp[i] = z[i] + 0.5 * h * k1[i]
            _rhs(kind, params, tmp, k2)
            for i in range(dim):
                tmp[i] = z[i] + 0.5 * h * k2[i]
            _rhs(kind, params, tmp, k3)
            for i in range(dim):
                tmp[i] = z[i] + h * k3[i]
            _rhs(kind, params, tmp, k4)
            for i in range(dim):
                z[i] = z[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        else:
            _rhs(kind, params, z, k1)
            for i in range(dim):
                tmp[i] = z[i] + 0.5 * h * k1[i]
            _rhs(kind, params, tmp, k2)
            for i in range(dim):
                z[i] = z[i] + h * k2[i]
        ok = True
        for i in range(dim):
            if not np.isfinite(z[i]):
                ok = False
        if not ok:
            return points, energy, cas, step
        points[step + 1] = z
        energy[step + 1] = _energy(kind, params, z)
        _casimirs(kind, params, z, cas[step + 1])
    return points, energy, cas, -1
