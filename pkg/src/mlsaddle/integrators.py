"""Explicit ODE integrators for autonomous systems ``z' = f(z)``."""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from .laplacian import NumericalError

__all__ = ["DivergenceError", "IntegrationError", "integrate", "rk4", "rk4_affine", "rk4_affine_map", "rk4_step"]

DIVERGENCE_NORM = 1e9


class IntegrationError(NumericalError):
    """Step-size underflow or solver failure; ``t`` is where it stopped."""

    def __init__(self, message, t=None):
        self.t = t
        super().__init__(message if t is None else f"t={t:.6g}: {message}")


class DivergenceError(IntegrationError):
    """State norm exceeded the divergence threshold or became non-finite."""


def rk4_step(f, z, h):
    k1 = f(z)
    k2 = f(z + 0.5 * h * k1)
    k3 = f(z + 0.5 * h * k2)
    k4 = f(z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check(z, t):
    norm = float(np.linalg.norm(z))
    if not math.isfinite(norm):
        raise DivergenceError(f"non-finite state (entries: {np.count_nonzero(~np.isfinite(z))})", t)
    if norm > DIVERGENCE_NORM:
        raise DivergenceError(f"state norm {norm:.3e} exceeds {DIVERGENCE_NORM:.0e}", t)


def rk4(f, z0, t_end, dt=1e-3, sample_every=1):
    """Classical fixed-step Runge-Kutta 4.

    The last step is shortened when ``t_end`` is not a multiple of ``dt``.
    Times are computed as ``k * dt`` rather than accumulated.

    Returns
    -------
    times : ndarray, shape (n_samples,)
    states : ndarray, shape (n_samples, len(z0))
        Every ``sample_every``-th step plus the initial and final states.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    z = np.array(z0, dtype=float)
    _check(z, 0.0)
    times, states = [0.0], [z.copy()]
    for k in range(1, n_steps + 1):
        t_next = min(k * dt, t_end) if k < n_steps else t_end
        h = t_next - (k - 1) * dt
        z = rk4_step(f, z, h)
        if k % sample_every == 0 or k == n_steps:
            _check(z, t_next)
            times.append(t_next)
            states.append(z.copy())
    return np.array(times), np.array(states)


def rk4_affine_map(A, b, h):
    """One RK4 step of ``z' = A z + b`` as the augmented matrix ``[[P, q], [0, 1]]``.

    ``P = sum_{m<=4} (hA)^m / m!`` and ``q = h sum_{m<=3} (hA)^m / (m+1)! b``,
    which is exactly what the four stages compute.
    """
    n = A.shape[0]
    X = h * A
    P = np.eye(n)
    phi = np.eye(n)
    term = np.eye(n)
    for m in range(1, 5):
        term = term @ X / m
        P = P + term
        if m < 4:
            phi = phi + term / (m + 1)
    out = np.eye(n + 1)
    out[:n, :n] = P
    out[:n, n] = h * (phi @ b)
    return out


def rk4_affine(A, b, z0, t_end, dt=1e-3, sample_every=1):
    """:func:`rk4` specialised to affine right-hand sides ``A z + b``.

    Same step sequence and sample times as :func:`rk4`; whole sampling
    strides are applied as one precomputed matrix power.
    """
    if not t_end > 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    h_last = t_end - (n_steps - 1) * dt
    step = rk4_affine_map(A, b, dt)
    z = np.append(np.array(z0, dtype=float), 1.0)
    _check(z[:-1], 0.0)
    times, states = [0.0], [z[:-1].copy()]
    # an unstable step overflows the powers; _check reports it at the first sample
    with np.errstate(over="ignore", invalid="ignore"):
        stride = np.linalg.matrix_power(step, sample_every)
        k = 0
        # all but the last step, in strides of sample_every
        while k + sample_every <= n_steps - 1:
            z = stride @ z
            k += sample_every
            _check(z[:-1], k * dt)
            times.append(k * dt)
            states.append(z[:-1].copy())
        if n_steps - 1 - k > 0:
            z = np.linalg.matrix_power(step, n_steps - 1 - k) @ z
        last = rk4_affine_map(A, b, h_last) if h_last != dt else step
        z = last @ z
    _check(z[:-1], t_end)
    times.append(t_end)
    states.append(z[:-1].copy())
    return np.array(times), np.array(states)


def _adaptive(f, z0, t_end, rtol, atol):
    z0 = np.array(z0, dtype=float)
    _check(z0, 0.0)

    def diverged(t, z):
        return DIVERGENCE_NORM - np.linalg.norm(z)
    diverged.terminal = True

    sol = solve_ivp(lambda t, z: f(z), (0.0, t_end), z0, method="RK45",
                    rtol=rtol, atol=atol, events=diverged)
    if sol.status == -1:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    if sol.status == 1:
        raise DivergenceError(f"state norm exceeds {DIVERGENCE_NORM:.0e}", float(sol.t_events[0][0]))
    states = sol.y.T
    if not np.all(np.isfinite(states)):
        bad = int(np.argmax(~np.all(np.isfinite(states), axis=1)))
        raise DivergenceError("non-finite state", float(sol.t[bad]))
    return sol.t, states


def integrate(f, z0, t_end, method="rk4", dt=1e-3, sample_every=1, rtol=1e-6, atol=1e-8):
    """Integrate with ``method`` ``"rk4"`` (fixed step) or ``"adaptive"``
    (Dormand-Prince 5(4), samples at accepted steps)."""
    if method == "rk4":
        return rk4(f, z0, t_end, dt, sample_every)
    if method == "adaptive":
        if not t_end > 0:
            raise ValueError(f"t_end must be positive, got {t_end}")
        return _adaptive(f, z0, t_end, rtol, atol)
    raise ValueError(f"unknown integration method {method!r}")
