"""Tensor diffusion flow and primal-dual saddle-point flow.

Saddle flow on the supra flattening, with ``L`` the Laplacian tensor and
``f`` the separable cost::

    y'      = -grad f(y) - L y - L lambda
    lambda' =  L y

Multipliers only move orthogonally to the all-ones vector, so their mean is
conserved. For convex ``f`` on a connected network every trajectory tends to
``(x* 1, Lambda_bar + mean(lambda_0) 1)``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .cost import QuadraticCost, global_gradient, optimum
from .integrators import integrate, rk4_affine
from .laplacian import LaplacianTensor

__all__ = [
    "FlowState",
    "Trajectory",
    "ConsensusReport",
    "consensus_epsilon",
    "detect_consensus",
    "diffusion_rhs",
    "integrate_diffusion",
    "integrate_saddle",
    "lyapunov",
    "read_trajectory_csv",
    "saddle_point",
    "saddle_rhs",
    "stationarity_residual",
]


@dataclass
class FlowState:
    """States ``y`` and multipliers ``lam`` (flat, supra order) at time ``t``."""

    y: np.ndarray
    lam: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.lam = np.asarray(self.lam, dtype=float)
        if self.y.shape != self.lam.shape:
            raise ValueError(f"y has shape {self.y.shape} but lam has {self.lam.shape}")


@dataclass
class Trajectory:
    """Sampled solution. ``lam`` is None for pure diffusion runs."""

    times: np.ndarray
    y: np.ndarray
    lam: np.ndarray = None
    layers: tuple = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def __getitem__(self, k):
        lam = self.lam[k] if self.lam is not None else np.zeros_like(self.y[k])
        return FlowState(self.y[k], lam, float(self.times[k]))

    @property
    def samples(self):
        return [self[k] for k in range(len(self))]

    @property
    def final(self):
        return self[-1]

    def to_csv(self):
        """CSV text: ``t, y_1..y_N[, lambda_1..lambda_N]``, floats in repr form."""
        n = self.y.shape[1]
        header = ["t"] + [f"y_{a + 1}" for a in range(n)]
        if self.lam is not None:
            header += [f"lambda_{a + 1}" for a in range(n)]
        out = io.StringIO()
        out.write(",".join(header) + "\n")
        for k, t in enumerate(self.times):
            row = [t, *self.y[k]]
            if self.lam is not None:
                row += list(self.lam[k])
            out.write(",".join(repr(float(v)) for v in row) + "\n")
        return out.getvalue()


def read_trajectory_csv(source, layers=None):
    """Inverse of :meth:`Trajectory.to_csv` (source is text or a file)."""
    text = source if isinstance(source, str) else source.read()
    rows = list(csv.reader(io.StringIO(text)))
    header, data = rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
    n_y = sum(1 for h in header if h.startswith("y_"))
    lam = data[:, 1 + n_y:] if any(h.startswith("lambda_") for h in header) else None
    return Trajectory(data[:, 0], data[:, 1:1 + n_y], lam, layers)


@dataclass
class ConsensusReport:
    reached: bool
    t_consensus: float = None
    consensus_value: float = None
    per_layer_times: dict = field(default_factory=dict)
    epsilon: float = None

    def to_text(self):
        def fmt(v):
            return "none" if v is None else repr(float(v))
        lines = [
            f"reached: {str(self.reached).lower()}",
            f"t_consensus: {fmt(self.t_consensus)}",
            f"consensus_value: {fmt(self.consensus_value)}",
            f"epsilon: {fmt(self.epsilon)}",
        ]
        for h, t in sorted(self.per_layer_times.items()):
            lines.append(f"layer_{h + 1}_time: {fmt(t)}")
        return "\n".join(lines) + "\n"


def _matrix(lap):
    return lap.entries if isinstance(lap, LaplacianTensor) else np.asarray(lap, dtype=float)


def _check_dim(L, x, name="x"):
    if x.shape != (L.shape[0],):
        raise ValueError(f"{name} has shape {x.shape}, Laplacian is {L.shape[0]}x{L.shape[0]}")


def diffusion_rhs(lap, x):
    """``-L x``."""
    L = _matrix(lap)
    x = np.asarray(x, dtype=float)
    _check_dim(L, x)
    return -(L @ x)


def integrate_diffusion(lap, x0, t_end, dt=1e-3, method="rk4", sample_every=1, rtol=1e-6, atol=1e-8):
    """Integrate ``x' = -L x`` from ``x0`` up to ``t_end``."""
    L = _matrix(lap)
    x0 = np.asarray(x0, dtype=float)
    _check_dim(L, x0, "x0")
    times, xs = integrate(lambda x: -(L @ x), x0, t_end, method, dt, sample_every, rtol, atol)
    layers = lap.index_map.layers if isinstance(lap, LaplacianTensor) else None
    meta = {"flow": "diffusion", "method": method, "dt": dt, "t_end": t_end}
    return Trajectory(times, xs, None, layers, meta)


def saddle_rhs(lap, cost, s):
    """Time derivatives ``(dy, dlam)`` of the saddle-point flow at state ``s``."""
    L = _matrix(lap)
    _check_dim(L, s.y, "y")
    _check_dim(L, s.lam, "lambda")
    g = global_gradient(cost, s.y)
    if not np.all(np.isfinite(g)):
        raise ValueError(f"non-finite gradient at t={s.t}")
    Ly = L @ s.y
    return -g - Ly - L @ s.lam, Ly


def integrate_saddle(lap, cost, s0, t_end, dt=1e-3, method="rk4", sample_every=1, rtol=1e-6, atol=1e-8,
                     affine=True):
    """Integrate the saddle-point flow from ``s0``.

    With a :class:`QuadraticCost` the flow is affine and fixed-step RK4 is
    applied through its exact step matrix (``affine=False`` forces stage
    evaluation). Raises :class:`~mlsaddle.integrators.DivergenceError` if
    the state norm passes 1e9.
    """
    L = _matrix(lap)
    n = L.shape[0]
    _check_dim(L, s0.y, "y")
    _check_dim(L, s0.lam, "lambda")
    if cost.size != n:
        raise ValueError(f"cost has {cost.size} terms, Laplacian has {n} rows")

    def rhs(z):
        y, lam = z[:n], z[n:]
        g = cost.gradient(y)
        Ly = L @ y
        return np.concatenate((-g - Ly - L @ lam, Ly))

    z0 = np.concatenate((s0.y, s0.lam))
    if method == "rk4" and isinstance(cost, QuadraticCost) and affine:
        # y' = -(I + L) y - L lam - gamma, lam' = L y
        A = np.block([[-np.eye(n) - L, -L], [L, np.zeros((n, n))]])
        b = np.concatenate((-cost.gamma, np.zeros(n)))
        times, zs = rk4_affine(A, b, z0, t_end, dt, sample_every)
    else:
        times, zs = integrate(rhs, z0, t_end, method, dt, sample_every, rtol, atol)
    layers = lap.index_map.layers if isinstance(lap, LaplacianTensor) else None
    meta = {"flow": "saddle", "method": method, "dt": dt, "t_end": t_end, "sample_every": sample_every}
    return Trajectory(times + s0.t, zs[:, :n], zs[:, n:], layers, meta)


def saddle_point(lap, cost, lam_mean=0.0):
    """The equilibrium ``(x* 1, Lambda_bar + lam_mean 1)`` of the flow.

    ``Lambda_bar`` is the minimum-norm solution of ``L Lambda = -grad f(x* 1)``,
    hence orthogonal to the all-ones vector on a connected network.
    """
    L = _matrix(lap)
    x_star = optimum(cost)
    y_star = np.full(L.shape[0], x_star)
    lam_bar = np.linalg.lstsq(L, -global_gradient(cost, y_star), rcond=None)[0]
    lam_bar -= lam_bar.mean()
    return FlowState(y_star, lam_bar + lam_mean)


def lyapunov(s, star):
    """``|y - y*|^2 / 2 + |lam - lam*|^2 / 2``."""
    dy = np.asarray(s.y) - star.y
    dl = np.asarray(s.lam) - star.lam
    return 0.5 * float(dy @ dy) + 0.5 * float(dl @ dl)


def stationarity_residual(lap, cost, s):
    """``|L lam + grad f(y)|``, zero at a saddle point."""
    L = _matrix(lap)
    return float(np.linalg.norm(L @ s.lam + global_gradient(cost, s.y)))


def consensus_epsilon(x_star, rel=1e-3):
    """Default consensus tolerance ``rel * max(1, |x*|)``."""
    return rel * max(1.0, abs(x_star))


def _entry_time(times, spread, epsilon):
    inside = spread <= epsilon
    if not inside[-1]:
        return None
    outside = np.flatnonzero(~inside)
    k = 0 if outside.size == 0 else outside[-1] + 1
    return float(times[k])


def detect_consensus(traj, epsilon, layers=None):
    """Last entry time of ``y`` into the epsilon tube around its running mean.

    Per-layer times apply the same rule to each layer's components around
    the layer mean. ``layers`` (node counts) defaults to ``traj.layers``.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    y, times = traj.y, traj.times
    spread = np.max(np.abs(y - y.mean(axis=1, keepdims=True)), axis=1)
    t_c = _entry_time(times, spread, epsilon)

    per_layer = {}
    layers = layers if layers is not None else traj.layers
    if layers is not None:
        off = np.concatenate(([0], np.cumsum(layers)))
        for h in range(len(layers)):
            block = y[:, off[h]:off[h + 1]]
            if block.shape[1] == 0:
                continue
            s = np.max(np.abs(block - block.mean(axis=1, keepdims=True)), axis=1)
            per_layer[h] = _entry_time(times, s, epsilon)

    reached = t_c is not None
    value = float(y[-1].mean()) if reached else None
    return ConsensusReport(reached, t_c, value, per_layer, float(epsilon))
