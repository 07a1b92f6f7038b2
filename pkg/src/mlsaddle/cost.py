"""Separable convex costs over node-layer pairs.

Every node-layer pair (i, h) owns a scalar convex function f_ih. The global
objective is the sum of the local ones evaluated at each pair's own state,
so the gradient is computed componentwise.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "CostTerm",
    "CostModel",
    "QuadraticCost",
    "COST_REGISTRY",
    "analytic_optimum",
    "finite_difference_gradient",
    "global_gradient",
    "global_value",
    "make_cost",
    "optimum",
    "register_cost",
]


class CostTerm(NamedTuple):
    value: Callable[[float], float]
    grad: Callable[[float], float]


class CostModel:
    """Per node-layer convex terms, stored in supra (layer-major) order.

    Parameters
    ----------
    terms : sequence of CostTerm
        One ``(value, grad)`` pair per node-layer pair.
    lipschitz_bound : float, optional
        Common Lipschitz constant of the gradients, when known.
    """

    def __init__(self, terms: Sequence[CostTerm], lipschitz_bound=None):
        self.terms = tuple(CostTerm(*t) for t in terms)
        if lipschitz_bound is not None and not lipschitz_bound > 0:
            raise ValueError(f"lipschitz_bound must be positive, got {lipschitz_bound}")
        self.lipschitz_bound = lipschitz_bound

    @property
    def size(self):
        return len(self.terms)

    def values(self, y):
        return np.array([t.value(v) for t, v in zip(self.terms, y)])

    def gradient(self, y):
        return np.array([t.grad(v) for t, v in zip(self.terms, y)])

    def __repr__(self):
        return f"{type(self).__name__}(size={self.size})"


class QuadraticCost(CostModel):
    """f_ih(y) = y**2 / 2 + gamma_ih * y."""

    def __init__(self, gamma):
        self.gamma = np.array(gamma, dtype=float)
        self.gamma.setflags(write=False)
        self.lipschitz_bound = 1.0

    @property
    def size(self):
        return self.gamma.size

    @property
    def terms(self):
        return tuple(CostTerm(lambda y, g=g: 0.5 * y * y + g * y, lambda y, g=g: y + g)
                     for g in self.gamma)

    def values(self, y):
        return 0.5 * y * y + self.gamma * y

    def gradient(self, y):
        return y + self.gamma

    @classmethod
    def from_mapping(cls, net, gamma):
        """Coefficients from a ``{NodeLayerId: value}`` mapping; unlisted pairs get 0."""
        g = np.zeros(net.n_total)
        offsets = np.concatenate(([0], np.cumsum(net.layers)))
        for (i, h), v in gamma.items():
            g[offsets[h] + i] = v
        return cls(g)


def _state_y(state):
    y = getattr(state, "y", state)
    return np.asarray(y, dtype=float)


def _check_size(cost, y):
    if y.shape != (cost.size,):
        raise ValueError(f"state has shape {y.shape}, cost expects ({cost.size},)")


def global_value(cost, state):
    """Sum of the local costs at the state's ``y`` (a FlowState or an array)."""
    y = _state_y(state)
    _check_size(cost, y)
    return float(np.sum(cost.values(y)))


def global_gradient(cost, state):
    """Componentwise derivative of the global objective."""
    y = _state_y(state)
    _check_size(cost, y)
    return np.asarray(cost.gradient(y), dtype=float)


def finite_difference_gradient(cost, y, step=1e-6):
    """Central differences of :func:`global_value`, one coordinate at a time."""
    y = np.asarray(y, dtype=float)
    g = np.empty_like(y)
    for a in range(y.size):
        e = np.zeros_like(y)
        e[a] = step
        g[a] = (global_value(cost, y + e) - global_value(cost, y - e)) / (2 * step)
    return g


def analytic_optimum(cost):
    """Minimizer of sum_a (x**2/2 + gamma_a x) over a common scalar x."""
    if not isinstance(cost, QuadraticCost):
        raise TypeError("analytic_optimum needs a QuadraticCost; use optimum() otherwise")
    return float(-np.mean(cost.gamma))


def optimum(cost, bracket=(-1e3, 1e3)):
    """Common minimizer x* of the global objective restricted to consensus.

    Solved in closed form for quadratic costs, otherwise by bracketing the
    root of the (monotone) derivative of sum_a f_a(x).
    """
    if isinstance(cost, QuadraticCost):
        return analytic_optimum(cost)

    def slope(x):
        return float(np.sum(cost.gradient(np.full(cost.size, x))))

    lo, hi = bracket
    if slope(lo) > 0 or slope(hi) < 0:
        raise ValueError(f"optimum not bracketed by {bracket}")
    return brentq(slope, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


# --------------------------------------------------------------------------
# registry of cost families, each built from a seeded generator

COST_REGISTRY = {}


def register_cost(name):
    def deco(factory):
        COST_REGISTRY[name] = factory
        return factory
    return deco


@register_cost("quadratic")
def _quadratic(n, rng):
    return QuadraticCost(rng.uniform(-1.0, 1.0, n))


@register_cost("logcosh")
def _logcosh(n, rng):
    # log(cosh(y - c)) + y**2 / 20, strictly convex, gradient Lipschitz with L = 1.1
    centers = rng.uniform(-2.0, 2.0, n)

    def term(c):
        return CostTerm(
            lambda y: float(np.logaddexp(y - c, c - y) - np.log(2.0) + 0.05 * y * y),
            lambda y: float(np.tanh(y - c) + 0.1 * y),
        )
    return CostModel([term(c) for c in centers], lipschitz_bound=1.1)


@register_cost("softplus")
def _softplus(n, rng):
    # a * softplus(y - c) + y**2 / 4
    slopes = rng.uniform(0.5, 2.0, n)
    centers = rng.uniform(-2.0, 2.0, n)

    def term(a, c):
        return CostTerm(
            lambda y: float(a * np.logaddexp(0.0, y - c) + 0.25 * y * y),
            lambda y: float(a * np.exp(-np.logaddexp(0.0, c - y)) + 0.5 * y),
        )
    return CostModel([term(a, c) for a, c in zip(slopes, centers)],
                     lipschitz_bound=float(np.max(slopes)) / 4 + 0.5)


def make_cost(name, n, seed):
    """Instantiate registered cost family ``name`` for ``n`` pairs."""
    try:
        factory = COST_REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown cost {name!r}; registered: {sorted(COST_REGISTRY)}") from None
    return factory(n, np.random.default_rng(seed))
