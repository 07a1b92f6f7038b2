import numpy as np
import pytest

from mlsaddle.cost import (
    COST_REGISTRY,
    CostModel,
    CostTerm,
    QuadraticCost,
    analytic_optimum,
    finite_difference_gradient,
    global_gradient,
    global_value,
    make_cost,
    optimum,
)
from mlsaddle.dynamics import FlowState
from mlsaddle.network import NodeLayerId, build_paper_networks


def test_global_value_examples():
    assert global_value(QuadraticCost(np.zeros(4)), np.zeros(4)) == 0.0
    assert global_value(QuadraticCost([1.0]), np.array([2.0])) == 4.0
    assert global_value(QuadraticCost([1.0, -1.0]), FlowState([1.0, 1.0], [0.0, 0.0])) == 1.0


def test_global_gradient_examples():
    np.testing.assert_array_equal(global_gradient(QuadraticCost(np.zeros(3)), np.zeros(3)), 0)
    g = np.array([0.5, -2.0, 3.0])
    v = np.array([1.0, 1.0, -4.0])
    np.testing.assert_array_equal(global_gradient(QuadraticCost(g), v), v + g)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        global_value(QuadraticCost([1.0, 2.0]), np.zeros(3))
    with pytest.raises(ValueError):
        global_gradient(QuadraticCost([1.0, 2.0]), np.zeros(1))


def test_analytic_optimum():
    assert analytic_optimum(QuadraticCost(np.zeros(5))) == 0.0
    assert analytic_optimum(QuadraticCost([1.0, -1.0])) == 0.0
    assert analytic_optimum(QuadraticCost([1.0, 2.0, 3.0])) == -2.0
    with pytest.raises(TypeError):
        analytic_optimum(make_cost("logcosh", 3, 0))


def test_from_mapping_defaults_to_zero():
    net = build_paper_networks("two-layer")
    c = QuadraticCost.from_mapping(net, {NodeLayerId(1, 1): 2.0})
    assert c.gamma[4] == 2.0
    assert np.count_nonzero(c.gamma) == 1


def test_quadratic_terms_agree_with_vectorized():
    c = QuadraticCost([0.3, -1.2])
    y = np.array([0.7, 2.0])
    assert [t.value(v) for t, v in zip(c.terms, y)] == pytest.approx(c.values(y))
    assert [t.grad(v) for t, v in zip(c.terms, y)] == pytest.approx(c.gradient(y))


@pytest.mark.parametrize("name", sorted(COST_REGISTRY))
def test_registered_costs_gradient_and_convexity(name):
    rng = np.random.default_rng(7)
    cost = make_cost(name, 6, 11)
    for _ in range(20):
        y = rng.uniform(-10, 10, 6)
        g = global_gradient(cost, y)
        fd = finite_difference_gradient(cost, y)
        assert np.max(np.abs(fd - g) / np.maximum(1.0, np.abs(g))) <= 1e-6
    for _ in range(50):
        a, b = rng.uniform(-10, 10, (2, 6))
        lam = rng.uniform()
        lhs = global_value(cost, lam * a + (1 - lam) * b)
        rhs = lam * global_value(cost, a) + (1 - lam) * global_value(cost, b)
        assert lhs <= rhs + 1e-12


def test_numeric_optimum_matches_quadratic():
    gamma = np.array([0.4, -1.0, 2.5])
    c = CostModel([CostTerm(lambda y, g=g: 0.5 * y * y + g * y, lambda y, g=g: y + g) for g in gamma])
    assert optimum(c) == pytest.approx(analytic_optimum(QuadraticCost(gamma)), abs=1e-12)


def test_numeric_optimum_stationary():
    c = make_cost("softplus", 8, 3)
    x = optimum(c)
    assert abs(np.sum(c.gradient(np.full(8, x)))) < 1e-10


def test_unknown_cost():
    with pytest.raises(ValueError):
        make_cost("cubic", 3, 0)


def test_bad_lipschitz():
    with pytest.raises(ValueError):
        CostModel([], lipschitz_bound=0.0)
