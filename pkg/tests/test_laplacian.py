import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import dense_laplacian_oracle, random_network, union_find_components
from mlsaddle.laplacian import (
    NumericalError,
    SupraIndexMap,
    adjacency_tensor,
    algebraic_connectivity,
    build_laplacian,
    multidegree,
    multiplex_supra_laplacian,
    spectrum,
    spectrum_csv,
)
from mlsaddle.network import MultilayerNetwork, NodeLayerId, build_paper_networks, is_connected


def test_index_map_layer_major():
    m = SupraIndexMap((3, 5))
    assert m.forward((0, 0)) == 0
    assert m.forward((2, 0)) == 2
    assert m.forward((0, 1)) == 3
    assert m.forward((4, 1)) == 7
    assert all(m.forward(m.backward(a)) == a for a in range(8))
    assert m.backward(3) == NodeLayerId(0, 1)
    with pytest.raises(IndexError):
        m.forward((3, 0))
    with pytest.raises(IndexError):
        m.backward(8)


def test_multidegree():
    isolated = MultilayerNetwork.build([2, 1], [], [((0, 0), (0, 1), 1.0)])
    assert multidegree(isolated, (1, 0)) == 0.0

    net = MultilayerNetwork.build([2, 1], [(0, 0, 1, 1.0)], [((0, 0), (0, 1), 1.0)],
                                  inter_scales={(0, 1): 0.5})
    assert multidegree(net, (0, 0)) == pytest.approx(1.5)

    mux = build_paper_networks("multiplex-2x5")
    # replica node 2 of the cycle layer: two unit intra neighbours plus 0.4
    assert multidegree(mux, (2, 0)) == pytest.approx(2.4)
    with pytest.raises(IndexError):
        multidegree(mux, (5, 0))


def test_two_node_laplacian():
    L = build_laplacian(MultilayerNetwork.build([2], [(0, 0, 1, 1.0)]))
    np.testing.assert_array_equal(L.entries, [[1, -1], [-1, 1]])
    np.testing.assert_allclose(spectrum(L), [0, 2], atol=1e-15)


def test_path_laplacian_and_spectrum():
    L = build_laplacian(MultilayerNetwork.build([3], [(0, 0, 1, 1.0), (0, 1, 2, 1.0)]))
    np.testing.assert_array_equal(L.entries, [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])
    closed_form = 2 - 2 * np.cos(np.arange(3) * np.pi / 3)
    np.testing.assert_allclose(spectrum(L), closed_form, atol=1e-14)
    np.testing.assert_allclose(spectrum(L), [0, 1, 3], atol=1e-14)


def test_disconnected_has_zero_lambda2():
    net = MultilayerNetwork.build([2, 2], [(0, 0, 1, 1.0), (1, 0, 1, 1.0)])
    assert algebraic_connectivity(build_laplacian(net)) == pytest.approx(0.0, abs=1e-12)


def test_multiplex_matches_supra_construction():
    mux = build_paper_networks("multiplex-2x5")
    L1 = np.array([[2, -1, 0, 0, -1], [-1, 2, -1, 0, 0], [0, -1, 2, -1, 0],
                   [0, 0, -1, 2, -1], [-1, 0, 0, -1, 2]], float)
    L2 = np.array([[1, -1, 0, 0, 0], [-1, 2, -1, 0, 0], [0, -1, 2, -1, 0],
                   [0, 0, -1, 2, -1], [0, 0, 0, -1, 1]], float)
    I = np.eye(5)
    by_hand = np.block([[L1 + 0.4 * I, -0.4 * I], [-0.4 * I, L2 + 0.4 * I]])
    np.testing.assert_allclose(multiplex_supra_laplacian([L1, L2], 0.4), by_hand, atol=0)
    np.testing.assert_allclose(build_laplacian(mux).entries, by_hand, atol=1e-12)


def test_rank4_view_matches_adjacency():
    net = build_paper_networks("four-layer")
    L = build_laplacian(net)
    L4 = L.to_rank4()
    W = adjacency_tensor(net)
    # off-diagonal components are -w_ij(hk)
    off = ~np.einsum("ij,hk->ihjk", np.eye(W.shape[0], dtype=bool), np.eye(W.shape[1], dtype=bool))
    np.testing.assert_array_equal(L4[off], -W[off])
    # contraction with the all-ones tensor over real entries vanishes
    U = L.index_map.pad_mask().astype(float)
    np.testing.assert_allclose(np.einsum("ihjk,jk->ih", L4, U), 0, atol=1e-12)


def test_laplacian_readonly():
    L = build_laplacian(build_paper_networks("two-layer"))
    with pytest.raises(ValueError):
        L.entries[0, 0] = 5


def test_spectrum_errors():
    with pytest.raises(NumericalError):
        spectrum(np.array([[0.0, np.nan], [np.nan, 0.0]]))
    with pytest.raises(NumericalError):
        spectrum(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_spectrum_csv():
    assert spectrum_csv([0.0, 2.0]) == "0,0\n1,2\n"
    assert spectrum_csv([-3e-17, 1.0000000000000002]) == "0,0\n1,1\n"


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_laplacian_properties(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, connected=bool(rng.integers(0, 2)), p_extra=float(rng.uniform(0, 0.3)))
    L = build_laplacian(net)
    A = L.entries
    assert np.array_equal(A, A.T)
    scale = max(1.0, np.abs(A).max())
    assert np.abs(A.sum(axis=1)).max() <= 1e-12 * scale
    assert np.all(np.diag(A) >= 0)
    assert np.all(A[~np.eye(len(A), dtype=bool)] <= 0)
    eigs = spectrum(L)
    assert eigs[0] >= -1e-9
    np.testing.assert_allclose(A, dense_laplacian_oracle(net), atol=1e-12)
    for a, p in enumerate(net.node_layers()):
        assert A[a, a] == pytest.approx(multidegree(net, p), abs=1e-12)
    if net.n_total > 1:
        assert (eigs[1] > 1e-9) == (union_find_components(net) == 1) == is_connected(net)
