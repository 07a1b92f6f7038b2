import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_network, union_find_components
from mlsaddle.network import (
    MultilayerNetwork,
    NetworkParseError,
    NetworkValidationError,
    NodeLayerId,
    build_paper_networks,
    dump_network,
    is_connected,
    load_network,
    parse_network,
    read_network,
    save_network,
    scaled_weight,
)

TWO_LAYER_FILE = """\
# two-layer experiment
layers: 3 5
dinter 1 2 0.5
intra 1 1 2 1.0
intra 1 2 3 1.0
intra 2 1 2 1
intra 2 2 3 1
intra 2 3 4 1
intra 2 4 5 1
inter 1 1 2 2 1.0
inter 1 3 2 4 1.0
"""


def test_load_two_layer_file():
    net = load_network(TWO_LAYER_FILE.encode())
    assert net.layers == (3, 5)
    assert net.n_total == 8
    assert len(net.inter_edges) == 2
    assert net.inter_scale(0, 1) == 0.5
    assert net == build_paper_networks("two-layer")


def test_load_single_node():
    net = load_network(b"layers: 1\n")
    assert net.n_total == 1
    assert is_connected(net)


def test_load_from_file_object_and_path(tmp_path):
    net = load_network(io.BytesIO(TWO_LAYER_FILE.encode()))
    path = tmp_path / "net.txt"
    path.write_text(TWO_LAYER_FILE)
    assert read_network(path)[0] == net


def test_asymmetric_pair_rejected():
    src = "layers: 3\nintra 1 1 2 1.0\nintra 1 2 1 0.5\n"
    with pytest.raises(NetworkValidationError) as exc:
        load_network(src)
    assert exc.value.invariant == "asymmetry"


def test_both_directions_same_weight_accepted():
    net = load_network("layers: 2 2\ninter 1 1 2 2 0.7\ninter 2 2 1 1 0.7\n")
    assert net.inter_edges == (((0, 0), (1, 1), 0.7),)


@pytest.mark.parametrize("src, invariant", [
    ("layers: 3\nintra 1 2 2 1.0\n", "self-loop"),
    ("layers: 3\nintra 1 1 4 1.0\n", "index-out-of-range"),
    ("layers: 3 2\ninter 1 1 3 1 1.0\n", "index-out-of-range"),
    ("layers: 3\nintra 1 1 2 -1.0\n", "negative-weight"),
    ("layers: 3 2\ndinter 1 2 -0.1\n", "negative-weight"),
    ("layers: 3 2\ninter 1 1 1 2 1.0\n", "same-layer-inter-edge"),
])
def test_invariant_violations(src, invariant):
    with pytest.raises(NetworkValidationError) as exc:
        load_network(src)
    assert exc.value.invariant == invariant


@pytest.mark.parametrize("src, line, field", [
    ("layers: 3\nintra 1 1 x 1.0\n", 2, "j"),
    ("layers: 3\nintra 1 1 2\n", 2, "intra"),
    ("layers: 3\n\nfoo 1 2\n", 3, "kind"),
    ("layers: 3\ngamma 1 1 abc\n", 2, "value"),
    ("layers: 3\nlayers: 2\n", 2, "layers"),
])
def test_parse_errors_carry_location(src, line, field):
    with pytest.raises(NetworkParseError) as exc:
        load_network(src)
    assert exc.value.line == line
    assert exc.value.field == field
    assert f"line {line}" in str(exc.value)


def test_missing_header():
    with pytest.raises(NetworkParseError):
        load_network("intra 1 1 2 1.0\n")


def test_gamma_lines():
    net, gamma = parse_network("layers: 2 1\ngamma 1 2 0.5\ngamma 2 1 -1.5\n")
    assert gamma == {NodeLayerId(1, 0): 0.5, NodeLayerId(0, 1): -1.5}


def test_scaled_weight():
    net = build_paper_networks("two-layer")
    assert scaled_weight(net, (0, 0), (1, 0)) == 1.0
    assert scaled_weight(net, (0, 0), (1, 1)) == 0.5
    assert scaled_weight(net, (1, 1), (0, 0)) == 0.5
    assert scaled_weight(net, (0, 0), (2, 0)) == 0.0
    assert scaled_weight(net, (0, 0), (0, 1)) == 0.0
    with pytest.raises(IndexError):
        scaled_weight(net, (3, 0), (0, 0))


def test_intra_scale_applies():
    net = build_paper_networks("two-layer").with_scales(intra={1: 2.5})
    assert scaled_weight(net, (0, 1), (1, 1)) == 2.5
    assert scaled_weight(net, (0, 0), (1, 0)) == 1.0


def test_builtin_topologies():
    two = build_paper_networks("TwoLayer")
    assert two.n_total == 8 and len(two.inter_edges) == 2
    assert {(a, b) for a, b, _ in two.inter_edges} == {((0, 0), (1, 1)), ((2, 0), (3, 1))}

    four = build_paper_networks("FourLayer")
    assert four.layers == (3, 4, 5, 6) and four.n_total == 18
    # every node of layer 1 reaches each of layers 2, 3, 4
    for i in range(3):
        for k in (1, 2, 3):
            assert sum(1 for (a, b, _) in four.inter_edges if a == (i, 0) and b[1] == k) == 1
    from_l2 = [(a, b) for a, b, _ in four.inter_edges if a[1] == 1]
    assert len({a for a, _ in from_l2}) == 2
    assert sorted(b[1] for _, b in from_l2) == [2, 2, 3, 3]
    assert four.inter_scales == {(0, 1): 0.1, (0, 2): 0.5, (0, 3): 0.2, (1, 2): 0.1, (1, 3): 0.1, (2, 3): 0.3}

    mux = build_paper_networks("Multiplex2x5")
    assert mux.layers == (5, 5)
    assert [(a, b) for a, b, _ in mux.inter_edges] == [((i, 0), (i, 1)) for i in range(5)]
    assert mux.inter_scale(0, 1) == 0.4

    for net in (two, four, mux):
        assert is_connected(net)
    with pytest.raises(ValueError):
        build_paper_networks("three-layer")


def test_disconnected_layers():
    net = MultilayerNetwork.build([2, 2], [(0, 0, 1, 1.0), (1, 0, 1, 1.0)])
    assert not is_connected(net)
    assert not is_connected(build_paper_networks("two-layer").with_scales(inter={(0, 1): 0.0}))


def test_network_is_immutable():
    net = build_paper_networks("two-layer")
    with pytest.raises(AttributeError):
        net.layers = (1,)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_connectivity_matches_union_find(seed):
    net = random_network(np.random.default_rng(seed), p_extra=float(np.random.default_rng(seed).uniform(0, 0.3)))
    assert is_connected(net) == (union_find_components(net) == 1)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng)
    gamma = {p: float(rng.normal()) for p in net.node_layers() if rng.random() < 0.5}
    text = dump_network(net, gamma)
    net2, gamma2 = parse_network(text)
    assert net2 == net
    assert gamma2 == gamma


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_scaled_weight_symmetric(seed):
    net = random_network(np.random.default_rng(seed))
    for a, b, w in net.scaled_edges():
        assert scaled_weight(net, a, b) == scaled_weight(net, b, a) == w


def test_save_network(tmp_path):
    net = build_paper_networks("four-layer")
    save_network(net, tmp_path / "f.txt", comments=["hello"])
    text = (tmp_path / "f.txt").read_text()
    assert text.startswith("# hello\n")
    assert read_network(tmp_path / "f.txt")[0] == net
