"""Multilayer network data model, text format and builtin topologies.

A network is a list of layers with possibly different node counts, weighted
undirected edges inside each layer and between arbitrary node-layer pairs of
different layers. Edge weights are multiplied by per-layer (intra) and
per-layer-pair (inter) diffusion scales.

Text format (1-based indices, ``#`` starts a comment)::

    layers: 3 5
    dintra 1 1.0
    dinter 1 2 0.5
    intra 1 1 2 1.0
    inter 1 1 2 2 1.0
    gamma 2 4 -0.3

``intra h i j w`` is an edge between nodes i and j of layer h.
``inter h i k j w`` is an edge between node i of layer h and node j of layer k.
``gamma h i value`` sets the linear coefficient of the quadratic cost of
node i in layer h. An edge may be listed once or in both directions; both
directions must carry the same weight.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field, replace
from typing import Mapping, NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "NodeLayerId",
    "MultilayerNetwork",
    "NetworkParseError",
    "NetworkValidationError",
    "BUILTIN_NAMES",
    "build_paper_networks",
    "dump_network",
    "is_connected",
    "load_network",
    "parse_network",
    "read_network",
    "save_network",
    "scaled_weight",
]

BUILTIN_NAMES = ("two-layer", "four-layer", "multiplex-2x5")

# D^{2->4} is not given for the four-layer experiment.
ASSUMED_FOUR_LAYER_SCALES = {(1, 3): 0.1}


class NetworkParseError(ValueError):
    """Malformed network file. Carries the 1-based line number and field."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class NetworkValidationError(ValueError):
    """A network invariant is violated.

    ``invariant`` is one of ``"asymmetry"``, ``"self-loop"``,
    ``"index-out-of-range"``, ``"negative-weight"``, ``"empty"``,
    ``"same-layer-inter-edge"``, ``"duplicate-edge"``.
    """

    def __init__(self, invariant, message):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")


class NodeLayerId(NamedTuple):
    """Node ``node`` of layer ``layer``, both 0-based."""

    node: int
    layer: int


@dataclass(frozen=True)
class MultilayerNetwork:
    """Immutable weighted undirected multilayer network.

    Use :meth:`build` to construct from raw edge lists; it checks symmetry
    when an edge is given in both directions and canonicalizes storage.

    Attributes
    ----------
    layers : tuple of int
        Node count of every layer.
    intra_edges : tuple of (layer, i, j, w)
        Intralayer edges with ``i < j``, sorted.
    inter_edges : tuple of ((i, h), (j, k), w)
        Interlayer edges with ``h < k``, sorted.
    intra_scales : tuple of float
        Scale D^h applied to the intralayer weights of every layer.
    inter_scales : mapping (h, k) -> float
        Scale D^{h->k} applied to interlayer weights, ``h < k``. Pairs not
        present default to 1.
    """

    layers: tuple
    intra_edges: tuple = ()
    inter_edges: tuple = ()
    intra_scales: tuple = None
    inter_scales: Mapping = field(default_factory=dict)

    def __post_init__(self):
        layers = tuple(int(n) for n in self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers or sum(layers) < 1 or any(n < 0 for n in layers):
            raise NetworkValidationError(
                "empty", f"need at least one node in total, got layers {list(layers)}")
        if self.intra_scales is None:
            object.__setattr__(self, "intra_scales", (1.0,) * len(layers))
        else:
            object.__setattr__(self, "intra_scales", tuple(float(d) for d in self.intra_scales))
        object.__setattr__(
            self, "inter_scales", {(int(h), int(k)): float(d) for (h, k), d in self.inter_scales.items()})
        object.__setattr__(self, "intra_edges", tuple(self.intra_edges))
        object.__setattr__(self, "inter_edges", tuple(self.inter_edges))
        self._validate()

    def _validate(self):
        M = len(self.layers)
        if len(self.intra_scales) != M:
            raise NetworkValidationError(
                "index-out-of-range", f"{len(self.intra_scales)} intra scales for {M} layers")
        for h, d in enumerate(self.intra_scales):
            if not np.isfinite(d) or d < 0:
                raise NetworkValidationError("negative-weight", f"intra scale of layer {h + 1} is {d}")
        for (h, k), d in self.inter_scales.items():
            if not (0 <= h < k < M):
                raise NetworkValidationError(
                    "index-out-of-range", f"inter scale for layer pair ({h + 1}, {k + 1})")
            if not np.isfinite(d) or d < 0:
                raise NetworkValidationError(
                    "negative-weight", f"inter scale of layers ({h + 1}, {k + 1}) is {d}")
        seen = set()
        for h, i, j, w in self.intra_edges:
            self._check_node(i, h)
            self._check_node(j, h)
            if i == j:
                raise NetworkValidationError("self-loop", f"node {i + 1} of layer {h + 1}")
            if i > j:
                raise NetworkValidationError(
                    "asymmetry", "intra edges must be stored with i < j; use MultilayerNetwork.build")
            _check_weight(w, f"intra edge ({h + 1}: {i + 1}-{j + 1})")
            key = (NodeLayerId(i, h), NodeLayerId(j, h))
            if key in seen:
                raise NetworkValidationError("duplicate-edge", f"intra edge ({h + 1}: {i + 1}-{j + 1})")
            seen.add(key)
        for (i, h), (j, k), w in self.inter_edges:
            self._check_node(i, h)
            self._check_node(j, k)
            if h == k:
                raise NetworkValidationError(
                    "same-layer-inter-edge", f"inter edge inside layer {h + 1}")
            if h > k:
                raise NetworkValidationError(
                    "asymmetry", "inter edges must be stored with h < k; use MultilayerNetwork.build")
            _check_weight(w, f"inter edge ({i + 1},{h + 1})-({j + 1},{k + 1})")
            key = (NodeLayerId(i, h), NodeLayerId(j, k))
            if key in seen:
                raise NetworkValidationError(
                    "duplicate-edge", f"inter edge ({i + 1},{h + 1})-({j + 1},{k + 1})")
            seen.add(key)

    def _check_node(self, node, layer):
        if not (0 <= layer < len(self.layers)):
            raise NetworkValidationError(
                "index-out-of-range", f"layer {layer + 1} (network has {len(self.layers)} layers)")
        if not (0 <= node < self.layers[layer]):
            raise NetworkValidationError(
                "index-out-of-range",
                f"node {node + 1} of layer {layer + 1} (layer has {self.layers[layer]} nodes)")

    @classmethod
    def build(cls, layers, intra_edges=(), inter_edges=(), intra_scales=None, inter_scales=None):
        """Validate and canonicalize raw, 0-based edge lists.

        Parameters
        ----------
        layers : sequence of int
        intra_edges : iterable of (h, i, j, w)
        inter_edges : iterable of ((i, h), (j, k), w)
        intra_scales : sequence of float, optional
        inter_scales : mapping (h, k) -> float, optional
            Either ordering of the pair is accepted.

        Raises
        ------
        NetworkValidationError
            When an edge is listed in both directions with different
            weights, or on any other invariant violation.
        """
        layers = tuple(int(n) for n in layers)
        edges = {}

        def add(a, b, w):
            w = float(w)
            if a == b:
                raise NetworkValidationError("self-loop", f"node {a.node + 1} of layer {a.layer + 1}")
            key = (a, b) if (a.layer, a.node) < (b.layer, b.node) else (b, a)
            if key in edges and edges[key] != w:
                raise NetworkValidationError(
                    "asymmetry",
                    f"w({_fmt(a)}, {_fmt(b)}) = {w} but the reverse direction is {edges[key]}")
            edges[key] = w

        for h, i, j, w in intra_edges:
            add(NodeLayerId(int(i), int(h)), NodeLayerId(int(j), int(h)), w)
        for (i, h), (j, k), w in inter_edges:
            if int(h) == int(k):
                raise NetworkValidationError(
                    "same-layer-inter-edge", f"inter edge inside layer {int(h) + 1}")
            add(NodeLayerId(int(i), int(h)), NodeLayerId(int(j), int(k)), w)

        intra, inter = [], []
        for (a, b), w in sorted(edges.items()):
            if a.layer == b.layer:
                intra.append((a.layer, a.node, b.node, w))
            else:
                inter.append(((a.node, a.layer), (b.node, b.layer), w))

        scales = {}
        for (h, k), d in (inter_scales or {}).items():
            pair = (min(h, k), max(h, k))
            if pair in scales and scales[pair] != float(d):
                raise NetworkValidationError(
                    "asymmetry", f"conflicting inter scales for layers ({h + 1}, {k + 1})")
            scales[pair] = float(d)
        return cls(layers, tuple(sorted(intra)), tuple(sorted(inter)), intra_scales, scales)

    @property
    def n_layers(self):
        return len(self.layers)

    @property
    def n_total(self):
        """Number of node-layer pairs."""
        return sum(self.layers)

    def node_layers(self):
        """All node-layer pairs in layer-major, node-minor order."""
        return [NodeLayerId(i, h) for h, n in enumerate(self.layers) for i in range(n)]

    def inter_scale(self, h, k):
        return self.inter_scales.get((min(h, k), max(h, k)), 1.0)

    def with_scales(self, intra=None, inter=None):
        """Copy with some diffusion scales replaced.

        ``intra`` maps layer -> D, ``inter`` maps (h, k) -> D (0-based).
        """
        intra_scales = list(self.intra_scales)
        for h, d in (intra or {}).items():
            intra_scales[h] = float(d)
        inter_scales = dict(self.inter_scales)
        for (h, k), d in (inter or {}).items():
            inter_scales[(min(h, k), max(h, k))] = float(d)
        return replace(self, intra_scales=tuple(intra_scales), inter_scales=inter_scales)

    def scaled_edges(self):
        """Yield ``(a, b, w_scaled)`` for every stored edge, once."""
        for h, i, j, w in self.intra_edges:
            yield NodeLayerId(i, h), NodeLayerId(j, h), w * self.intra_scales[h]
        for (i, h), (j, k), w in self.inter_edges:
            yield NodeLayerId(i, h), NodeLayerId(j, k), w * self.inter_scale(h, k)


def _check_weight(w, what):
    if not np.isfinite(w) or w < 0:
        raise NetworkValidationError("negative-weight", f"{what} has weight {w}")


def _fmt(a):
    return f"({a.node + 1},{a.layer + 1})"


def scaled_weight(net, a, b):
    """Weight between two node-layer pairs after applying diffusion scales.

    Returns 0.0 when there is no edge.
    """
    a, b = NodeLayerId(*a), NodeLayerId(*b)
    for x in (a, b):
        if not (0 <= x.layer < net.n_layers and 0 <= x.node < net.layers[x.layer]):
            raise IndexError(f"node-layer pair {x} out of range for layers {list(net.layers)}")
    if a.layer == b.layer:
        i, j = sorted((a.node, b.node))
        for h, p, q, w in net.intra_edges:
            if h == a.layer and p == i and q == j:
                return w * net.intra_scales[h]
        return 0.0
    lo, hi = (a, b) if a.layer < b.layer else (b, a)
    for (i, h), (j, k), w in net.inter_edges:
        if (i, h) == (lo.node, lo.layer) and (j, k) == (hi.node, hi.layer):
            return w * net.inter_scale(h, k)
    return 0.0


def is_connected(net):
    """True iff the supra graph of positive scaled edges has one component."""
    n = net.n_total
    if n == 1:
        return True
    offsets = np.concatenate(([0], np.cumsum(net.layers)))
    rows, cols = [], []
    for a, b, w in net.scaled_edges():
        if w > 0:
            rows.append(offsets[a.layer] + a.node)
            cols.append(offsets[b.layer] + b.node)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    n_comp, _ = connected_components(graph, directed=False)
    return n_comp == 1


# --------------------------------------------------------------------------
# text format

def parse_network(source):
    """Parse the network text format.

    Parameters
    ----------
    source : bytes, str or file object
        The file *content* (UTF-8 when bytes) or an open file.

    Returns
    -------
    net : MultilayerNetwork
    gamma : dict of NodeLayerId -> float
        Quadratic cost coefficients listed in the file (may be empty).
    """
    text = _read_text(source)
    layers = None
    intra, inter, gamma = [], [], {}
    intra_scales, inter_scales = {}, {}
    pending = []  # (lineno, kind, values) checked once layers are known

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("layers:") or line.split()[0] == "layers":
            if layers is not None:
                raise NetworkParseError("duplicate layers header", lineno, "layers")
            body = line[len("layers:"):] if line.startswith("layers:") else line[len("layers"):]
            layers = [_int(tok, lineno, f"N{n + 1}") for n, tok in enumerate(body.split())]
            if not layers:
                raise NetworkParseError("layers header lists no layers", lineno, "layers")
            if any(n < 0 for n in layers):
                raise NetworkParseError("negative layer size", lineno, "layers")
            continue
        kind, *fields = line.split()
        spec = _RECORDS.get(kind)
        if spec is None:
            raise NetworkParseError(f"unknown record {kind!r}", lineno, "kind")
        if len(fields) != len(spec):
            raise NetworkParseError(
                f"{kind} expects {len(spec)} fields ({' '.join(spec)}), got {len(fields)}", lineno, kind)
        values = []
        for name, tok in zip(spec, fields):
            if name in ("D", "w", "value"):
                values.append(_float(tok, lineno, name))
            else:
                values.append(_int(tok, lineno, name))
        pending.append((lineno, kind, values))

    if layers is None:
        raise NetworkParseError("missing 'layers:' header")

    M = len(layers)

    def layer_idx(h, lineno, name):
        if not 1 <= h <= M:
            raise NetworkValidationError(
                "index-out-of-range", f"line {lineno}: {name}={h} but there are {M} layers")
        return h - 1

    def node_idx(i, h0, lineno, name):
        if not 1 <= i <= layers[h0]:
            raise NetworkValidationError(
                "index-out-of-range",
                f"line {lineno}: {name}={i} but layer {h0 + 1} has {layers[h0]} nodes")
        return i - 1

    for lineno, kind, v in pending:
        if kind == "dintra":
            h = layer_idx(v[0], lineno, "h")
            intra_scales[h] = v[1]
        elif kind == "dinter":
            h, k = layer_idx(v[0], lineno, "h"), layer_idx(v[1], lineno, "k")
            if h == k:
                raise NetworkValidationError(
                    "same-layer-inter-edge", f"line {lineno}: dinter needs two different layers")
            pair = (min(h, k), max(h, k))
            if pair in inter_scales and inter_scales[pair] != v[2]:
                raise NetworkValidationError(
                    "asymmetry", f"line {lineno}: conflicting dinter for layers ({h + 1}, {k + 1})")
            inter_scales[pair] = v[2]
        elif kind == "intra":
            h = layer_idx(v[0], lineno, "h")
            intra.append((h, node_idx(v[1], h, lineno, "i"), node_idx(v[2], h, lineno, "j"), v[3]))
        elif kind == "inter":
            h, k = layer_idx(v[0], lineno, "h"), layer_idx(v[2], lineno, "k")
            inter.append(((node_idx(v[1], h, lineno, "i"), h), (node_idx(v[3], k, lineno, "j"), k), v[4]))
        elif kind == "gamma":
            h = layer_idx(v[0], lineno, "h")
            gamma[NodeLayerId(node_idx(v[1], h, lineno, "i"), h)] = v[2]

    scales = [intra_scales.get(h, 1.0) for h in range(M)]
    net = MultilayerNetwork.build(layers, intra, inter, scales, inter_scales)
    return net, gamma


_RECORDS = {
    "dintra": ("h", "D"),
    "dinter": ("h", "k", "D"),
    "intra": ("h", "i", "j", "w"),
    "inter": ("h", "i", "k", "j", "w"),
    "gamma": ("h", "i", "value"),
}


def _read_text(source):
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _int(tok, lineno, name):
    try:
        return int(tok)
    except ValueError:
        raise NetworkParseError(f"expected an integer, got {tok!r}", lineno, name) from None


def _float(tok, lineno, name):
    try:
        return float(tok)
    except ValueError:
        raise NetworkParseError(f"expected a number, got {tok!r}", lineno, name) from None


def load_network(source):
    """Parse network text (bytes, str content or file object) into a network."""
    return parse_network(source)[0]


def read_network(path):
    """Read a network file from disk. Returns ``(net, gamma)``."""
    with open(path, "rb") as fh:
        return parse_network(fh)


def dump_network(net, gamma=None, comments=()):
    """Serialize to the text format. Floats are written with ``repr`` so
    that ``load_network(dump_network(net)) == net``."""
    out = io.StringIO()
    for c in comments:
        out.write(f"# {c}\n")
    out.write("layers: " + " ".join(str(n) for n in net.layers) + "\n")
    for h, d in enumerate(net.intra_scales):
        out.write(f"dintra {h + 1} {d!r}\n")
    for (h, k), d in sorted(net.inter_scales.items()):
        out.write(f"dinter {h + 1} {k + 1} {d!r}\n")
    for h, i, j, w in net.intra_edges:
        out.write(f"intra {h + 1} {i + 1} {j + 1} {w!r}\n")
    for (i, h), (j, k), w in net.inter_edges:
        out.write(f"inter {h + 1} {i + 1} {k + 1} {j + 1} {w!r}\n")
    items = ((NodeLayerId(*a), g) for a, g in (gamma or {}).items())
    for a, g in sorted(items, key=lambda kv: (kv[0].layer, kv[0].node)):
        out.write(f"gamma {a.layer + 1} {a.node + 1} {float(g)!r}\n")
    return out.getvalue()


def save_network(net, path, gamma=None, comments=()):
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_network(net, gamma, comments))


# --------------------------------------------------------------------------
# builtin experiment topologies

def _path(h, n):
    return [(h, i, i + 1, 1.0) for i in range(n - 1)]


def _cycle(h, n):
    return _path(h, n) + [(h, n - 1, 0, 1.0)]


def build_paper_networks(which):
    """Topologies of the three consensus experiments.

    ``"two-layer"``
        Layers of 3 and 5 nodes, each a path; node 1 of layer 1 is linked to
        node 2 of layer 2 and node 3 of layer 1 to node 4 of layer 2.
        D^{1->2} = 0.5.
    ``"four-layer"``
        Layers of 3, 4, 5 and 6 nodes, each a path. Node i of layer 1 is
        linked to node i of layers 2, 3 and 4. Node 2 of layer 2 is linked
        to node 4 of layer 3 and node 4 of layer 4; node 4 of layer 2 is
        linked to node 5 of layer 3 and node 6 of layer 4.
        D^{1->2}=0.1, D^{1->3}=0.5, D^{1->4}=0.2, D^{2->3}=0.1,
        D^{2->4}=0.1 (assumed), D^{3->4}=0.3.
    ``"multiplex-2x5"``
        Two layers of 5 replica nodes, a 5-cycle and a 5-path, with one
        interlayer link per replica. D^{1->2} = 0.4.

    Intralayer edges have unit weight. ``which`` also accepts the enum-style
    names ``TwoLayer``, ``FourLayer`` and ``Multiplex2x5``.
    """
    name = _BUILTIN_ALIASES.get(which, which)
    if name == "two-layer":
        return MultilayerNetwork.build(
            [3, 5],
            _path(0, 3) + _path(1, 5),
            [((0, 0), (1, 1), 1.0), ((2, 0), (3, 1), 1.0)],
            inter_scales={(0, 1): 0.5},
        )
    if name == "four-layer":
        sizes = [3, 4, 5, 6]
        intra = [e for h, n in enumerate(sizes) for e in _path(h, n)]
        inter = [((i, 0), (i, k), 1.0) for i in range(3) for k in (1, 2, 3)]
        inter += [
            ((1, 1), (3, 2), 1.0), ((1, 1), (3, 3), 1.0),
            ((3, 1), (4, 2), 1.0), ((3, 1), (5, 3), 1.0),
        ]
        scales = {(0, 1): 0.1, (0, 2): 0.5, (0, 3): 0.2, (1, 2): 0.1, (2, 3): 0.3}
        scales.update(ASSUMED_FOUR_LAYER_SCALES)
        return MultilayerNetwork.build(sizes, intra, inter, inter_scales=scales)
    if name == "multiplex-2x5":
        return MultilayerNetwork.build(
            [5, 5],
            _cycle(0, 5) + _path(1, 5),
            [((i, 0), (i, 1), 1.0) for i in range(5)],
            inter_scales={(0, 1): 0.4},
        )
    raise ValueError(f"unknown builtin network {which!r}; expected one of {BUILTIN_NAMES}")


_BUILTIN_ALIASES = {
    "TwoLayer": "two-layer",
    "FourLayer": "four-layer",
    "Multiplex2x5": "multiplex-2x5",
}
