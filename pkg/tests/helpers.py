"""Random multilayer networks and an independent connectivity oracle."""

import numpy as np

from mlsaddle.network import MultilayerNetwork


def random_network(rng, max_layers=4, max_total=12, connected=None, p_extra=0.25):
    """Random network with M <= max_layers and N_tot <= max_total.

    ``connected=True`` threads a random spanning tree through all node-layer
    pairs first; ``connected=None`` just draws edges at random.
    """
    M = int(rng.integers(1, max_layers + 1))
    total = int(rng.integers(M, max_total + 1))
    cuts = np.sort(rng.choice(np.arange(1, total), size=M - 1, replace=False)) if M > 1 else []
    layers = np.diff(np.concatenate(([0], cuts, [total]))).astype(int).tolist()
    pairs = [(i, h) for h, n in enumerate(layers) for i in range(n)]

    edges = {}
    if connected:
        order = rng.permutation(len(pairs))
        for k in range(1, len(order)):
            a, b = pairs[order[k]], pairs[order[rng.integers(0, k)]]
            edges[frozenset((a, b))] = float(rng.uniform(0.1, 2.0))
    for x in range(len(pairs)):
        for y in range(x + 1, len(pairs)):
            if rng.random() < p_extra:
                edges.setdefault(frozenset((pairs[x], pairs[y])), float(rng.uniform(0.1, 2.0)))

    intra, inter = [], []
    for e, w in edges.items():
        (i, h), (j, k) = sorted(e, key=lambda p: (p[1], p[0]))
        if h == k:
            intra.append((h, i, j, w))
        else:
            inter.append(((i, h), (j, k), w))
    intra_scales = rng.uniform(0.2, 2.0, M).tolist()
    inter_scales = {(h, k): float(rng.uniform(0.05, 3.0)) for h in range(M) for k in range(h + 1, M)}
    return MultilayerNetwork.build(layers, intra, inter, intra_scales, inter_scales)


def union_find_components(net):
    """Number of components of the positive-weight supra graph (brute force)."""
    pairs = net.node_layers()
    parent = {p: p for p in pairs}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    for h, i, j, w in net.intra_edges:
        if w * net.intra_scales[h] > 0:
            parent[find((i, h))] = find((j, h))
    for (i, h), (j, k), w in net.inter_edges:
        if w * net.inter_scale(h, k) > 0:
            parent[find((i, h))] = find((j, k))
    return len({find(p) for p in pairs})


def dense_laplacian_oracle(net):
    """Supra Laplacian from explicit double loops over node-layer pairs."""
    from mlsaddle.network import scaled_weight

    pairs = net.node_layers()
    n = len(pairs)
    L = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            if a != b:
                L[a, b] = -scaled_weight(net, pairs[a], pairs[b])
        L[a, a] = -L[a].sum()
    return L
