"""Combinatorial Laplacian tensor of a multilayer network.

The Laplacian is assembled from the rank-4 adjacency tensor ``W[i, h, j, k]``
(node i of layer h to node j of layer k, padded to the largest layer) as
``L = Delta - W`` where the multistrength tensor ``Delta`` is diagonal with
entries ``k_ih = sum_{j,k} W[i, h, j, k]``. Padding entries belong to no
node-layer pair and are dropped when flattening, so the supra operator has
exactly ``sum(layers)`` rows, ordered layer-major, node-minor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import NodeLayerId

__all__ = [
    "NumericalError",
    "SupraIndexMap",
    "LaplacianTensor",
    "adjacency_tensor",
    "algebraic_connectivity",
    "build_laplacian",
    "multidegree",
    "multiplex_supra_laplacian",
    "spectrum",
    "spectrum_csv",
]

TOL_PSD = 1e-9


class NumericalError(ArithmeticError):
    """Eigensolver or integrator failure."""


@dataclass(frozen=True)
class SupraIndexMap:
    """Bijection between node-layer pairs and ``range(n_total)``."""

    layers: tuple

    @property
    def offsets(self):
        return np.concatenate(([0], np.cumsum(self.layers))).astype(int)

    @property
    def n_total(self):
        return int(sum(self.layers))

    def forward(self, a):
        i, h = a
        if not (0 <= h < len(self.layers) and 0 <= i < self.layers[h]):
            raise IndexError(f"node-layer pair {tuple(a)} out of range for layers {list(self.layers)}")
        return int(self.offsets[h] + i)

    def backward(self, index):
        if not 0 <= index < self.n_total:
            raise IndexError(f"flat index {index} out of range [0, {self.n_total})")
        h = int(np.searchsorted(self.offsets, index, side="right") - 1)
        return NodeLayerId(int(index - self.offsets[h]), h)

    def layer_slice(self, h):
        off = self.offsets
        return slice(int(off[h]), int(off[h + 1]))

    def pad_mask(self):
        """Boolean ``(n_max, M)`` mask of real (non-padding) entries."""
        n_max = max(self.layers)
        return np.arange(n_max)[:, None] < np.asarray(self.layers)[None, :]


@dataclass(frozen=True, eq=False)
class LaplacianTensor:
    """Flattened (supra) Laplacian with its index map.

    ``entries[a, b]`` is l_ij(hk) for a = (i, h), b = (j, k). The array is
    read-only.
    """

    entries: np.ndarray
    index_map: SupraIndexMap

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n_total(self):
        return self.entries.shape[0]

    def matvec(self, x):
        return self.entries @ x

    def to_rank4(self):
        """Padded ``(n_max, M, n_max, M)`` tensor view of the entries."""
        mask = self.index_map.pad_mask()
        n_max, M = mask.shape
        # mask is indexed (node, layer); flatten layer-major to match supra order
        real = mask.T.ravel()
        full = np.zeros((M * n_max, M * n_max))
        full[np.ix_(real, real)] = self.entries
        return full.reshape(M, n_max, M, n_max).transpose(1, 0, 3, 2)


def adjacency_tensor(net):
    """Scaled multilayer adjacency tensor ``W[i, h, j, k]`` padded to n_max."""
    n_max, M = max(net.layers), net.n_layers
    W = np.zeros((n_max, M, n_max, M))
    for a, b, w in net.scaled_edges():
        W[a.node, a.layer, b.node, b.layer] = w
        W[b.node, b.layer, a.node, a.layer] = w
    return W


def _multistrength(W):
    # k_ih = sum over all layers k and nodes j of w_ij(hk)
    return np.einsum("ihjk->ih", W)


def multidegree(net, a):
    """Total scaled weight incident on node-layer pair ``a = (node, layer)``."""
    i, h = a
    if not (0 <= h < net.n_layers and 0 <= i < net.layers[h]):
        raise IndexError(f"node-layer pair {tuple(a)} out of range for layers {list(net.layers)}")
    return float(_multistrength(adjacency_tensor(net))[i, h])


def build_laplacian(net):
    """Laplacian tensor ``Delta - W`` flattened over the real node-layer pairs."""
    index_map = SupraIndexMap(tuple(net.layers))
    W = adjacency_tensor(net)
    n_max, M = W.shape[:2]
    strength = _multistrength(W)
    delta = np.einsum("ih,ij,hk->ihjk", strength, np.eye(n_max), np.eye(M))
    L4 = delta - W
    # (i, h, j, k) -> (h, i, k, j) so that reshaping gives layer-major order
    flat = L4.transpose(1, 0, 3, 2).reshape(M * n_max, M * n_max)
    real = index_map.pad_mask().T.ravel()
    return LaplacianTensor(flat[np.ix_(real, real)], index_map)


def multiplex_supra_laplacian(layer_laplacians, coupling):
    """Supra-Laplacian of a multiplex from per-layer Laplacians.

    ``blockdiag(L_1, ..., L_M) + (D_K - D)`` with ``D`` the symmetric ``M x M``
    matrix of interlayer diffusion constants (zero diagonal), ``D_K`` its
    degree matrix, and each coupling entry expanded by the identity over
    replica nodes.
    """
    blocks = [np.asarray(L, dtype=float) for L in layer_laplacians]
    n = blocks[0].shape[0]
    if any(B.shape != (n, n) for B in blocks):
        raise ValueError("multiplex layers must all have the same number of nodes")
    M = len(blocks)
    D = np.asarray(coupling, dtype=float)
    if D.ndim == 0:
        D = D * (np.ones((M, M)) - np.eye(M))
    inter = np.diag(D.sum(axis=1)) - D
    out = np.kron(inter, np.eye(n))
    for h, B in enumerate(blocks):
        out[h * n:(h + 1) * n, h * n:(h + 1) * n] += B
    return out


def spectrum(lap):
    """All eigenvalues of the supra Laplacian, ascending."""
    A = lap.entries if isinstance(lap, LaplacianTensor) else np.asarray(lap, dtype=float)
    if not np.all(np.isfinite(A)):
        raise NumericalError(f"Laplacian has {np.count_nonzero(~np.isfinite(A))} non-finite entries")
    asym = np.max(np.abs(A - A.T)) if A.size else 0.0
    if asym > 0:
        raise NumericalError(f"Laplacian is not symmetric (max |L - L^T| = {asym:.3e})")
    try:
        return np.linalg.eigvalsh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigvalsh failed on {A.shape[0]}x{A.shape[0]} Laplacian "
            f"(max |entry| = {np.max(np.abs(A)):.3e}): {exc}") from exc


def algebraic_connectivity(lap):
    """Second smallest eigenvalue (0.0 for a single node-layer pair)."""
    eigs = spectrum(lap)
    return float(eigs[1]) if eigs.size > 1 else 0.0


def spectrum_csv(eigenvalues, snap=1e-12):
    """``index,value`` lines without header. Values within ``snap`` of zero
    (relative to the largest eigenvalue) are written as 0."""
    eigs = np.asarray(eigenvalues, dtype=float)
    scale = max(1.0, float(np.max(np.abs(eigs)))) if eigs.size else 1.0
    lines = []
    for n, v in enumerate(eigs):
        if abs(v) <= snap * scale:
            v = 0.0
        lines.append(f"{n},{v:.12g}")
    return "\n".join(lines) + "\n"
