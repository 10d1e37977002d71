"""Zero-field Ising models on {-1, 1}^d and the orthant weights they induce.

Orthants are indexed by integers ``s`` in ``[0, 2^d)``: bit ``i`` of ``s`` set
means ``o_i = -1``.  Hence ``s = 0`` is the all-positive orthant.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import DimensionMismatch, DimensionTooLarge, InvalidWeights
from .graph import Graph

MAX_ENUM_D = 25


def orthant_signs(d, states=None):
    """Sign vectors of the given orthant indices, shape ``(len(states), d)``."""
    if states is None:
        states = np.arange(2**d, dtype=np.int64)
    states = np.asarray(states, dtype=np.int64)
    bits = (states[:, None] >> np.arange(d)) & 1
    return (1 - 2 * bits).astype(np.int8)


def orthant_index(x):
    """Orthant index of each row of ``x``; zeros count as positive."""
    x = np.atleast_2d(np.asarray(x))
    d = x.shape[1]
    return ((x < 0).astype(np.int64) << np.arange(d)).sum(axis=1)


def orthant_label(s, d):
    """``'1'`` for a positive and ``'0'`` for a negative component, first component leftmost."""
    return "".join("0" if (s >> i) & 1 else "1" for i in range(d))


def parse_orthant_label(label):
    return sum(1 << i for i, ch in enumerate(label) if ch == "0")


def _check_enum(d):
    if d > MAX_ENUM_D:
        raise DimensionTooLarge(f"exact enumeration needs d <= {MAX_ENUM_D}, got {d}")


def pair_products(d, edges, states=None):
    """``o_i o_j`` for every state and edge as an int8 array ``(n_states, |E|)``."""
    if states is None:
        states = np.arange(2**d, dtype=np.int64)
    out = np.empty((len(states), len(edges)), dtype=np.int8)
    for c, (i, j) in enumerate(edges):
        out[:, c] = 1 - 2 * (((states >> i) ^ (states >> j)) & 1)
    return out


def _energies(d, edges, values):
    states = np.arange(2**d, dtype=np.int64)
    e = np.zeros(2**d)
    for (i, j), v in zip(edges, values):
        if v != 0.0:
            e += v * (1 - 2 * (((states >> i) ^ (states >> j)) & 1))
    return e


@dataclass(frozen=True)
class IsingModel:
    """Interaction matrix ``psi`` supported on ``graph``; no external fields."""

    psi: np.ndarray
    graph: Graph

    def __post_init__(self):
        psi = np.array(self.psi, dtype=float)
        d = self.graph.d
        if psi.shape != (d, d):
            raise DimensionMismatch(f"psi has shape {psi.shape}, graph has d={d}")
        if not np.allclose(psi, psi.T, rtol=0, atol=1e-12) or np.any(np.diag(psi) != 0):
            raise ValueError("psi must be symmetric with zero diagonal")
        if not np.all(np.isfinite(psi)):
            raise ValueError("psi has non-finite entries")
        off = np.abs(psi) > 0
        off[self.graph.adjacency()] = False
        if np.any(off):
            raise ValueError("support of psi is not contained in the edge set")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @classmethod
    def zeros(cls, graph):
        return cls(np.zeros((graph.d, graph.d)), graph)

    @classmethod
    def from_edges(cls, d, values, graph=None):
        """Build from a mapping ``{(i, j): psi_ij}``; the graph defaults to its keys."""
        graph = graph if graph is not None else Graph(d, values.keys())
        psi = np.zeros((d, d))
        for (i, j), v in values.items():
            psi[i, j] = psi[j, i] = v
        return cls(psi, graph)

    @classmethod
    def from_vector(cls, graph, vec):
        edges = graph.sorted_edges()
        return cls.from_edges(graph.d, dict(zip(edges, np.asarray(vec, dtype=float))), graph)

    @property
    def d(self):
        return self.graph.d

    @property
    def edges(self):
        return self.graph.sorted_edges()

    def edge_values(self):
        return np.array([self.psi[i, j] for i, j in self.edges])

    def log_partition(self):
        """``log C(psi)`` by exact enumeration."""
        _check_enum(self.d)
        return float(logsumexp(_energies(self.d, self.edges, self.edge_values())))

    def probabilities(self):
        """``P(B = o)`` for every orthant index."""
        _check_enum(self.d)
        e = _energies(self.d, self.edges, self.edge_values())
        return np.exp(e - logsumexp(e))


@dataclass(frozen=True)
class OrthantWeights:
    """Nonnegative weights ``gamma_o`` summing to one on each half-space ``{o_i = a}``."""

    gamma: np.ndarray
    d: int = field(init=False)

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float).ravel()
        d = int(round(np.log2(len(g)))) if len(g) else -1
        if d < 1 or 2**d != len(g):
            raise InvalidWeights("weight vector length must be a power of two")
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise InvalidWeights("weights must be finite and nonnegative")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "d", d)

    @classmethod
    def uniform(cls, d):
        return cls(np.full(2**d, 2.0 ** (1 - d)))

    def marginal_sums(self):
        """Array ``(d, 2)``: column 0 sums over ``o_i = +1``, column 1 over ``o_i = -1``."""
        states = np.arange(2**self.d, dtype=np.int64)
        out = np.empty((self.d, 2))
        for i in range(self.d):
            neg = ((states >> i) & 1).astype(bool)
            out[i, 0] = self.gamma[~neg].sum()
            out[i, 1] = self.gamma[neg].sum()
        return out

    def validate(self, tol=1e-10):
        err = np.max(np.abs(self.marginal_sums() - 1.0))
        if err > tol:
            raise InvalidWeights(f"marginal constraint violated by {err:.3e}")
        return self

    def probabilities(self):
        return self.gamma / 2.0

    def pair_positive_mass(self, i, j):
        """``m_ij``: half the weight of orthants with ``o_i o_j = 1``."""
        states = np.arange(2**self.d, dtype=np.int64)
        same = (((states >> i) ^ (states >> j)) & 1) == 0
        return float(self.gamma[same].sum() / 2.0)

    def labels(self):
        return [orthant_label(s, self.d) for s in range(2**self.d)]


def ising_weights(model):
    """Orthant weights ``gamma_o = 2 P_psi(B = o)``."""
    return OrthantWeights(2.0 * model.probabilities())


def tree_weights(model):
    """Product form of the weights on a tree.

    ``gamma_o = prod_E m_ij^[o_i o_j > 0] (1 - m_ij)^[o_i o_j < 0]`` with
    ``m_ij = e^(2 psi_ij) / (1 + e^(2 psi_ij))``.
    """
    if not model.graph.is_tree():
        raise ValueError("tree_weights needs a tree")
    d = model.d
    _check_enum(d)
    states = np.arange(2**d, dtype=np.int64)
    logp = np.full(2**d, -np.log(2.0))
    for i, j in model.edges:
        m = 1.0 / (1.0 + np.exp(-2.0 * model.psi[i, j]))
        same = (((states >> i) ^ (states >> j)) & 1) == 0
        logp += np.where(same, np.log(m), np.log1p(-m))
    return OrthantWeights(2.0 * np.exp(logp))
