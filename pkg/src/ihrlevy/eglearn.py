"""Graph structure learning from a variogram estimate.

Both base learners work on every ``Sigma^(m)`` separately; an edge is kept
when at least ``ceil((d-2)/2)`` of the base nodes outside the pair vote for it.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .completion import GraphEstimate, complete_variogram
from .errors import DisconnectedGraph, InvalidPrecision, InvalidWeights
from .graph import Graph
from .hr import sigma_k
from .lasso import glasso, lasso_cd

__all__ = [
    "sigma_k", "neighborhood_selection", "graphical_lasso", "penalty_grid", "eglearn_path",
    "pseudo_loglik_ic", "mst_graph", "f1_score", "PenaltyPath",
]

log = logging.getLogger(__name__)
N_RHO = 32
RHO_RATIO = 1e-3
# coefficients smaller than this are zero; well above the solver's accuracy
ZERO_TOL = 1e-6


def _base_covariances(gamma):
    d = gamma.shape[0]
    return [sigma_k(gamma, m) for m in range(d)]


def _others(d, m):
    return np.array([i for i in range(d) if i != m])


def _vote(d, base_adj):
    """Combine per-base-node adjacency matrices (``d x d``, rows/cols of ``m`` unused)."""
    thresh = int(np.ceil((d - 2) / 2))
    votes = np.zeros((d, d), dtype=int)
    for m, a in enumerate(base_adj):
        a = a.copy()
        a[m, :] = a[:, m] = False
        votes += a
    adj = votes >= thresh
    np.fill_diagonal(adj, False)
    return Graph.from_adjacency(np.triu(adj, 1))


class _NSState:
    """Warm-start coefficients ``beta[m][l]`` for a neighbourhood-selection path."""

    def __init__(self, sigmas):
        self.sigmas = sigmas
        self.beta = [np.zeros((len(s), len(s) - 1)) for s in sigmas]

    def fit(self, rho):
        d = len(self.sigmas)
        base = []
        for m, s in enumerate(self.sigmas):
            p = len(s)
            nz = np.zeros((p, p), dtype=bool)
            for l in range(p):
                r = _others(p, l)
                a = np.ascontiguousarray(s[np.ix_(r, r)])
                b = np.ascontiguousarray(s[r, l])
                beta = self.beta[m][l]
                lasso_cd(a, b, rho, beta)
                # exact tree variograms put the lasso on its KKT boundary, where
                # coordinate descent only approaches zero geometrically
                nz[l, r] = np.abs(beta) > ZERO_TOL
            nz = nz | nz.T
            full = np.zeros((d, d), dtype=bool)
            idx = _others(d, m)
            full[np.ix_(idx, idx)] = nz
            base.append(full)
        return _vote(d, base)


class _GlassoState:
    def __init__(self, sigmas):
        self.sigmas = sigmas
        self.w = [s.copy() for s in sigmas]
        self.betas = [np.zeros((len(s) - 1, len(s))) for s in sigmas]

    def fit(self, rho):
        d = len(self.sigmas)
        base = []
        for m, s in enumerate(self.sigmas):
            p = len(s)
            self.w[m], self.betas[m] = glasso(s, rho, self.w[m], self.betas[m])
            nz = np.zeros((p, p), dtype=bool)
            for j in range(p):
                nz[_others(p, j), j] = np.abs(self.betas[m][:, j]) > ZERO_TOL
            nz = nz | nz.T
            full = np.zeros((d, d), dtype=bool)
            idx = _others(d, m)
            full[np.ix_(idx, idx)] = nz
            base.append(full)
        return _vote(d, base)


def neighborhood_selection(gamma, rho):
    """EGlearn with lasso regressions as the base learner."""
    gamma = np.asarray(gamma, dtype=float)
    return _NSState(_base_covariances(gamma)).fit(float(rho))


def graphical_lasso(gamma, rho):
    """EGlearn with the graphical lasso as the base learner."""
    gamma = np.asarray(gamma, dtype=float)
    return _GlassoState(_base_covariances(gamma)).fit(float(rho))


def rho_max(gamma):
    """Smallest penalty at which every base learner returns no edges."""
    out = 0.0
    for s in _base_covariances(np.asarray(gamma, dtype=float)):
        off = np.abs(s[~np.eye(len(s), dtype=bool)])
        if off.size:
            out = max(out, off.max())
    return out


def penalty_grid(gamma, n_rho=N_RHO, ratio=RHO_RATIO):
    """Increasing log-spaced grid from ``ratio * rho_max`` to ``rho_max``."""
    top = rho_max(gamma)
    return np.geomspace(top * ratio, top, n_rho)


def pseudo_loglik_ic(gamma, estimate, n, q, criterion="AIC"):
    """Information criterion of a completed estimate; smaller is better.

    ``-2 {log|theta|_+ + tr(gamma theta)/2} + penalty`` with penalty
    ``2|E|`` (AIC) or ``log(n q)|E|`` (BIC).
    """
    theta = np.asarray(estimate.theta, dtype=float)
    d = theta.shape[0]
    lam = np.linalg.eigvalsh(theta)
    pos = lam > 1e-10 * max(lam[-1], 0.0)
    if pos.sum() != d - 1 or lam[-1] <= 0:
        raise InvalidPrecision(f"precision matrix has rank {pos.sum()}, expected {d - 1}")
    logdet = np.sum(np.log(lam[pos]))
    fit = -2.0 * (logdet + 0.5 * np.sum(np.asarray(gamma) * theta))
    k = len(estimate.graph)
    crit = criterion.upper()
    if crit == "AIC":
        pen = 2.0 * k
    elif crit == "BIC":
        pen = np.log(n * q) * k
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    return float(fit + pen)


@dataclass
class PenaltyPath:
    """Graphs along an increasing penalty grid for one base learner."""

    rhos: np.ndarray
    graphs: list
    method: str
    estimates: list = field(default_factory=list)
    aic: np.ndarray = None
    bic: np.ndarray = None

    def edge_counts(self):
        return np.array([len(g) for g in self.graphs])

    def select(self, criterion="AIC"):
        scores = self.aic if criterion.upper() == "AIC" else self.bic
        if scores is None or not np.any(np.isfinite(scores)):
            raise DisconnectedGraph("no connected graph on the penalty path")
        i = int(np.argmin(scores))
        return i, self.estimates[i]


def eglearn_path(gamma, method="ns", rhos=None, n=None, q=None):
    """Run a base learner along a penalty grid, warm-started from the largest penalty.

    With ``n`` and ``q`` given, each connected graph is completed and scored
    by AIC and BIC; disconnected graphs score ``+inf``.
    """
    gamma = np.asarray(gamma, dtype=float)
    rhos = penalty_grid(gamma) if rhos is None else np.sort(np.asarray(rhos, dtype=float))
    sigmas = _base_covariances(gamma)
    state = _NSState(sigmas) if method == "ns" else _GlassoState(sigmas)
    graphs = [None] * len(rhos)
    for t in range(len(rhos) - 1, -1, -1):
        graphs[t] = state.fit(rhos[t])
    counts = [len(g) for g in graphs]
    if any(counts[t] < counts[t + 1] for t in range(len(counts) - 1)):
        log.info("%s path: edge count not monotone in rho: %s", method, counts)
    path = PenaltyPath(rhos, graphs, method)
    if n is not None:
        q = float(n) ** -0.3 if q is None else q
        cache = {}
        aic, bic, ests = [], [], []
        for rho, g in zip(rhos, graphs):
            if g.edges not in cache:
                try:
                    est = complete_variogram(gamma, g, method=method)
                    cache[g.edges] = (est, pseudo_loglik_ic(gamma, est, n, q, "AIC"),
                                      pseudo_loglik_ic(gamma, est, n, q, "BIC"))
                except DisconnectedGraph:
                    cache[g.edges] = (None, np.inf, np.inf)
            est, a, b = cache[g.edges]
            ests.append(est)
            aic.append(a)
            bic.append(b)
        path.estimates, path.aic, path.bic = ests, np.array(aic), np.array(bic)
    return path


def mst_graph(weights, kind="gamma"):
    """Minimum spanning tree by Kruskal's algorithm.

    ``kind='gamma'`` uses the weights as given; ``kind='chi'`` expects
    Lévy correlations and uses ``-log chi`` (zero maps to ``+inf``).  Ties are
    broken by lexicographic edge order.
    """
    w = np.asarray(weights, dtype=float)
    d = w.shape[0]
    if kind == "chi":
        if np.any(np.isnan(w)) or np.any(w < 0):
            raise InvalidWeights("Lévy correlations must be nonnegative")
        with np.errstate(divide="ignore"):
            w = -np.log(w)
    elif kind != "gamma":
        raise ValueError(f"unknown kind {kind!r}")
    elif not np.all(np.isfinite(w)):
        raise InvalidWeights("weights must be finite")
    iu, ju = np.triu_indices(d, 1)
    vals = w[iu, ju]
    order = np.lexsort((ju, iu, vals))
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for t in order:
        a, b = find(iu[t]), find(ju[t])
        if a != b:
            parent[a] = b
            edges.append((iu[t], ju[t]))
            if len(edges) == d - 1:
                break
    return Graph(d, edges)


def f1_score(true, est):
    """``2 TP / (2 TP + FP + FN)`` of an estimated edge set against the truth."""
    if true.d != est.d:
        raise ValueError("graphs have different dimensions")
    tp = len(true.edges & est.edges)
    fp = len(est.edges - true.edges)
    fn = len(true.edges - est.edges)
    denom = 2 * tp + fp + fn
    return 1.0 if denom == 0 else 2.0 * tp / denom
