"""Hüsler–Reiss matrix completion on a graph.

Given variogram values on the edges of a connected graph, find the variogram
that agrees on the edges and whose precision matrix vanishes off the graph.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CompletionFailed, DisconnectedGraph, RequiresProjection
from .hr import is_valid_variogram, theta_from_variogram

COMPLETION_TOL = 1e-10
COMPLETION_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class GraphEstimate:
    graph: object
    gamma: np.ndarray
    theta: np.ndarray
    rho: float = float("nan")
    scores: dict = field(default_factory=dict)
    method: str = ""


def _tree_completion(gamma, graph):
    d = graph.d
    out = np.zeros((d, d))
    adj = {v: graph.neighbors(v) for v in range(d)}
    for root in range(d):
        # depth-first accumulation of path sums from every root
        stack = [root]
        seen = {root}
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    out[root, w] = out[root, v] + gamma[min(v, w), max(v, w)]
                    stack.append(w)
    return 0.5 * (out + out.T)


def _mcs_order(graph):
    """Maximum cardinality search; returns the order and each vertex's earlier neighbours."""
    d = graph.d
    adj = graph.adjacency()
    weight = np.zeros(d, dtype=int)
    done = np.zeros(d, dtype=bool)
    order, earlier = [], []
    for _ in range(d):
        cand = np.where(~done)[0]
        v = int(cand[np.argmax(weight[cand])])
        earlier.append([u for u in order if adj[v, u]])
        order.append(v)
        done[v] = True
        weight[adj[v] & ~done] += 1
    return order, earlier


def _is_clique(adj, vs):
    return all(adj[a, b] for ai, a in enumerate(vs) for b in vs[ai + 1:])


def _chordal_completion(gamma, graph):
    order, earlier = _mcs_order(graph)
    adj = graph.adjacency()
    if not all(_is_clique(adj, s) for s in earlier):
        return None
    d = graph.d
    out = np.zeros((d, d))
    placed = [order[0]]
    for v, sep in zip(order[1:], earlier[1:]):
        k = sep[0]
        c = sep[1:]
        for s in sep:
            out[v, s] = out[s, v] = gamma[v, s]
        for u in placed:
            if u in sep:
                continue

            def sig(a, b):
                return 0.5 * (out[a, k] + out[b, k] - out[a, b])

            if c:
                s_vc = np.array([sig(v, x) for x in c])
                s_cc = np.array([[sig(x, y) for y in c] for x in c])
                s_cu = np.array([sig(x, u) for x in c])
                s_vu = s_vc @ np.linalg.solve(s_cc, s_cu)
            else:
                s_vu = 0.0
            out[v, u] = out[u, v] = out[v, k] + out[u, k] - 2.0 * s_vu
        placed.append(v)
    return out


def _offgraph_residual(gamma, mask):
    theta = theta_from_variogram(gamma)
    return float(np.max(np.abs(theta[mask]), initial=0.0)), theta


def _iterative_completion(gamma, graph, tol, max_sweeps):
    d = graph.d
    g = gamma.copy()
    pairs = graph.non_edges()
    mask = ~graph.adjacency()
    np.fill_diagonal(mask, False)
    res = np.inf
    for _ in range(max_sweeps):
        for i, j in pairs:
            k = next(x for x in range(d) if x not in (i, j))
            r = [x for x in range(d) if x not in (i, j, k)]
            gi, gj = g[i, k], g[j, k]
            if r:
                rk = g[r, k]
                s_ir = 0.5 * (gi + rk - g[i, r])
                s_jr = 0.5 * (gj + rk - g[j, r])
                s_rr = 0.5 * (rk[:, None] + rk[None, :] - g[np.ix_(r, r)])
                s_ij = s_ir @ np.linalg.solve(s_rr, s_jr)
            else:
                s_ij = 0.0
            g[i, j] = g[j, i] = gi + gj - 2.0 * s_ij
        res, _ = _offgraph_residual(g, mask)
        if res < tol:
            return g
    raise CompletionFailed("iterative completion did not converge", res)


def complete_variogram(gamma, graph, tol=COMPLETION_TOL, max_sweeps=COMPLETION_MAX_SWEEPS, method=""):
    """Complete ``gamma`` from its edge values so that ``theta`` is zero off ``graph``.

    Trees use path sums, chordal graphs a clique-by-clique construction and
    all other graphs cyclic one-entry updates started from ``gamma`` (which
    must then be a valid variogram).
    """
    gamma = np.asarray(gamma, dtype=float)
    d = graph.d
    if not graph.is_connected():
        raise DisconnectedGraph(f"graph has {len(graph.components())} components")
    if len(graph) == d * (d - 1) // 2:
        out = gamma.copy()
    elif graph.is_tree():
        out = _tree_completion(gamma, graph)
    else:
        out = _chordal_completion(gamma, graph)
        if out is None:
            if not is_valid_variogram(gamma):
                raise RequiresProjection("iterative completion needs a valid starting variogram")
            out = _iterative_completion(gamma, graph, tol, max_sweeps)
    np.fill_diagonal(out, 0.0)
    theta = theta_from_variogram(out)
    return GraphEstimate(graph, out, theta, method=method)
