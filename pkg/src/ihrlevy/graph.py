"""Undirected graphs on vertices ``0..d-1``.

Edges are stored as sorted pairs ``(i, j)`` with ``i < j``.  File I/O uses
1-based indices (see :mod:`ihrlevy.io`).
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np


def _norm_edge(i, j):
    i, j = int(i), int(j)
    if i == j:
        raise ValueError(f"self-loop at vertex {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class Graph:
    d: int
    edges: frozenset

    def __init__(self, d, edges=()):
        d = int(d)
        es = frozenset(_norm_edge(i, j) for i, j in edges)
        for i, j in es:
            if j >= d or i < 0:
                raise ValueError(f"edge ({i}, {j}) out of range for d={d}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "edges", es)

    @classmethod
    def complete(cls, d):
        return cls(d, combinations(range(d), 2))

    @classmethod
    def from_adjacency(cls, adj):
        adj = np.asarray(adj)
        d = adj.shape[0]
        iu, ju = np.triu_indices(d, 1)
        mask = (adj[iu, ju] != 0) | (adj[ju, iu] != 0)
        return cls(d, zip(iu[mask], ju[mask]))

    def __len__(self):
        return len(self.edges)

    def __contains__(self, edge):
        i, j = edge
        return (min(i, j), max(i, j)) in self.edges

    def __iter__(self):
        return iter(self.sorted_edges())

    def sorted_edges(self):
        return sorted(self.edges)

    def adjacency(self):
        a = np.zeros((self.d, self.d), dtype=bool)
        for i, j in self.edges:
            a[i, j] = a[j, i] = True
        return a

    def neighbors(self, v):
        return sorted({j for i, j in self.edges if i == v} | {i for i, j in self.edges if j == v})

    def non_edges(self):
        return [e for e in combinations(range(self.d), 2) if e not in self.edges]

    def components(self):
        parent = list(range(self.d))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            parent[find(i)] = find(j)
        groups = {}
        for v in range(self.d):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())

    def is_connected(self):
        return len(self.components()) == 1

    def is_tree(self):
        return len(self.edges) == self.d - 1 and self.is_connected()

    def path(self, i, j):
        """Edges on the unique path between ``i`` and ``j`` (trees only)."""
        adj = {v: self.neighbors(v) for v in range(self.d)}
        prev = {i: None}
        stack = [i]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in prev:
                    prev[w] = v
                    stack.append(w)
        if j not in prev:
            raise ValueError(f"no path between {i} and {j}")
        out = []
        v = j
        while prev[v] is not None:
            out.append(_norm_edge(v, prev[v]))
            v = prev[v]
        return out[::-1]
