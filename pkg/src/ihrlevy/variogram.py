"""Orthant-conditioned variogram estimation and empirical Lévy correlations.

Within an orthant subsample the marginal ECDFs are taken on absolute
values, so the tail that matters in a negative orthant is ``D -> -inf``.
"""

import warnings
from dataclasses import dataclass

import numba
import numpy as np

from .errors import EmptySubsample, InsufficientData, InvalidK
from .ising import orthant_label


def _data(d):
    return np.asarray(getattr(d, "data", d), dtype=float)


def default_q(n):
    return float(n) ** -0.3


def default_k(n):
    return int(np.floor(float(n) ** 0.7))


def orthant_ecdf(values, x):
    """Right-continuous ECDF of ``values`` evaluated at ``x``."""
    values = np.sort(np.asarray(values, dtype=float).ravel())
    if values.size == 0:
        raise EmptySubsample("ECDF of an empty subsample")
    return np.searchsorted(values, x, side="right") / values.size


@numba.njit(cache=True)
def _triple_ecdf(absd, code, valid, order, col, n_groups, out):
    # out[s] = #{t in group(s): |D_t,col| <= |D_s,col|}; tie blocks share the count
    n = absd.shape[0]
    cnt = np.zeros(n_groups, dtype=np.int64)
    p = 0
    while p < n:
        q = p
        v = absd[order[p], col]
        while q < n and absd[order[q], col] == v:
            q += 1
        for t in range(p, q):
            s = order[t]
            if valid[s]:
                cnt[code[s]] += 1
        for t in range(p, q):
            s = order[t]
            if valid[s]:
                out[s] = cnt[code[s]]
        p = q


@numba.njit(cache=True)
def _gamma_cells(absd, neg, nonzero, order, q):
    n, d = absd.shape
    value = np.zeros((d, d, d, 8))
    n_o = np.zeros((d, d, d, 8), dtype=np.int64)
    size = np.zeros((d, d, d, 8), dtype=np.int64)
    code = np.empty(n, dtype=np.int64)
    valid = np.empty(n, dtype=np.bool_)
    ri = np.zeros(n, dtype=np.int64)
    rj = np.zeros(n, dtype=np.int64)
    rm = np.zeros(n, dtype=np.int64)
    xs = np.empty(n)
    for i in range(d):
        for j in range(i + 1, d):
            for m in range(d):
                cnt = np.zeros(8, dtype=np.int64)
                for s in range(n):
                    valid[s] = nonzero[s, i] and nonzero[s, j] and nonzero[s, m]
                    code[s] = neg[s, i] + 2 * neg[s, j] + 4 * neg[s, m]
                    if valid[s]:
                        cnt[code[s]] += 1
                _triple_ecdf(absd, code, valid, order[i], i, 8, ri)
                _triple_ecdf(absd, code, valid, order[j], j, 8, rj)
                if m == i:
                    rm[:] = ri
                elif m == j:
                    rm[:] = rj
                else:
                    _triple_ecdf(absd, code, valid, order[m], m, 8, rm)
                for o in range(8):
                    no = cnt[o]
                    n_o[i, j, m, o] = no
                    if no == 0:
                        continue
                    a = (no + 1.0) / no
                    k = 0
                    tot = 0.0
                    for s in range(n):
                        if valid[s] and code[s] == o and rm[s] / no > 1.0 - q:
                            x = np.log(a - ri[s] / no) - np.log(a - rj[s] / no)
                            xs[k] = x
                            tot += x
                            k += 1
                    size[i, j, m, o] = k
                    if k < 2:
                        continue
                    mean = tot / k
                    ss = 0.0
                    for t in range(k):
                        ss += (xs[t] - mean) ** 2
                    value[i, j, m, o] = ss / (k + 1.0)
    return value, n_o, size


@dataclass(frozen=True)
class VariogramEstimate:
    """Pooled estimate and per-cell diagnostics indexed ``[i, j, m, o]`` with ``i < j``."""

    gamma: np.ndarray
    cell_value: np.ndarray
    cell_n: np.ndarray
    cell_size: np.ndarray
    n: int
    q: float

    def diagnostics(self):
        """Rows ``(i, j, m, orthant label, n_Jo, S_size, cell_value)``, 0-based indices."""
        d = self.gamma.shape[0]
        rows = []
        for i in range(d):
            for j in range(i + 1, d):
                for m in range(d):
                    for o in range(8):
                        if self.cell_n[i, j, m, o]:
                            rows.append((i, j, m, orthant_label(o, 3), int(self.cell_n[i, j, m, o]),
                                         int(self.cell_size[i, j, m, o]), float(self.cell_value[i, j, m, o])))
        return rows


def _warn_ties(absd, nonzero):
    for c in range(absd.shape[1]):
        v = np.sort(absd[nonzero[:, c], c])
        if v.size > 1 and np.any(v[1:] == v[:-1]):
            warnings.warn(f"column {c + 1} has tied values; ECDFs use plain counts", RuntimeWarning, stacklevel=3)


def gamma_hat(panel, q=None):
    """Pooled orthant-conditioned variogram estimate.

    ``Gamma_ij = (1/d) sum_m sum_o (n_Jo / n) Gamma^(m,o)_ij`` where each cell is
    the empirical variance (normalized by ``|S| + 1``) of
    ``log(a - F_i) - log(a - F_j)``, ``a = (n_Jo + 1)/n_Jo``, over rows of the
    orthant subsample with ``F_m > 1 - q``.  Cells with fewer than two rows
    contribute zero.
    """
    x = _data(panel)
    n, d = x.shape
    if n < 10:
        raise InsufficientData(f"need at least 10 rows, got {n}")
    q = default_q(n) if q is None else float(q)
    if not 0 < q <= 0.5:
        raise ValueError("q must lie in (0, 1/2]")
    absd = np.ascontiguousarray(np.abs(x))
    neg = np.ascontiguousarray(x < 0).astype(np.int64)
    nonzero = np.ascontiguousarray(x != 0)
    _warn_ties(absd, nonzero)
    order = np.ascontiguousarray(np.argsort(absd, axis=0, kind="stable").T)
    value, n_o, size = _gamma_cells(absd, neg, nonzero, order, q)
    g = np.einsum("ijmo,ijmo->ij", value, n_o / n) / d
    g = g + g.T
    return VariogramEstimate(g, value, n_o, size, n, q)


def chi_components(panel, k=None):
    """The four empirical Lévy correlation components for all pairs.

    Returns a dict keyed by ``(o1, o2)`` in ``{1, -1}^2`` of ``d x d`` arrays
    ``(1/k) #{t: D_ti in the o1-tail, D_tj in the o2-tail}``, where the
    positive tail is ``F_i > 1 - k/(2n)`` and the negative one ``F_i < k/(2n)``
    with full-panel ECDFs.
    """
    x = _data(panel)
    n = x.shape[0]
    k = default_k(n) if k is None else k
    if not 1 <= k <= n:
        raise InvalidK(f"k must lie in [1, {n}], got {k}")
    # F_i(D_ti) is the right-continuous count, i.e. the max rank within ties
    srt = np.sort(x, axis=0)
    f = np.empty_like(x)
    for c in range(x.shape[1]):
        f[:, c] = np.searchsorted(srt[:, c], x[:, c], side="right") / n
    h = k / (2.0 * n)
    tails = {1: (f - 1.0 + h > 0).astype(float), -1: (-f + h > 0).astype(float)}
    return {(a, b): tails[a].T @ tails[b] / k for a in (1, -1) for b in (1, -1)}


def chi_hat(panel, i, j, o1, o2, k=None):
    """Single component ``chi^(o1,o2)_ij``."""
    x = _data(panel)[:, [i, j]]
    return float(chi_components(x, k)[(o1, o2)][0, 1])


def chi_total(components):
    """Empirical Lévy correlation: the sum of the four components."""
    return sum(components.values())
