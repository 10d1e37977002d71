"""Covariance-form lasso by cyclic coordinate descent, and a graphical lasso built on it."""

import numba
import numpy as np

CD_TOL = 1e-8
CD_MAX_SWEEPS = 10_000


@numba.njit(cache=True)
def _soft(z, t):
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


@numba.njit(cache=True)
def lasso_cd(a, b, rho, beta, tol=CD_TOL, max_sweeps=CD_MAX_SWEEPS):
    """Minimize ``beta'a beta/2 - b'beta + rho |beta|_1`` in place.

    ``beta`` is the warm start.  Returns the number of sweeps used; a value
    equal to ``max_sweeps`` means the tolerance was not reached.
    """
    p = b.shape[0]
    grad = b - a @ beta
    for sweep in range(max_sweeps):
        delta = 0.0
        for j in range(p):
            old = beta[j]
            z = grad[j] + a[j, j] * old
            new = _soft(z, rho) / a[j, j]
            if new != old:
                diff = new - old
                for k in range(p):
                    grad[k] -= a[k, j] * diff
                beta[j] = new
                if abs(diff) > delta:
                    delta = abs(diff)
        if delta < tol:
            return sweep + 1
    return max_sweeps


def glasso(s, rho, w_init=None, betas=None, tol=1e-8, max_iter=1000):
    """Friedman's block coordinate graphical lasso with an unpenalized diagonal.

    Returns ``(w, betas)`` where column ``j`` of ``betas`` holds the lasso
    coefficients of variable ``j`` on the others; its zero pattern is the
    estimated precision pattern.
    """
    s = np.asarray(s, dtype=float)
    p = s.shape[0]
    w = s.copy() if w_init is None else w_init.copy()
    betas = np.zeros((p - 1, p)) if betas is None else betas.copy()
    if p == 1:
        return w, betas
    scale = np.mean(np.abs(s[~np.eye(p, dtype=bool)])) or 1.0
    idx = [np.array([k for k in range(p) if k != j]) for j in range(p)]
    for _ in range(max_iter):
        w_old = w.copy()
        for j in range(p):
            r = idx[j]
            a = np.ascontiguousarray(w[np.ix_(r, r)])
            beta = betas[:, j].copy()
            lasso_cd(a, s[r, j].copy(), rho, beta)
            betas[:, j] = beta
            col = a @ beta
            w[r, j] = col
            w[j, r] = col
        if np.mean(np.abs(w - w_old)) < tol * scale:
            break
    return w, betas
