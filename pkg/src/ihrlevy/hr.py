"""Hüsler–Reiss parametrizations and related closed-form quantities.

Indices are 0-based throughout the Python API.  A variogram ``gamma`` is a
symmetric, zero-diagonal, strictly conditionally negative definite matrix;
the matching precision ``theta = (P (-gamma/2) P)^+`` is positive
semidefinite with the one-vector spanning its kernel.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from .errors import DimensionMismatch, DomainError, InvalidPrecision, InvalidVariogram, RequiresProjection

KERNEL_RTOL = 1e-10
EDGE_TOL = 1e-8
GAMMA_FLOOR = 1e-6


def centering(d):
    return np.eye(d) - np.full((d, d), 1.0 / d)


def _complement_basis(d):
    # orthonormal basis of the orthogonal complement of the one-vector
    q, _ = np.linalg.qr(np.column_stack([np.ones(d), np.eye(d)[:, : d - 1]]))
    return q[:, 1:]


def _check_square(a, name):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise DimensionMismatch(f"{name} needs dimension >= 2")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    return a


def _sym_tol(a):
    return 1e-10 * max(1.0, np.max(np.abs(a)))


def _covariance_from_variogram(gamma):
    d = gamma.shape[0]
    p = centering(d)
    s = p @ (-0.5 * gamma) @ p
    return 0.5 * (s + s.T)


def variogram_from_covariance(sigma):
    """``gamma_ij = sigma_ii + sigma_jj - 2 sigma_ij``."""
    sigma = np.asarray(sigma, dtype=float)
    dg = np.diag(sigma)
    g = dg[:, None] + dg[None, :] - 2.0 * sigma
    np.fill_diagonal(g, 0.0)
    return 0.5 * (g + g.T)


def _variogram_spectrum(gamma):
    s = _covariance_from_variogram(gamma)
    lam, vec = np.linalg.eigh(s)
    return lam, vec


def validate_variogram(gamma):
    """Return ``gamma`` as a float array or raise :class:`InvalidVariogram`."""
    gamma = _check_square(gamma, "variogram")
    tol = _sym_tol(gamma)
    if np.max(np.abs(gamma - gamma.T)) > tol:
        raise InvalidVariogram("variogram is not symmetric")
    if np.max(np.abs(np.diag(gamma))) > tol:
        raise InvalidVariogram("variogram has a nonzero diagonal")
    lam, _ = _variogram_spectrum(gamma)
    top = max(lam[-1], 0.0)
    if top <= 0:
        raise InvalidVariogram("variogram is not conditionally negative definite")
    small = np.abs(lam) <= KERNEL_RTOL * top
    if np.any(lam < -KERNEL_RTOL * top) or small.sum() != 1:
        raise InvalidVariogram("variogram is not strictly conditionally negative definite")
    off = gamma[~np.eye(gamma.shape[0], dtype=bool)]
    if np.any(off <= 0):
        raise InvalidVariogram("variogram has non-positive off-diagonal entries")
    return 0.5 * (gamma + gamma.T)


def is_valid_variogram(gamma):
    try:
        validate_variogram(gamma)
    except (InvalidVariogram, DimensionMismatch, DomainError):
        return False
    return True


def theta_from_variogram(gamma):
    """Precision matrix ``(P (-gamma/2) P)^+`` of a valid variogram."""
    gamma = validate_variogram(gamma)
    lam, vec = _variogram_spectrum(gamma)
    keep = lam > KERNEL_RTOL * lam[-1]
    theta = (vec[:, keep] / lam[keep]) @ vec[:, keep].T
    # re-centre so that theta @ 1 vanishes to rounding
    theta = theta - theta.mean(axis=0)[None, :]
    theta = theta - theta.mean(axis=1)[:, None]
    return 0.5 * (theta + theta.T)


def validate_precision(theta):
    theta = _check_square(theta, "precision")
    d = theta.shape[0]
    tol = _sym_tol(theta)
    if np.max(np.abs(theta - theta.T)) > tol:
        raise InvalidPrecision("precision matrix is not symmetric")
    if np.max(np.abs(theta @ np.ones(d))) > tol:
        raise InvalidPrecision("precision matrix does not annihilate the one-vector")
    lam = np.linalg.eigvalsh(0.5 * (theta + theta.T))
    top = lam[-1]
    if top <= 0:
        raise InvalidPrecision("precision matrix has rank 0")
    if np.any(lam < -KERNEL_RTOL * top) or np.sum(lam > KERNEL_RTOL * top) != d - 1:
        raise InvalidPrecision("precision matrix must be positive semidefinite of rank d-1")
    return 0.5 * (theta + theta.T)


def variogram_from_theta(theta):
    """Inverse of :func:`theta_from_variogram`."""
    theta = validate_precision(theta)
    lam, vec = np.linalg.eigh(theta)
    keep = lam > KERNEL_RTOL * lam[-1]
    sigma = (vec[:, keep] / lam[keep]) @ vec[:, keep].T
    return variogram_from_covariance(sigma)


def r_theta(theta, gamma):
    """Linear coefficient ``-theta gamma 1 / (2d)`` of the exponential-family form."""
    d = theta.shape[0]
    return -theta @ gamma @ np.ones(d) / (2.0 * d)


def sigma_k(gamma, m):
    """Covariance of ``log(X_i / X_m)``, ``i != m``, under the HR law.

    Equals ``inverse(theta without row/column m)``.  Raises
    :class:`RequiresProjection` when the result is not positive definite.
    """
    gamma = np.asarray(gamma, dtype=float)
    d = gamma.shape[0]
    idx = np.array([i for i in range(d) if i != m])
    gm = gamma[idx, m]
    s = 0.5 * (gm[:, None] + gm[None, :] - gamma[np.ix_(idx, idx)])
    s = 0.5 * (s + s.T)
    try:
        np.linalg.cholesky(s)
    except np.linalg.LinAlgError:
        raise RequiresProjection(f"Sigma^({m + 1}) is not positive definite; project the variogram first") from None
    return s


def hr_exponent_density(x, gamma, k=0):
    """Density of the HR exponent measure on the positive orthant.

    Uses the representation conditional on component ``k``:
    ``phi(log(x_i/x_k) + gamma_ik/2; Sigma^(k)) x_k^-2 prod_{i!=k} x_i^-1``.
    ``x`` may have shape ``(d,)`` or ``(n, d)``.
    """
    gamma = np.asarray(gamma, dtype=float)
    x = np.asarray(x, dtype=float)
    d = gamma.shape[0]
    if x.shape[-1] != d:
        raise DimensionMismatch(f"x has {x.shape[-1]} components, variogram has {d}")
    if not 0 <= k < d:
        raise ValueError(f"k must be in [0, {d - 1}]")
    if np.any(x <= 0):
        raise DomainError("the exponent density is defined for strictly positive x only")
    lx = np.log(x)
    idx = [i for i in range(d) if i != k]
    s = sigma_k(gamma, k)
    z = lx[..., idx] - lx[..., [k]] + gamma[idx, k] / 2.0
    chol = np.linalg.cholesky(s)
    w = np.linalg.solve(chol, np.moveaxis(np.atleast_2d(z), -1, 0))
    quad = np.sum(w * w, axis=0)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    logphi = -0.5 * quad - 0.5 * logdet - 0.5 * (d - 1) * np.log(2 * np.pi)
    out = np.exp(logphi - 2.0 * lx[..., k] - np.sum(np.atleast_2d(lx[..., idx]), axis=-1).reshape(logphi.shape))
    return out[0] if x.ndim == 1 else out


def hr_density_unnormalized(x, gamma):
    """``exp(-log(x)' theta log(x)/2 + log(x)' r) prod x_i^(-1-1/d)`` without ``c_theta``."""
    gamma = np.asarray(gamma, dtype=float)
    theta = theta_from_variogram(gamma)
    r = r_theta(theta, gamma)
    d = gamma.shape[0]
    lx = np.log(np.asarray(x, dtype=float))
    quad = np.einsum("...i,ij,...j->...", lx, theta, lx)
    return np.exp(-0.5 * quad + lx @ r - (1.0 + 1.0 / d) * lx.sum(axis=-1))


def hr_normalizing_constant(gamma):
    """``c_theta``; the unnormalized form equals one at the one-vector."""
    d = np.asarray(gamma).shape[0]
    return float(hr_exponent_density(np.ones(d), gamma))


def extremal_coefficient(gamma, n_mc=2**16):
    """Exponent-measure mass of ``{max_i x_i > 1}``.

    Exact for ``d <= 3``.  For larger ``d`` the rejection-sampler identity
    ``sum_k E[ int_0^1 du / (1 + #{i != k: exp(z_i) > u}) ]`` with
    ``z ~ N(-gamma_.k/2, Sigma^(k))`` is averaged over a fixed random stream,
    so the value is deterministic for a given ``gamma``.
    """
    gamma = np.asarray(gamma, dtype=float)
    d = gamma.shape[0]
    if d == 1:
        return 1.0
    if d == 2:
        return float(2.0 * stats.norm.cdf(np.sqrt(gamma[0, 1]) / 2.0))
    total = 0.0
    if d == 3:
        for k in range(d):
            idx = [i for i in range(d) if i != k]
            total += stats.multivariate_normal.cdf(gamma[idx, k] / 2.0, mean=np.zeros(2), cov=sigma_k(gamma, k))
        return float(total)
    from .rng import make_rng

    rng = make_rng(0, "extremal-coefficient")
    for k in range(d):
        idx = [i for i in range(d) if i != k]
        chol = np.linalg.cholesky(sigma_k(gamma, k))
        z = -gamma[idx, k] / 2.0 + rng.standard_normal((n_mc, d - 1)) @ chol.T
        w = -np.sort(-np.minimum(np.exp(z), 1.0), axis=1)
        w = np.column_stack([np.ones(n_mc), w, np.zeros(n_mc)])
        total += np.mean(np.sum((w[:, :-1] - w[:, 1:]) / np.arange(1, d + 1), axis=1))
    return float(total)


def chi_from_gamma(g):
    """Extremal (Lévy) correlation ``2 - 2 Phi(sqrt(g)/2)``."""
    g = np.asarray(g, dtype=float)
    if np.any(g <= 0):
        raise DomainError("chi_from_gamma needs strictly positive variogram entries")
    out = 2.0 * stats.norm.sf(np.sqrt(g) / 2.0)
    return float(out) if out.ndim == 0 else out


def gamma_from_chi(chi):
    chi = np.asarray(chi, dtype=float)
    if np.any((chi <= 0) | (chi >= 2)):
        raise DomainError("chi must lie in (0, 2)")
    out = (2.0 * stats.norm.isf(chi / 2.0)) ** 2
    return float(out) if out.ndim == 0 else out


def project_cnd(m, floor=GAMMA_FLOOR):
    """Project a symmetric zero-diagonal matrix onto valid variograms.

    The centred matrix ``P(-m/2)P`` is restricted to the complement of the
    one-vector, its eigenvalues are clipped from below, the variogram is
    rebuilt and off-diagonal entries are floored at ``floor``.  Valid input is
    returned unchanged.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch("project_cnd expects a square matrix")
    m = 0.5 * (m + m.T)
    np.fill_diagonal(m, 0.0)
    if is_valid_variogram(m):
        return m.copy()
    d = m.shape[0]
    u = _complement_basis(d)
    a = u.T @ (-0.5 * m) @ u
    lam, vec = np.linalg.eigh(0.5 * (a + a.T))
    scale = max(np.max(np.abs(lam)), floor)
    lam = np.maximum(lam, 1e-8 * scale)
    s = u @ ((vec * lam) @ vec.T) @ u.T
    g = variogram_from_covariance(s)
    off = ~np.eye(d, dtype=bool)
    g[off] = np.maximum(g[off], floor)
    if not is_valid_variogram(g):
        # uniform shift by c(11'-I) keeps strict CND and lifts every entry
        g = variogram_from_covariance(s)
        g = g + max(floor - g[off].min(), 0.0) * (1.0 - np.eye(d))
    return g


def edges_from_params(theta, psi, tol=EDGE_TOL):
    """Conditional-independence graph of an IHR model.

    ``(i, j)`` is an edge unless ``theta_ij == 0`` (up to ``tol``) and
    ``psi_ij == 0``.
    """
    from .graph import Graph

    psi_m = getattr(psi, "psi", psi)
    theta = np.asarray(theta, dtype=float)
    psi_m = np.asarray(psi_m, dtype=float)
    if theta.shape != psi_m.shape or theta.ndim != 2:
        raise DimensionMismatch(f"theta {theta.shape} and psi {psi_m.shape} differ")
    adj = (np.abs(theta) > tol) | (np.abs(psi_m) > 0)
    np.fill_diagonal(adj, False)
    return Graph.from_adjacency(adj)


@dataclass(frozen=True)
class HRParams:
    """A Hüsler–Reiss parameter held as a variogram with its precision."""

    gamma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gamma", validate_variogram(self.gamma))

    @classmethod
    def from_variogram(cls, gamma):
        return cls(np.asarray(gamma, dtype=float))

    @classmethod
    def from_precision(cls, theta):
        return cls(variogram_from_theta(theta))

    @property
    def d(self):
        return self.gamma.shape[0]

    @cached_property
    def theta(self):
        return theta_from_variogram(self.gamma)

    @cached_property
    def extremal_coefficient(self):
        return extremal_coefficient(self.gamma)

    def sigma(self, k):
        return sigma_k(self.gamma, k)

    def graph(self, tol=EDGE_TOL):
        from .graph import Graph

        adj = np.abs(self.theta) > tol
        np.fill_diagonal(adj, False)
        return Graph.from_adjacency(adj)
