"""Compound-Poisson simulation of IHR Lévy process increments.

The Pareto Lévy measure on the standardized scale is truncated at
``max_i |x_i| > eps``.  Smaller jumps are dropped and no compensating drift is
added; every estimator in this package is rank based, so only the bulk of
the marginal laws is affected.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, DomainError, InvalidSpec
from .hr import HRParams, extremal_coefficient, sigma_k
from .ising import IsingModel, OrthantWeights, _check_enum, ising_weights, orthant_signs

MAX_POISSON = 10**8
DEFAULT_EPS = 1e-3
_CHUNK_JUMPS = 2**21


@dataclass(frozen=True)
class IncrementPanel:
    """``n x d`` matrix of increments on a grid with spacing ``delta``."""

    data: np.ndarray
    delta: float = 1.0
    names: tuple = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2:
            raise DimensionMismatch("panel data must be two-dimensional")
        object.__setattr__(self, "data", data)
        names = self.names or tuple(f"X{i + 1}" for i in range(data.shape[1]))
        if len(names) != data.shape[1]:
            raise DimensionMismatch("number of names does not match number of columns")
        object.__setattr__(self, "names", tuple(names))

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def d(self):
        return self.data.shape[1]

    def head(self, n):
        return IncrementPanel(self.data[:n], self.delta, self.names)


@dataclass(frozen=True)
class ProcessSpec:
    """Full IHR specification.

    ``ising`` or ``weights`` fixes the orthant weights; with neither given the
    weights are uniform.
    """

    hr: HRParams
    alpha: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    tau: np.ndarray = None
    ising: IsingModel = None
    weights: OrthantWeights = field(default=None)

    def __post_init__(self):
        d = self.hr.d

        def vec(v, name, default=None):
            if v is None:
                v = default
            a = np.broadcast_to(np.asarray(v, dtype=float), (d,)).copy()
            a.setflags(write=False)
            object.__setattr__(self, name, a)
            return a

        try:
            alpha = vec(self.alpha, "alpha")
            cp = vec(self.c_plus, "c_plus")
            cm = vec(self.c_minus, "c_minus")
            vec(self.tau, "tau", 0.0)
        except ValueError as exc:
            raise InvalidSpec(f"marginal parameters do not match d={d}: {exc}") from None
        if np.any((alpha <= 0) | (alpha >= 2)) or not np.all(np.isfinite(alpha)):
            raise InvalidSpec("stability indices must lie in (0, 2)")
        if np.any(cp <= 0) or np.any(cm <= 0):
            raise InvalidSpec("scale constants must be positive")
        if self.ising is not None and self.ising.d != d:
            raise InvalidSpec("Ising model dimension does not match the variogram")
        w = self.weights
        if w is None:
            w = ising_weights(self.ising) if self.ising is not None else OrthantWeights.uniform(d)
        if w.d != d:
            raise InvalidSpec("orthant weight dimension does not match the variogram")
        try:
            w.validate()
        except Exception as exc:
            raise InvalidSpec(str(exc)) from None
        object.__setattr__(self, "weights", w)

    @property
    def d(self):
        return self.hr.d

    @property
    def gamma(self):
        return self.hr.gamma


def sample_rademacher(weights, rng, size=None):
    """Draw sign vectors with ``P(o) = gamma_o / 2`` by inverse CDF.

    ``weights`` is an :class:`IsingModel` or :class:`OrthantWeights`.
    """
    if isinstance(weights, IsingModel):
        _check_enum(weights.d)
        weights = ising_weights(weights)
    cdf = np.cumsum(weights.probabilities())
    cdf /= cdf[-1]
    m = 1 if size is None else int(size)
    s = np.searchsorted(cdf, rng.random(m), side="right")
    s = np.minimum(s, len(cdf) - 1)
    out = orthant_signs(weights.d, s)
    return out[0] if size is None else out


class _ParetoSampler:
    """Rejection sampler for the HR exponent measure restricted to ``max x > eps``.

    Proposal: ``k`` uniform, ``x_k = eps/U`` and
    ``log(x_i/x_k) ~ N(-gamma_ik/2, Sigma^(k))``.  Its density is
    ``(eps/d) g(x) #{i: x_i > eps}``, so accepting with probability
    ``1/#{i: x_i > eps}`` leaves ``g`` restricted to ``max x > eps``.
    """

    def __init__(self, gamma):
        gamma = np.asarray(gamma, dtype=float)
        self.d = d = gamma.shape[0]
        self.means = []
        self.chols = []
        self.idx = []
        for k in range(d if d > 1 else 0):
            idx = np.array([i for i in range(d) if i != k])
            self.idx.append(idx)
            self.means.append(-gamma[idx, k] / 2.0)
            self.chols.append(np.linalg.cholesky(sigma_k(gamma, k)))

    def propose(self, m, eps, rng):
        d = self.d
        xk = eps / (1.0 - rng.random(m))
        if d == 1:
            return xk[:, None], np.ones(m)
        k = rng.integers(0, d, size=m)
        z = rng.standard_normal((m, d - 1))
        x = np.empty((m, d))
        for kk in range(d):
            sel = k == kk
            if not np.any(sel):
                continue
            lz = self.means[kk] + z[sel] @ self.chols[kk].T
            xs = np.empty((sel.sum(), d))
            xs[:, kk] = xk[sel]
            xs[:, self.idx[kk]] = xk[sel, None] * np.exp(lz)
            x[sel] = xs
        return x, (x > eps).sum(axis=1)

    def sample(self, m, eps, rng):
        out = []
        have = 0
        while have < m:
            need = m - have
            x, cnt = self.propose(max(int(need * min(self.d, 4) * 1.1) + 16, 64), eps, rng)
            keep = rng.random(len(cnt)) * cnt < 1.0
            x = x[keep][:need]
            out.append(x)
            have += len(x)
        return np.concatenate(out) if out else np.empty((0, self.d))


@lru_cache(maxsize=64)
def _sampler_cached(key, d):
    return _ParetoSampler(np.frombuffer(key).reshape(d, d))


def _sampler(gamma):
    gamma = np.ascontiguousarray(gamma, dtype=float)
    return _sampler_cached(gamma.tobytes(), gamma.shape[0])


def sample_hr_pareto_jump(gamma, eps, rng, size=None):
    """Draw from ``Lambda_HR(. & {max x > eps}) / Lambda_HR({max x > eps})``."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
    m = 1 if size is None else int(size)
    x = _sampler(gamma).sample(m, eps, rng)
    return x[0] if size is None else x


@lru_cache(maxsize=64)
def _theta_cached(key, d):
    return extremal_coefficient(np.frombuffer(key).reshape(d, d))


def hr_mass_above_one(gamma):
    """``Lambda_HR({max x > 1})``, cached per variogram."""
    gamma = np.ascontiguousarray(np.atleast_2d(gamma), dtype=float)
    if gamma.shape[0] == 1:
        return 1.0
    return _theta_cached(gamma.tobytes(), gamma.shape[0])


def plm_mass_above(gamma, weights, eps):
    """Rate ``sum_o gamma_o Lambda_HR({max |x| > eps})`` of the compound-Poisson part."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    total = float(np.sum(getattr(weights, "gamma", weights)))
    return total * hr_mass_above_one(gamma) / eps


def transform_marginals(x, spec):
    """``y_i = sgn(x_i) (c_i^sgn |x_i|)^(1/alpha_i)`` componentwise."""
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise DomainError("transform_marginals is undefined at zero")
    pos = x > 0
    c = np.where(pos, spec.c_plus, spec.c_minus)
    return np.where(pos, 1.0, -1.0) * (c * np.abs(x)) ** (1.0 / spec.alpha)


def inverse_transform_marginals(y, spec):
    y = np.asarray(y, dtype=float)
    pos = y > 0
    c = np.where(pos, spec.c_plus, spec.c_minus)
    return np.where(pos, 1.0, -1.0) * np.abs(y) ** spec.alpha / c


def simulate_increments(spec, n, delta, eps=DEFAULT_EPS, rng=None, return_counts=False):
    """Draw ``n`` independent increments over time steps of length ``delta``.

    Each increment is a sum of ``Poisson(delta * rate)`` jumps plus
    ``delta * tau``, where ``rate = plm_mass_above(gamma, weights, eps)``.
    """
    if not isinstance(spec, ProcessSpec):
        raise InvalidSpec("spec must be a ProcessSpec")
    if n < 1 or delta <= 0 or eps <= 0:
        raise InvalidSpec("need n >= 1, delta > 0 and eps > 0")
    if rng is None:
        raise ValueError("an explicit rng is required")
    d = spec.d
    rate = delta * plm_mass_above(spec.gamma, spec.weights, eps)
    if rate > MAX_POISSON:
        raise InvalidSpec(f"expected {rate:.3g} jumps per increment exceeds the cap {MAX_POISSON:g}")
    counts = rng.poisson(rate, size=n)
    if counts.max(initial=0) > MAX_POISSON:
        raise InvalidSpec("Poisson count exceeds the cap")
    sampler = _sampler(spec.gamma)
    cdf = np.cumsum(spec.weights.probabilities())
    cdf /= cdf[-1]
    out = np.zeros((n, d))
    # row blocks keep the number of jumps in memory bounded
    ends = np.cumsum(counts)
    start_row = 0
    while start_row < n:
        base = ends[start_row - 1] if start_row else 0
        stop_row = int(np.searchsorted(ends, base + _CHUNK_JUMPS, side="right"))
        stop_row = min(max(stop_row, start_row + 1), n)
        c = counts[start_row:stop_row]
        m = int(c.sum())
        if m:
            x = sampler.sample(m, eps, rng)
            s = np.minimum(np.searchsorted(cdf, rng.random(m), side="right"), len(cdf) - 1)
            x *= orthant_signs(d, s)
            y = transform_marginals(x, spec)
            rows = np.repeat(np.arange(stop_row - start_row), c)
            for i in range(d):
                out[start_row:stop_row, i] = np.bincount(rows, weights=y[:, i], minlength=stop_row - start_row)
        start_row = stop_row
    out += delta * spec.tau
    panel = IncrementPanel(out, delta)
    return (panel, counts) if return_counts else panel
