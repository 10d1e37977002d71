"""Estimation of the Ising interaction matrix from tail sign co-occurrences.

Targets are empirical sign correlations of joint extremes; the fit solves the
L1-penalized moment-matching problem by ADAM ascent.
"""

import logging
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import DimensionTooLarge, NoTailDependence, OptimizationDiverged
from .ising import IsingModel, _check_enum, ising_weights, pair_products
from .rng import as_rng
from .variogram import _data, chi_components, default_k

log = logging.getLogger(__name__)
EXACT_MAX_D = 16
N_MCMC = 5000
PSI_FLAG = 10.0


@dataclass(frozen=True)
class CovTargets:
    """Per-edge targets ``a_ij`` with the four tail-count components."""

    edges: list
    a: np.ndarray
    components: dict
    chi: np.ndarray
    k: int

    @property
    def m(self):
        """``(chi++ + chi--) / chi`` per edge."""
        return (self.components[(1, 1)] + self.components[(-1, -1)]) / self.chi


def _pair_targets(comp, pairs):
    c = {key: np.array([v[i, j] for i, j in pairs]) for key, v in comp.items()}
    chi = sum(c.values())
    for t, (i, j) in enumerate(pairs):
        if chi[t] <= 0:
            raise NoTailDependence(i, j)
    a = (c[(1, 1)] + c[(-1, -1)] - c[(1, -1)] - c[(-1, 1)]) / chi
    return c, chi, a


def cov_targets(panel, graph, k=None):
    """Estimate ``Cov_psi(B_i, B_j)`` on every edge from the chi components."""
    x = _data(panel)
    k = default_k(x.shape[0]) if k is None else k
    comp = chi_components(x, k)
    edges = graph.sorted_edges()
    c, chi, a = _pair_targets(comp, edges)
    return CovTargets(edges, a, c, chi, k)


def empirical_m(panel, i, j, k=None):
    """Share of joint extremes of ``(i, j)`` falling into equal-sign quadrants."""
    x = _data(panel)[:, [i, j]]
    comp = chi_components(x, default_k(x.shape[0]) if k is None else k)
    num = comp[(1, 1)][0, 1] + comp[(-1, -1)][0, 1]
    den = num + comp[(1, -1)][0, 1] + comp[(-1, 1)][0, 1]
    if den <= 0:
        raise NoTailDependence(i, j)
    return float(num / den)


def exact_moments(model, pairs=None):
    """``E_psi[B_i B_j]`` by enumeration, for the model's edges or the given pairs."""
    _check_enum(model.d)
    pairs = model.edges if pairs is None else list(pairs)
    p = model.probabilities()
    return pair_products(model.d, pairs).T.astype(float) @ p


@numba.njit(cache=True)
def _gibbs_chain(psi, state, sites, unif, burn, n_samples, thin, ei, ej, n_batches):
    d = psi.shape[0]
    field_ = psi @ state.astype(np.float64)
    n_e = ei.shape[0]
    batch = np.zeros((n_batches, n_e))
    per_batch = n_samples // n_batches
    t = 0
    total = burn + n_samples * thin
    kept = 0
    for step in range(total):
        i = sites[t]
        u = unif[t]
        t += 1
        p_plus = 1.0 / (1.0 + np.exp(-2.0 * field_[i]))
        new = 1 if u < p_plus else -1
        if new != state[i]:
            diff = new - state[i]
            state[i] = new
            for k in range(d):
                field_[k] += psi[k, i] * diff
        if step >= burn and (step - burn + 1) % thin == 0:
            b = min(kept // per_batch, n_batches - 1)
            for e in range(n_e):
                batch[b, e] += state[ei[e]] * state[ej[e]]
            kept += 1
    return batch


@dataclass(frozen=True)
class GibbsResult:
    mean: np.ndarray
    se: np.ndarray
    n_samples: int
    burn_in: int


def gibbs_moments(model, n_samples=N_MCMC, burn_in=None, rng=None, pairs=None, n_batches=50):
    """Random-scan single-site Gibbs estimates of ``E_psi[B_i B_j]``.

    One retained sample every ``d`` site updates; ``burn_in`` is in sweeps of
    ``d`` updates and defaults to ``10 d sqrt(n_samples)``.  Standard errors
    use batch means.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    rng = as_rng(rng)
    d = model.d
    pairs = model.edges if pairs is None else list(pairs)
    burn_in = int(np.ceil(10 * d * np.sqrt(n_samples))) if burn_in is None else int(burn_in)
    n_batches = max(1, min(n_batches, n_samples))
    burn = burn_in * d
    total = burn + n_samples * d
    state = np.where(rng.random(d) < 0.5, 1, -1).astype(np.int64)
    sites = rng.integers(0, d, size=total)
    unif = rng.random(total)
    ei = np.array([i for i, _ in pairs], dtype=np.int64)
    ej = np.array([j for _, j in pairs], dtype=np.int64)
    batch = _gibbs_chain(np.ascontiguousarray(model.psi), state, sites, unif, burn, n_samples, d, ei, ej, n_batches)
    per = n_samples // n_batches
    sizes = np.full(n_batches, per, dtype=float)
    sizes[-1] = n_samples - per * (n_batches - 1)
    mean = batch.sum(axis=0) / n_samples
    if n_batches > 1:
        bm = batch / sizes[:, None]
        se = np.sqrt(np.sum(sizes[:, None] * (bm - mean) ** 2, axis=0) / (n_batches - 1) / n_samples)
    else:
        se = np.full(len(pairs), np.nan)
    return GibbsResult(mean, se, n_samples, burn_in)


@dataclass
class IsingFit:
    model: IsingModel
    targets: np.ndarray
    moments: np.ndarray
    trace: list = field(default_factory=list)
    converged: bool = False
    flag: bool = False

    @property
    def weights(self):
        return ising_weights(self.model)


def _min_norm_subgradient(grad_smooth, psi, v):
    g = grad_smooth - v * np.sign(psi)
    zero = psi == 0
    gz = grad_smooth[zero]
    g[zero] = np.sign(gz) * np.maximum(np.abs(gz) - v, 0.0)
    return g


def fit_psi(targets, graph, v=0.05, max_iter=500, rng=None, tol=1e-3, lr=0.05,
            beta1=0.9, beta2=0.999, adam_eps=1e-8, moments="auto", n_mcmc=N_MCMC):
    """Maximize ``-log C(psi) + sum a_ij psi_ij - v |psi|_1`` over edge weights.

    ``moments`` is ``'exact'``, ``'gibbs'`` or ``'auto'`` (exact for
    ``d <= 16``).  A coordinate whose update crosses zero is set to zero, so
    zeros are reachable and stable under the penalty; the stopping rule uses
    the minimum-norm subgradient.
    """
    a = np.asarray(getattr(targets, "a", targets), dtype=float)
    edges = graph.sorted_edges()
    if len(a) != len(edges):
        raise ValueError("one target per edge is required")
    d = graph.d
    mode = moments
    if mode == "auto":
        mode = "exact" if d <= EXACT_MAX_D else "gibbs"
    if mode == "exact" and d > 25:
        raise DimensionTooLarge(f"exact moments need d <= 25, got {d}")
    rng = as_rng(rng) if mode == "gibbs" else None
    psi = np.zeros(len(edges))
    m1 = np.zeros_like(psi)
    m2 = np.zeros_like(psi)
    trace = []
    prev_obj = None
    down = 0
    converged = False
    mom = np.zeros_like(psi)
    for it in range(1, max_iter + 1):
        model = IsingModel.from_vector(graph, psi)
        if mode == "exact":
            mom = exact_moments(model)
            obj = -model.log_partition() + a @ psi - v * np.abs(psi).sum()
        else:
            mom = gibbs_moments(model, n_mcmc, rng=rng).mean
            obj = np.nan
        g = _min_norm_subgradient(a - mom, psi, v)
        gnorm = float(np.linalg.norm(g))
        trace.append((it - 1, obj, gnorm))
        if gnorm < tol:
            converged = True
            break
        if mode == "exact" and prev_obj is not None:
            down = down + 1 if obj < prev_obj else 0
            if down >= 50:
                raise OptimizationDiverged(f"objective decreased for 50 consecutive steps at iteration {it}")
        prev_obj = obj
        m1 = beta1 * m1 + (1 - beta1) * g
        m2 = beta2 * m2 + (1 - beta2) * g * g
        step = lr * (m1 / (1 - beta1**it)) / (np.sqrt(m2 / (1 - beta2**it)) + adam_eps)
        new = psi + step
        crossed = (psi != 0) & (np.sign(new) != np.sign(psi))
        new[crossed] = 0.0
        psi = new
    model = IsingModel.from_vector(graph, psi)
    if not converged and mode == "exact":
        mom = exact_moments(model)
    flag = bool(np.any(np.abs(psi) > PSI_FLAG))
    if flag:
        log.warning("fitted interactions exceed %g in absolute value", PSI_FLAG)
    return IsingFit(model, a, mom, trace, converged, flag)


def weights_from_fit(fit_or_model):
    """Orthant weights induced by a fitted interaction matrix."""
    model = getattr(fit_or_model, "model", fit_or_model)
    return ising_weights(model)
