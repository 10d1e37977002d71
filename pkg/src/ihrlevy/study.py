"""Simulation-study harness: graph and model generators, and the factorial study loop."""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .eglearn import eglearn_path, f1_score, mst_graph
from .errors import GenerationFailed, IHRError, InvalidConfig
from .graph import Graph
from .hr import HRParams, project_cnd
from .ising import IsingModel
from .ising_est import cov_targets, fit_psi
from .levy import ProcessSpec, simulate_increments
from .rng import make_rng
from .variogram import chi_components, chi_total, gamma_hat

log = logging.getLogger(__name__)

METHODS = ("MST-Gamma", "MST-chi", "NS-path", "Glasso-path", "NS-AIC", "NS-BIC", "Glasso-AIC", "Glasso-BIC")


@dataclass
class StudyConfig:
    d: int = 10
    a: int = 1
    theta_range: tuple = (2.0, 5.0)
    psi_regime: str = "asymmetric"
    psi_range: tuple = (0.2, 0.6)
    alpha: float = 1.5
    c_plus: float = 1.0
    c_minus: float = 1.0
    n_list: tuple = (2000, 10000)
    delta: float = 1.0
    eps: float = 0.1
    q_exponent: float = 0.3
    k_exponent: float = 0.7
    replications: int = 20
    seed: int = 0
    methods: tuple = METHODS
    fit_psi: bool = False
    v: float = 0.05

    def __post_init__(self):
        self.n_list = tuple(int(n) for n in np.atleast_1d(self.n_list))
        self.methods = tuple(self.methods)
        self.theta_range = tuple(float(x) for x in self.theta_range)
        self.psi_range = tuple(float(x) for x in self.psi_range)
        if self.d < 3:
            raise InvalidConfig("d must be at least 3")
        if self.a not in (1, 2):
            raise InvalidConfig("attachment parameter a must be 1 or 2")
        lo, hi = self.theta_range
        if not 0 < lo <= hi:
            raise InvalidConfig("theta_range must satisfy 0 < lo <= hi")
        lo, hi = self.psi_range
        if not 0 <= lo <= hi:
            raise InvalidConfig("psi_range must satisfy 0 <= lo <= hi")
        if self.psi_regime not in ("symmetric", "asymmetric"):
            raise InvalidConfig("psi_regime must be 'symmetric' or 'asymmetric'")
        if self.replications < 1 or not self.n_list or min(self.n_list) < 10:
            raise InvalidConfig("need replications >= 1 and every n >= 10")
        if not 0 < self.alpha < 2 or self.c_plus <= 0 or self.c_minus <= 0:
            raise InvalidConfig("need alpha in (0, 2) and positive scales")
        if self.delta <= 0 or self.eps <= 0:
            raise InvalidConfig("delta and eps must be positive")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise InvalidConfig(f"unknown methods {sorted(bad)}")


def gen_barabasi_albert(d, a, rng):
    """Preferential attachment: each new node links to ``min(a, #existing)`` nodes."""
    if a not in (1, 2):
        raise InvalidConfig("attachment parameter a must be 1 or 2")
    if d < 3:
        raise InvalidConfig("d must be at least 3")
    deg = np.zeros(d)
    edges = []
    for v in range(1, d):
        k = min(a, v)
        p = deg[:v] + (deg[:v].sum() == 0)
        targets = rng.choice(v, size=k, replace=False, p=p / p.sum())
        for u in targets:
            edges.append((int(u), v))
            deg[u] += 1
            deg[v] += 1
    return Graph(d, edges)


def gen_model(graph, config, rng, max_retries=100):
    """Laplacian precision with ``U[theta_range]`` edge weights and a random Ising model on ``graph``."""
    d = graph.d
    edges = graph.sorted_edges()
    for _ in range(max_retries):
        try:
            theta = np.zeros((d, d))
            w = rng.uniform(*config.theta_range, size=len(edges))
            for (i, j), wij in zip(edges, w):
                theta[i, j] = theta[j, i] = -wij
            np.fill_diagonal(theta, -theta.sum(axis=1))
            hr = HRParams.from_precision(theta)
            if config.psi_regime == "symmetric":
                ising = IsingModel.zeros(graph)
            else:
                mag = rng.uniform(*config.psi_range, size=len(edges))
                sign = rng.choice([-1.0, 1.0], size=len(edges))
                ising = IsingModel.from_vector(graph, mag * sign)
            return ProcessSpec(hr, config.alpha, config.c_plus, config.c_minus, ising=ising)
        except IHRError as exc:
            log.debug("model draw rejected: %s", exc)
    raise GenerationFailed(f"no valid model after {max_retries} draws")


@dataclass
class StudyResult:
    rows: list = field(default_factory=list)
    psi_rows: list = field(default_factory=list)
    timing: list = field(default_factory=list)

    COLUMNS = ("replication", "n", "method", "rho_index", "rho", "f1", "n_edges", "status")
    PSI_COLUMNS = ("replication", "n", "i", "j", "psi_true", "psi_hat", "target", "flag")
    TIMING_COLUMNS = ("replication", "n", "method", "seconds")

    def extend(self, other):
        self.rows += other.rows
        self.psi_rows += other.psi_rows
        self.timing += other.timing

    def f1_table(self, method, n):
        """``(replications, rho_index)`` F1 array for a path method, or one column otherwise."""
        sel = [r for r in self.rows if r[2] == method and r[1] == n]
        reps = sorted({r[0] for r in sel})
        path = method.endswith("-path")
        idx = sorted({r[3] for r in sel}) if path else [None]
        out = np.full((len(reps), len(idx)), np.nan)
        for r in sel:
            out[reps.index(r[0]), idx.index(r[3]) if path else 0] = r[5]
        return out

    def median_f1(self, method, n):
        """Median over replications; for path methods the best grid point."""
        t = self.f1_table(method, n)
        if t.size == 0:
            return np.nan
        med = np.nanmedian(t, axis=0)
        return float(np.nanmax(med))


def _q(config, n):
    return float(n) ** -config.q_exponent


def _k(config, n):
    return max(1, int(np.floor(float(n) ** config.k_exponent)))


def _replication(config, r):
    res = StudyResult()
    rng = make_rng(config.seed, r, "model")
    graph = gen_barabasi_albert(config.d, config.a, rng)
    spec = gen_model(graph, config, rng)
    panel = simulate_increments(spec, max(config.n_list), config.delta, config.eps, make_rng(config.seed, r, "panel"))
    for n in config.n_list:
        sub = panel.head(n)
        q = _q(config, n)
        t0 = time.perf_counter()
        status = "ok"
        try:
            est = gamma_hat(sub, q)
            g_raw = est.gamma
            g_proj = project_cnd(g_raw)
        except IHRError as exc:
            status = type(exc).__name__
            g_raw = g_proj = None
        chi = None
        paths = {}
        for method in config.methods:
            t1 = time.perf_counter()
            if g_raw is None:
                res.rows.append((r, n, method, -1, np.nan, np.nan, -1, status))
                continue
            try:
                if method == "MST-Gamma":
                    g = mst_graph(g_raw, "gamma")
                    res.rows.append((r, n, method, -1, np.nan, f1_score(graph, g), len(g), "ok"))
                elif method == "MST-chi":
                    if chi is None:
                        chi = chi_total(chi_components(sub, _k(config, n)))
                    g = mst_graph(chi, "chi")
                    res.rows.append((r, n, method, -1, np.nan, f1_score(graph, g), len(g), "ok"))
                else:
                    base, sel = method.split("-")
                    key = "ns" if base == "NS" else "glasso"
                    if key not in paths:
                        paths[key] = eglearn_path(g_proj, key, n=n, q=q)
                    path = paths[key]
                    if sel == "path":
                        for t, (rho, g) in enumerate(zip(path.rhos, path.graphs)):
                            res.rows.append((r, n, method, t, rho, f1_score(graph, g), len(g), "ok"))
                    else:
                        t, e = path.select(sel)
                        res.rows.append((r, n, method, t, path.rhos[t], f1_score(graph, e.graph), len(e.graph), "ok"))
            except IHRError as exc:
                log.warning("replication %d n=%d %s failed: %s", r, n, method, exc)
                res.rows.append((r, n, method, -1, np.nan, np.nan, -1, type(exc).__name__))
            res.timing.append((r, n, method, time.perf_counter() - t1))
        if config.fit_psi:
            try:
                tg = cov_targets(sub, graph, _k(config, n))
                fit = fit_psi(tg, graph, v=config.v, rng=make_rng(config.seed, r, n, "gibbs"))
                for (i, j), a_t in zip(graph.sorted_edges(), tg.a):
                    res.psi_rows.append((r, n, i, j, spec.ising.psi[i, j], fit.model.psi[i, j], a_t, int(fit.flag)))
            except IHRError as exc:
                log.warning("replication %d n=%d psi fit failed: %s", r, n, exc)
                for i, j in graph.sorted_edges():
                    res.psi_rows.append((r, n, i, j, spec.ising.psi[i, j], np.nan, np.nan, type(exc).__name__))
        res.timing.append((r, n, "total", time.perf_counter() - t0))
    return res


def _replication_safe(args):
    config, r = args
    try:
        return _replication(config, r)
    except IHRError as exc:
        res = StudyResult()
        for n in config.n_list:
            for method in config.methods:
                res.rows.append((r, n, method, -1, np.nan, np.nan, -1, type(exc).__name__))
        return res


def run_study(config, threads=1):
    """Run every (replication, n, method) cell; failed cells are kept with their error name."""
    out = StudyResult()
    jobs = [(config, r) for r in range(config.replications)]
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for res in pool.map(_replication_safe, jobs):
                out.extend(res)
    else:
        for job in jobs:
            out.extend(_replication_safe(job))
    return out


def config_dict(config):
    return asdict(config)
