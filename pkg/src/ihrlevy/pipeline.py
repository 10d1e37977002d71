"""End-to-end fit of an IHR model to a panel of increments."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .completion import complete_variogram
from .eglearn import eglearn_path, mst_graph
from .hr import chi_from_gamma, project_cnd
from .io import read_panel_csv, write_edges, write_matrix, write_rows
from .ising import MAX_ENUM_D
from .ising_est import cov_targets, fit_psi, weights_from_fit
from .levy import IncrementPanel
from .rng import make_rng
from .variogram import chi_components, chi_total, default_k, default_q, gamma_hat

log = logging.getLogger(__name__)

MIN_ROWS = 100
OUTPUT_FILES = (
    "gamma_hat.csv", "graph.edges", "psi_fit.csv", "weights.csv", "chi_compare.csv",
    "m_compare.csv", "penalty_path.csv",
)


@dataclass
class FitOptions:
    levels: str = "none"  # none | diff | logdiff
    method: str = "ns"
    criterion: str = "AIC"
    q: float = None
    k: int = None
    v: float = 0.05
    max_iter: int = 500
    seed: int = 0


@dataclass
class FitReport:
    out_dir: Path
    files: list = field(default_factory=list)
    graph: object = None
    estimate: object = None
    fit: object = None
    chi_mad: dict = field(default_factory=dict)


def load_increments(path, levels="none"):
    names, data = read_panel_csv(path, min_rows=MIN_ROWS + (levels != "none"), min_cols=2)
    if levels == "diff":
        data = np.diff(data, axis=0)
    elif levels == "logdiff":
        if np.any(data <= 0):
            from .errors import DataError

            raise DataError("log differences need strictly positive levels")
        data = np.diff(np.log(data), axis=0)
    elif levels != "none":
        raise ValueError(f"unknown levels mode {levels!r}")
    return IncrementPanel(data, 1.0, tuple(names))


def fit_data(panel_path, out_dir, options=None):
    """Run the variogram, graph, completion and Ising steps and write every artifact."""
    opt = options or FitOptions()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    panel = load_increments(panel_path, opt.levels)
    n, d = panel.n, panel.d
    q = default_q(n) if opt.q is None else opt.q
    k = default_k(n) if opt.k is None else opt.k
    rep = FitReport(out)

    def emit(name):
        rep.files.append(out / name)
        return out / name

    est = gamma_hat(panel, q)
    write_matrix(emit("gamma_hat.csv"), est.gamma)
    write_rows(emit("variogram_diagnostics.csv"), ("i", "j", "m", "o", "n_Jo", "S_size", "cell_value"),
               [(i + 1, j + 1, m + 1, o, a, b, c) for i, j, m, o, a, b, c in est.diagnostics()])
    g_proj = project_cnd(est.gamma)
    write_matrix(emit("gamma_projected.csv"), g_proj)

    path = eglearn_path(g_proj, opt.method, n=n, q=q)
    t, ge = path.select(opt.criterion)
    rep.graph, rep.estimate = ge.graph, ge
    write_edges(emit("graph.edges"), ge.graph)
    write_matrix(emit("gamma_completed.csv"), ge.gamma)
    write_matrix(emit("theta_completed.csv"), ge.theta)
    write_rows(emit("penalty_path.csv"), ("rho", "n_edges", "AIC", "BIC", "selected"),
               [(r, len(g), a, b, int(i == t)) for i, (r, g, a, b) in
                enumerate(zip(path.rhos, path.graphs, path.aic, path.bic))])

    targets = cov_targets(panel, ge.graph, k)
    fit = fit_psi(targets, ge.graph, v=opt.v, max_iter=opt.max_iter, rng=make_rng(opt.seed, "fit-psi"))
    rep.fit = fit
    write_rows(emit("psi_fit.csv"), ("i", "j", "psi_hat", "target", "fitted_moment", "flag"),
               [(i + 1, j + 1, fit.model.psi[i, j], a, m, int(fit.flag))
                for (i, j), a, m in zip(ge.graph.sorted_edges(), targets.a, fit.moments)])
    write_rows(emit("trace.csv"), ("iter", "objective", "grad_norm"), fit.trace)
    weights = None
    if d <= MAX_ENUM_D:
        weights = weights_from_fit(fit)
        write_rows(emit("weights.csv"), ("orthant", "gamma"), zip(weights.labels(), weights.gamma))
    else:
        log.warning("d=%d is too large to enumerate orthant weights; weights.csv not written", d)

    comp = chi_components(panel, k)
    chi_emp = chi_total(comp)
    models = {
        "mst_chi": complete_variogram(g_proj, mst_graph(chi_emp, "chi")),
        "mst_gamma": complete_variogram(g_proj, mst_graph(est.gamma, "gamma")),
        "eglearn": ge,
    }
    rows = []
    for name, m in models.items():
        dev = []
        for i in range(d):
            for j in range(i + 1, d):
                implied = chi_from_gamma(m.gamma[i, j])
                rows.append((name, i + 1, j + 1, implied, chi_emp[i, j]))
                dev.append(abs(implied - chi_emp[i, j]))
        rep.chi_mad[name] = float(np.mean(dev))
    write_rows(emit("chi_compare.csv"), ("model", "i", "j", "chi_implied", "chi_empirical"), rows)

    rows = []
    for i in range(d):
        for j in range(i + 1, d):
            pp, mm = comp[(1, 1)][i, j], comp[(-1, -1)][i, j]
            tot = pp + mm + comp[(1, -1)][i, j] + comp[(-1, 1)][i, j]
            if tot <= 0:
                rows.append((i + 1, j + 1, np.nan, np.nan, np.nan, np.nan, int((i, j) in ge.graph)))
                continue
            m_emp = (pp + mm) / tot
            a_hat = (pp + mm - comp[(1, -1)][i, j] - comp[(-1, 1)][i, j]) / tot
            m_imp = weights.pair_positive_mass(i, j) if weights is not None else np.nan
            rows.append((i + 1, j + 1, m_imp, m_emp, a_hat, (1.0 + a_hat) / 2.0, int((i, j) in ge.graph)))
    write_rows(emit("m_compare.csv"), ("i", "j", "m_implied", "m_empirical", "a_hat", "half_one_plus_a", "edge"), rows)
    return rep
