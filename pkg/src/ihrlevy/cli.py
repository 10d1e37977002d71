"""Command line interface.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .eglearn import eglearn_path, f1_score, graphical_lasso, neighborhood_selection
from .completion import complete_variogram
from .errors import DataError, IHRError
from .hr import project_cnd
from .io import read_edges, read_matrix, read_panel_csv, write_edges, write_matrix, write_panel, write_rows
from .ising_est import cov_targets, fit_psi, weights_from_fit
from .levy import IncrementPanel, simulate_increments
from .pipeline import FitOptions, fit_data
from .rng import make_rng
from .study import METHODS, StudyResult, run_study
from .variogram import gamma_hat

log = logging.getLogger("ihrlevy")

SIM_NOTE = (
    "Jumps whose standardized size max|x_i| is at most epsilon are dropped and no "
    "compensating drift is added, so only the body of each marginal law is biased; "
    "all estimators here are rank based."
)


def _out(args, name):
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _panel(path):
    names, data = read_panel_csv(path, min_rows=10, min_cols=2)
    return IncrementPanel(data, 1.0, tuple(names))


def cmd_simulate(args):
    cfg = cfgmod.load_config(args.config)
    spec, sim = cfgmod.process_spec_from(cfg)
    n = args.n or sim["n"]
    delta = args.delta or sim["delta"]
    eps = args.eps or sim["eps"]
    seed = args.seed if args.seed is not None else sim["seed"]
    panel = simulate_increments(spec, n, delta, eps, make_rng(seed, "simulate"))
    write_panel(_out(args, "increments.csv"), panel)
    return 0


def cmd_estimate_variogram(args):
    panel = _panel(args.panel)
    est = gamma_hat(panel, args.q)
    write_matrix(_out(args, "gamma_hat.csv"), est.gamma)
    write_matrix(_out(args, "gamma_projected.csv"), project_cnd(est.gamma))
    write_rows(_out(args, "variogram_diagnostics.csv"), ("i", "j", "m", "o", "n_Jo", "S_size", "cell_value"),
               [(i + 1, j + 1, m + 1, o, a, b, c) for i, j, m, o, a, b, c in est.diagnostics()])
    return 0


def cmd_learn_graph(args):
    gamma = project_cnd(read_matrix(args.gamma))
    d = gamma.shape[0]
    truth = read_edges(args.truth, d) if args.truth else None
    if args.rho is not None:
        learner = neighborhood_selection if args.method == "ns" else graphical_lasso
        g = learner(gamma, args.rho)
        est = complete_variogram(gamma, g)
        rows = [(args.rho, len(g), np.nan, np.nan, f1_score(truth, g) if truth else np.nan, 1)]
    else:
        q = args.q if args.q is not None else float(args.n) ** -0.3
        path = eglearn_path(gamma, args.method, n=args.n, q=q)
        t, est = path.select(args.criterion)
        g = est.graph
        rows = [(r, len(gr), a, b, f1_score(truth, gr) if truth else np.nan, int(i == t))
                for i, (r, gr, a, b) in enumerate(zip(path.rhos, path.graphs, path.aic, path.bic))]
    write_edges(_out(args, "graph.edges"), g)
    write_matrix(_out(args, "gamma_completed.csv"), est.gamma)
    write_matrix(_out(args, "theta_completed.csv"), est.theta)
    write_rows(_out(args, "penalty_path.csv"), ("rho", "n_edges", "AIC", "BIC", "F1", "selected"), rows)
    return 0


def cmd_fit_ising(args):
    panel = _panel(args.panel)
    graph = read_edges(args.graph, panel.d)
    targets = cov_targets(panel, graph, args.k)
    fit = fit_psi(targets, graph, v=args.v, max_iter=args.max_iter, rng=make_rng(args.seed or 0, "fit-psi"))
    write_rows(_out(args, "psi_fit.csv"), ("i", "j", "psi_hat", "target", "fitted_moment", "flag"),
               [(i + 1, j + 1, fit.model.psi[i, j], a, m, int(fit.flag))
                for (i, j), a, m in zip(graph.sorted_edges(), targets.a, fit.moments)])
    write_rows(_out(args, "trace.csv"), ("iter", "objective", "grad_norm"), fit.trace)
    w = weights_from_fit(fit)
    write_rows(_out(args, "weights.csv"), ("orthant", "gamma"), zip(w.labels(), w.gamma))
    return 0


def write_study(out_dir, res, config):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_rows(out / "study_results.csv", StudyResult.COLUMNS, res.rows)
    write_rows(out / "study_timing.csv", StudyResult.TIMING_COLUMNS, res.timing)
    if res.psi_rows:
        write_rows(out / "psi_study.csv", StudyResult.PSI_COLUMNS, res.psi_rows)
    # boxplot data: per (method, n) quartiles of F1 across replications; path methods at the best grid point
    box = []
    for method in config.methods:
        for n in config.n_list:
            t = res.f1_table(method, n)
            if t.size == 0:
                continue
            col = int(np.nanargmax(np.nanmedian(t, axis=0))) if t.shape[1] > 1 else 0
            v = t[:, col]
            v = v[np.isfinite(v)]
            if v.size:
                qs = np.quantile(v, [0.0, 0.25, 0.5, 0.75, 1.0])
                box.append((method, n, col, *qs, v.size))
    write_rows(out / "f1_boxplot.csv", ("method", "n", "rho_index", "min", "q1", "median", "q3", "max", "count"), box)


def cmd_run_study(args):
    cfg = cfgmod.load_config(args.config)
    if args.seed is not None:
        cfg["study.seed"] = args.seed
    config = cfgmod.study_config_from(cfg)
    res = run_study(config, threads=args.threads)
    write_study(args.out_dir, res, config)
    return 0


def cmd_fit_data(args):
    opt = FitOptions(levels=args.levels, method=args.method, criterion=args.criterion, q=args.q, k=args.k,
                     v=args.v, max_iter=args.max_iter, seed=args.seed or 0)
    fit_data(args.panel, args.out_dir, opt)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="ihrlevy", description="Ising–Hüsler–Reiss Lévy process toolkit.",
                                epilog=f"Config keys: {', '.join(cfgmod.PROCESS_KEYS)}; study keys use the "
                                       "'study.' prefix (see the README).")
    p.add_argument("--seed", type=int, default=None, help="base random seed")
    p.add_argument("--threads", type=int, default=1, help="worker processes for studies")
    p.add_argument("--out-dir", default=".", help="directory for output files")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate increments from a process config", description=SIM_NOTE)
    s.add_argument("--config", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--delta", type=float)
    s.add_argument("--eps", type=float, help="truncation level of the standardized jumps (default 1e-3)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("estimate-variogram", help="orthant-conditioned variogram estimate")
    s.add_argument("--panel", required=True)
    s.add_argument("--q", type=float, help="tail fraction (default n^-0.3)")
    s.set_defaults(func=cmd_estimate_variogram)

    s = sub.add_parser("learn-graph", help="EGlearn on a variogram matrix")
    s.add_argument("--gamma", required=True)
    s.add_argument("--n", type=int, required=True, help="sample size behind the estimate")
    s.add_argument("--q", type=float)
    s.add_argument("--method", choices=("ns", "glasso"), default="ns")
    s.add_argument("--criterion", choices=("AIC", "BIC"), default="AIC")
    s.add_argument("--rho", type=float, help="fixed penalty instead of a selected path point")
    s.add_argument("--truth", help="true edge list for F1 scores")
    s.set_defaults(func=cmd_learn_graph)

    s = sub.add_parser("fit-ising", help="fit interactions on a given graph")
    s.add_argument("--panel", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--v", type=float, default=0.05)
    s.add_argument("--max-iter", type=int, default=500)
    s.set_defaults(func=cmd_fit_ising)

    s = sub.add_parser("run-study", help=f"simulation study over methods {', '.join(METHODS)}")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_run_study)

    s = sub.add_parser("fit-data", help="full pipeline on a panel CSV")
    s.add_argument("--panel", required=True)
    s.add_argument("--levels", choices=("none", "diff", "logdiff"), default="none",
                   help="treat the panel as levels and difference it first")
    s.add_argument("--method", choices=("ns", "glasso"), default="ns")
    s.add_argument("--criterion", choices=("AIC", "BIC"), default="AIC")
    s.add_argument("--q", type=float)
    s.add_argument("--k", type=int)
    s.add_argument("--v", type=float, default=0.05)
    s.add_argument("--max-iter", type=int, default=500)
    s.set_defaults(func=cmd_fit_data)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except IHRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
