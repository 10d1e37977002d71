"""Ising–Hüsler–Reiss Lévy processes: simulation, estimation and graph learning."""

from .completion import GraphEstimate, complete_variogram
from .eglearn import (
    PenaltyPath,
    eglearn_path,
    f1_score,
    graphical_lasso,
    mst_graph,
    neighborhood_selection,
    pseudo_loglik_ic,
)
from .errors import IHRError
from .graph import Graph
from .hr import (
    HRParams,
    chi_from_gamma,
    extremal_coefficient,
    gamma_from_chi,
    hr_exponent_density,
    project_cnd,
    sigma_k,
    theta_from_variogram,
    validate_variogram,
    variogram_from_theta,
)
from .ising import IsingModel, OrthantWeights, ising_weights, tree_weights
from .ising_est import cov_targets, exact_moments, fit_psi, gibbs_moments, weights_from_fit
from .levy import IncrementPanel, ProcessSpec, sample_hr_pareto_jump, simulate_increments
from .pipeline import FitOptions, fit_data
from .rng import make_rng
from .study import StudyConfig, gen_barabasi_albert, gen_model, run_study
from .variogram import chi_components, chi_hat, chi_total, gamma_hat

__version__ = "0.1.0"
