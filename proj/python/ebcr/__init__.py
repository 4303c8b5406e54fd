"""Empirical Bayes confidence regions pooled across populations."""

import json

from ._ebcr import (
    EstimateSummary,
    GaussianParams,
    GaussianPrior,
    GridDensity,
    GridPrior,
    InputError,
    Interval,
    KernelMixturePrior,
    NumericalError,
    Region,
    TauSolution,
    classical_interval,
    debiased_lasso_estimate,
    default_deconv_bandwidth,
    default_kappa,
    default_zeta_sq,
    eb_gaussian_interval,
    eb_region,
    fit_deconv_prior,
    fit_gaussian_prior,
    fit_kde_prior,
    hybrid_select,
    kl_divergence,
    lasso,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    ols_estimate,
    posterior_density,
    prior_density,
    prior_kind,
    run_cli,
    silverman_bandwidth_sq,
    solve_tau,
    z_critical,
)
from ._ebcr import _run_experiment


def run_experiment(config):
    """Run a simulation study described by a config dict (same keys as the
    JSON files read by `ebcr simulate`). Returns (results, markdown)."""
    results, markdown = _run_experiment(json.dumps(config))
    return json.loads(results), markdown


__all__ = [name for name in dir() if not name.startswith("_")]
