"""Rank-constrained latent variable graphical lasso."""
__version__ = "0.1.0"

from ._backend import BACKEND
from .glasso import (
    GlassoSolution, PenaltyMask, glasso_masked, glasso_objective, kkt_residual,
    lasso_cd, lvglasso_mask, neg_log_lik, soft_threshold,
)
from .em import (
    EmConfig, EmFit, PrecisionPartition, default_lambda_grid, e_step,
    extract_SL, fit, init_K, lambda_path, m_step, observed_objective,
)

__all__ = [
    "BACKEND", "EmConfig", "EmFit", "GlassoSolution", "PenaltyMask",
    "PrecisionPartition", "default_lambda_grid", "e_step", "extract_SL", "fit",
    "glasso_masked", "glasso_objective", "init_K", "kkt_residual", "lambda_path",
    "lasso_cd", "lvglasso_mask", "m_step", "neg_log_lik", "observed_objective",
    "soft_threshold",
]
