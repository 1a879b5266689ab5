"""Diverse contrasting explanations for parametric dimensionality reduction."""

from .core import (
    CfRequest,
    Counterfactual,
    Dataset,
    ExplanationSet,
    Projector,
    SolverOptions,
    l0_count,
    l1_norm,
    l2_norm,
    project,
)
from .diverse import (
    BaselineWeights,
    aggregate_attribution,
    diverse_counterfactuals,
    diversity,
    model_agnostic_diverse,
)
from .engine import apply_remap, cf_linear, cf_neural, cf_som, compute_counterfactual
from .errors import DataError, DrcfError, InfeasibleError, InputError, SolverError
from .linear import LinearProjector, fit_pca, project_linear
from .neural import (
    AutoencoderProjector,
    Mlp,
    PtsneProjector,
    compute_p_matrix,
    fit_autoencoder,
    fit_ptsne,
    mlp_forward,
    mlp_grad,
)
from .som import Som, fit_som, project_som

__version__ = "0.1.0"
