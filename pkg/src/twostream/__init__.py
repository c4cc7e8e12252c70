"""Anytime-valid sequential two-sample inference for 2x2 contingency tables.

E-variables for convex composite nulls, plug-in e-processes over blocks of
Bernoulli outcomes, and exact anytime-valid confidence sequences for risk
difference, relative risk, and log odds ratio.
"""

from .confseq import (
    ConfidenceSequence,
    ConfInterval,
    Effect,
    default_grid,
    effect_value,
    null_for,
)
from .eprocess import (
    BetaPrior,
    EProcessState,
    block_evalue,
    equality_mixture_evalue,
    from_snapshot,
    posterior_mean,
    to_snapshot,
)
from .kernels import BACKEND
from .model import (
    Block,
    BlockDesign,
    GroupCounts,
    ThetaPair,
    bern_log_pmf,
    kl_bernoulli,
    kl_block,
    kl_single,
    log_odds_ratio,
)
from .nulls import NullKind, NullSpec
from .projection import (
    Projection,
    grid_oracle_project,
    project,
    project_equality,
    project_halfplane,
    project_line,
    project_log_odds,
)
from .simulate import (
    ExperimentResult,
    SimConfig,
    figure_traces,
    generate_stream,
    run_coverage,
    run_type1,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BetaPrior",
    "Block",
    "BlockDesign",
    "ConfInterval",
    "ConfidenceSequence",
    "EProcessState",
    "Effect",
    "ExperimentResult",
    "GroupCounts",
    "NullKind",
    "NullSpec",
    "Projection",
    "SimConfig",
    "ThetaPair",
    "bern_log_pmf",
    "block_evalue",
    "default_grid",
    "effect_value",
    "equality_mixture_evalue",
    "figure_traces",
    "from_snapshot",
    "generate_stream",
    "grid_oracle_project",
    "kl_bernoulli",
    "kl_block",
    "kl_single",
    "log_odds_ratio",
    "null_for",
    "posterior_mean",
    "project",
    "project_equality",
    "project_halfplane",
    "project_line",
    "project_log_odds",
    "run_coverage",
    "run_type1",
    "to_snapshot",
    "__version__",
]
