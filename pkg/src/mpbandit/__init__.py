"""Multiple-play bandit simulation library: Thompson-sampling variants,
confidence-index baselines, cascade-model extension, and a deterministic
Monte Carlo harness with a service/CLI front end."""

__version__ = "0.1.0"

from .environments import BernoulliBandit, CascadeBandit, draw_rewards, per_round_regret
from .harness import AggregateTrace, RegretTrace, RunConfig, run_batch, run_single
from .kl_math import (
    LowerBoundReport,
    MarginalTieError,
    bernoulli_kl,
    beta_cdf_integer,
    chernoff_tail_bound,
    cucb_index,
    kl_ucb_index,
    lower_bound_coefficient,
)
from .policies import PolicyKind, make_policy
from .scenarios import PRESETS, Scenario

__all__ = [
    "AggregateTrace",
    "BernoulliBandit",
    "CascadeBandit",
    "LowerBoundReport",
    "MarginalTieError",
    "PolicyKind",
    "PRESETS",
    "RegretTrace",
    "RunConfig",
    "Scenario",
    "bernoulli_kl",
    "beta_cdf_integer",
    "chernoff_tail_bound",
    "cucb_index",
    "draw_rewards",
    "kl_ucb_index",
    "lower_bound_coefficient",
    "make_policy",
    "per_round_regret",
    "run_batch",
    "run_single",
]
