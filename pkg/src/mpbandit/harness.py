"""Deterministic simulation loop and batch aggregation.

A run is fully determined by ``(master_seed, run_id)``: every random draw
inside it is addressed through the counter-based stream, so traces are
identical no matter how runs are grouped into blocks or spread over
workers.  Batches are embarrassingly parallel; aggregation assembles
per-run rows in run-id order and reduces with numpy's pairwise summation,
which keeps aggregate output bit-stable for any worker count.

Regret is accumulated as the exact expected per-round gap (a function of
the instance means and the realized selection), not as a difference of
sampled rewards; that matches the quantity the curves are about and strips
avoidable Monte Carlo noise from comparisons.
"""

from __future__ import annotations

import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .environments import CascadeBandit, Instance
from .kl_math import lower_bound_coefficient
from .policies import PolicyKind, make_policy
from .rng import BlockStream

__all__ = [
    "AggregateTrace",
    "RegretTrace",
    "RunConfig",
    "SelectionLogError",
    "aggregate_traces",
    "default_checkpoints",
    "run_batch",
    "run_single",
    "run_traces",
]


class SelectionLogError(RuntimeError):
    """A selection-log sink failed; carries the round at which it did."""

    def __init__(self, t: int, cause: BaseException):
        self.round = t
        super().__init__(f"selection log sink failed at round {t}: {cause}")


def default_checkpoints(horizon: int) -> tuple[int, ...]:
    """100 log-spaced rounds from 10 to the horizon, deduplicated."""
    if horizon <= 10:
        return tuple(range(1, horizon + 1))
    pts = np.unique(np.round(np.logspace(1.0, math.log10(horizon), 100)).astype(np.int64))
    return tuple(int(p) for p in pts[pts <= horizon])


@dataclass(frozen=True)
class RunConfig:
    """Everything one experiment needs; immutable and picklable."""

    instance: Instance
    policy: PolicyKind
    horizon: int
    n_runs: int
    master_seed: int
    checkpoints: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "policy", PolicyKind(self.policy))
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.n_runs < 1:
            raise ValueError(f"n_runs must be >= 1, got {self.n_runs}")
        cps = tuple(int(c) for c in self.checkpoints) or default_checkpoints(self.horizon)
        object.__setattr__(self, "checkpoints", cps)
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        if cps[0] < 1 or cps[-1] > self.horizon:
            raise ValueError(f"checkpoints must lie in [1, horizon={self.horizon}]")
        if self.policy.needs_cascade and not isinstance(self.instance, CascadeBandit):
            raise ValueError(
                f"policy requires cascade instance: {self.policy.value} cannot run on "
                f"{type(self.instance).__name__}"
            )


@dataclass(frozen=True)
class RegretTrace:
    """One run's cumulative regret and diagnostics at the checkpoints."""

    run_id: int
    checkpoints: tuple[int, ...]
    cum_regret: np.ndarray
    multi_suboptimal: np.ndarray
    draw_counts: np.ndarray


@dataclass(frozen=True)
class AggregateTrace:
    """Across-run mean and standard error at each checkpoint, plus the
    regret-floor curve when the instance admits one."""

    checkpoints: tuple[int, ...]
    mean_regret: np.ndarray
    stderr_regret: np.ndarray
    mean_multi_suboptimal: np.ndarray
    n_runs: int
    lower_bound: np.ndarray | None = None


def _simulate_block(config: RunConfig, run_ids: np.ndarray, selection_sink=None):
    """Simulate a batch of runs in lockstep; returns per-run checkpoint
    matrices (regret, multi-suboptimal counts) and final draw counts."""
    instance = config.instance
    base = instance.base if isinstance(instance, CascadeBandit) else instance
    exposures = instance.exposures if isinstance(instance, CascadeBandit) else None
    means = base.means_array
    sub_mask = base.suboptimal_mask
    opt_value = instance.optimal_value
    plays = instance.plays

    b = len(run_ids)
    policy = make_policy(config.policy, instance, b)
    stream = BlockStream(config.master_seed, run_ids)
    rows = np.arange(b)[:, None]

    checkpoints = config.checkpoints
    cp_regret = np.zeros((b, len(checkpoints)))
    cp_multi = np.zeros((b, len(checkpoints)), dtype=np.int64)
    cum_regret = np.zeros(b)
    multi_sub = np.zeros(b, dtype=np.int64)
    draws = np.zeros((b, base.n_arms), dtype=np.int64)

    cp_index = 0
    for t in range(1, config.horizon + 1):
        sel = policy.select(stream, t)
        probs = means[sel] if exposures is None else exposures[None, :] * means[sel]
        rewards = (stream.reward_uniforms(t, plays) < probs).astype(np.int64)
        policy.update(sel, rewards)

        # probs doubles as the expected per-position reward, so the expected
        # per-round regret is opt_value - probs.sum() in both reward models.
        cum_regret += opt_value - probs.sum(axis=1)
        multi_sub += sub_mask[sel].sum(axis=1) >= 2
        draws[rows, sel] += 1

        if selection_sink is not None:
            try:
                selection_sink(t, tuple(int(a) for a in sel[0]), tuple(int(x) for x in rewards[0]))
            except Exception as exc:
                raise SelectionLogError(t, exc) from exc

        if cp_index < len(checkpoints) and t == checkpoints[cp_index]:
            cp_regret[:, cp_index] = cum_regret
            cp_multi[:, cp_index] = multi_sub
            cp_index += 1

    return cp_regret, cp_multi, draws


def run_single(config: RunConfig, run_id: int, selection_sink=None) -> RegretTrace:
    """One deterministic run.  When ``selection_sink`` is given it receives
    ``(t, selection, rewards)`` for every round, for offline auditing; the
    sink never affects the trace."""
    cp_regret, cp_multi, draws = _simulate_block(
        config, np.asarray([run_id]), selection_sink=selection_sink
    )
    return RegretTrace(
        run_id=run_id,
        checkpoints=config.checkpoints,
        cum_regret=cp_regret[0],
        multi_suboptimal=cp_multi[0],
        draw_counts=draws[0],
    )


def _block_task(args):
    config, run_ids = args
    return _simulate_block(config, run_ids)


def run_traces(config: RunConfig, workers: int = 1):
    """Per-run checkpoint matrices for the whole experiment, stacked in
    run-id order: ``(regret (n, C), multi_suboptimal (n, C), draws (n, K))``.

    Identical for every ``workers`` value, including 1: blocks only group
    runs, they never couple them.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    all_ids = np.arange(config.n_runs)
    blocks = [blk for blk in np.array_split(all_ids, min(workers, config.n_runs)) if blk.size]
    if workers == 1 or len(blocks) == 1:
        results = [_simulate_block(config, blk) for blk in blocks]
    else:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=len(blocks), mp_context=ctx) as pool:
            results = list(pool.map(_block_task, [(config, blk) for blk in blocks]))
    return (
        np.vstack([r[0] for r in results]),
        np.vstack([r[1] for r in results]),
        np.vstack([r[2] for r in results]),
    )


def aggregate_traces(config: RunConfig, regret: np.ndarray, multi: np.ndarray) -> AggregateTrace:
    """Pointwise mean and standard error over per-run matrices (numpy's
    pairwise summation keeps this bit-stable for any run grouping)."""
    n = config.n_runs
    mean_regret = regret.mean(axis=0)
    if n > 1:
        stderr = regret.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros_like(mean_regret)

    base = config.instance.base if isinstance(config.instance, CascadeBandit) else config.instance
    try:
        report = lower_bound_coefficient(base.means, base.plays)
        lb = report.total_coefficient * np.log(np.asarray(config.checkpoints, dtype=np.float64))
    except ValueError:
        lb = None

    return AggregateTrace(
        checkpoints=config.checkpoints,
        mean_regret=mean_regret,
        stderr_regret=stderr,
        mean_multi_suboptimal=multi.mean(axis=0),
        n_runs=n,
        lower_bound=lb,
    )


def run_batch(config: RunConfig, workers: int = 1) -> AggregateTrace:
    """All runs of the experiment, aggregated pointwise."""
    regret, multi, _ = run_traces(config, workers=workers)
    return aggregate_traces(config, regret, multi)
