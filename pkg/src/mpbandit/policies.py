"""Bandit policies behind one interface: produce an ordered selection for a
round, then absorb the observed rewards.

Policies are vectorized over a batch of independent runs (state arrays are
``(batch, n_arms)``); with ``batch=1`` they behave as the scalar textbook
algorithms.  All randomness is pulled from a stream passed to ``select``,
which is also the injection point for tests.

Tie-breaking is uniform at random everywhere, via the run's own stream:
posterior samples tie with probability zero, but confidence indices and
empirical means tie all the time early on, and a deterministic preference
would bias small-round behaviour.
"""

from __future__ import annotations

import enum

import numpy as np

from .environments import CascadeBandit, Instance
from .kl_math import kl_ucb_index_vec

__all__ = [
    "PolicyKind",
    "make_policy",
    "rank_by_score",
]


class PolicyKind(str, enum.Enum):
    """Policy names as they appear on the command line and in configs."""

    MP_TS = "mp-ts"
    IMP_TS = "imp-ts"
    BC_MP_TS = "bc-mp-ts"
    CUCB = "cucb"
    MP_KL_UCB = "mp-kl-ucb"

    @property
    def needs_cascade(self) -> bool:
        return self is PolicyKind.BC_MP_TS


def rank_by_score(scores, tie_keys, plays: int) -> np.ndarray:
    """Top ``plays`` arms per row, ordered by score descending, ties broken
    uniformly at random.

    ``tie_keys`` must be i.i.d. uniforms: each row is first passed through
    the random permutation they induce, then stably sorted by score, which
    makes every ordering of tied arms equally likely.  ``tie_keys=None``
    resolves ties by arm index, which is only appropriate for continuous
    scores where exact ties have probability zero.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=np.float64))
    if tie_keys is None:
        order = np.argsort(-scores, axis=1, kind="stable")
        return order[:, :plays]
    tie_keys = np.atleast_2d(np.asarray(tie_keys, dtype=np.float64))
    perm = np.argsort(tie_keys, axis=1)
    shuffled = np.take_along_axis(np.broadcast_to(scores, perm.shape), perm, axis=1)
    order = np.argsort(-shuffled, axis=1, kind="stable")
    return np.take_along_axis(perm, order[:, :plays], axis=1)


class _PolicyBase:
    kind: PolicyKind

    def __init__(self, n_arms: int, plays: int, batch: int):
        self.n_arms = n_arms
        self.plays = plays
        self.batch = batch
        self._rows = np.arange(batch)[:, None]

    def select(self, stream, t: int) -> np.ndarray:
        """(batch, plays) arm indices for round t, best-ranked first."""
        raise NotImplementedError

    def update(self, sel: np.ndarray, rewards: np.ndarray) -> None:
        """Absorb the binary rewards of the round's selection."""
        raise NotImplementedError


class MpTs(_PolicyBase):
    """Rank arms by independent Beta posterior samples; take the top plays.

    Posterior is Beta(1 + successes, 1 + failures) per arm, uniform prior.
    """

    kind = PolicyKind.MP_TS

    def __init__(self, n_arms, plays, batch):
        super().__init__(n_arms, plays, batch)
        self.alpha = np.ones((batch, n_arms))
        self.beta = np.ones((batch, n_arms))

    def select(self, stream, t):
        theta = stream.beta(t, self.alpha, self.beta)
        return rank_by_score(theta, None, self.plays)

    def update(self, sel, rewards):
        self.alpha[self._rows, sel] += rewards
        self.beta[self._rows, sel] += 1 - rewards


class ImpTs(_PolicyBase):
    """Exploit with the top plays-1 arms by empirical mean and explore one
    slot by a posterior sample over the remaining arms.

    Never-drawn arms rank below every drawn arm for the exploit slots but
    stay reachable through the sampled slot.  With plays=1 this is exactly
    single-play Thompson sampling.
    """

    kind = PolicyKind.IMP_TS

    def __init__(self, n_arms, plays, batch):
        super().__init__(n_arms, plays, batch)
        self.alpha = np.ones((batch, n_arms))
        self.beta = np.ones((batch, n_arms))
        self.counts = np.zeros((batch, n_arms), dtype=np.int64)
        self.sums = np.zeros((batch, n_arms), dtype=np.int64)

    def select(self, stream, t):
        theta = stream.beta(t, self.alpha, self.beta)
        if self.plays == 1:
            return rank_by_score(theta, None, 1)
        means = np.where(self.counts > 0, self.sums / np.maximum(self.counts, 1), -1.0)
        head = rank_by_score(means, stream.tie_keys(t, self.n_arms), self.plays - 1)
        masked = theta.copy()
        masked[self._rows, head] = -np.inf
        last = rank_by_score(masked, None, 1)
        return np.concatenate([head, last], axis=1)

    def update(self, sel, rewards):
        self.alpha[self._rows, sel] += rewards
        self.beta[self._rows, sel] += 1 - rewards
        self.counts[self._rows, sel] += 1
        self.sums[self._rows, sel] += rewards


class BcMpTs(_PolicyBase):
    """Thompson sampling corrected for position bias: the pseudo-count of an
    arm grows by its position's exposure rather than by 1, and the failure
    parameter is recomputed as max(pseudo-count - successes, 1) before each
    round's sampling.  The arm with the l-th largest sample goes to
    position l.
    """

    kind = PolicyKind.BC_MP_TS

    def __init__(self, n_arms, plays, batch, exposures):
        super().__init__(n_arms, plays, batch)
        self.alpha = np.ones((batch, n_arms))
        self.effective = np.full((batch, n_arms), 2.0)
        self.exposures = np.asarray(exposures, dtype=np.float64)

    def select(self, stream, t):
        bparam = np.maximum(self.effective - self.alpha, 1.0)
        theta = stream.beta(t, self.alpha, bparam)
        return rank_by_score(theta, None, self.plays)

    def update(self, sel, rewards):
        self.alpha[self._rows, sel] += rewards
        self.effective[self._rows, sel] += self.exposures[None, :]


class _IndexPolicy(_PolicyBase):
    def __init__(self, n_arms, plays, batch):
        super().__init__(n_arms, plays, batch)
        self.counts = np.zeros((batch, n_arms), dtype=np.int64)
        self.sums = np.zeros((batch, n_arms), dtype=np.int64)

    def _indices(self, means: np.ndarray, t: int) -> np.ndarray:
        raise NotImplementedError

    def select(self, stream, t):
        tie = stream.tie_keys(t, self.n_arms)
        undrawn = self.counts == 0
        means = np.where(undrawn, 0.0, self.sums / np.maximum(self.counts, 1))
        idx = np.where(undrawn, np.inf, self._indices(means, t))
        return rank_by_score(idx, tie, self.plays)

    def update(self, sel, rewards):
        self.counts[self._rows, sel] += 1
        self.sums[self._rows, sel] += rewards


class Cucb(_IndexPolicy):
    """Rank by ``mean + sqrt(3 ln t / (2 n))``; undrawn arms rank first."""

    kind = PolicyKind.CUCB

    def _indices(self, means, t):
        with np.errstate(divide="ignore"):
            return means + np.sqrt(1.5 * np.log(t) / np.maximum(self.counts, 1))


class MpKlUcb(_IndexPolicy):
    """Rank by the KL confidence index with budget ln t; undrawn arms rank
    first."""

    kind = PolicyKind.MP_KL_UCB

    def _indices(self, means, t):
        return kl_ucb_index_vec(means, self.counts, np.log(t))


def make_policy(kind: PolicyKind, instance: Instance, batch: int) -> _PolicyBase:
    """Fresh policy state for a batch of runs on the given instance."""
    kind = PolicyKind(kind)
    if kind.needs_cascade and not isinstance(instance, CascadeBandit):
        raise ValueError(f"policy requires cascade instance, got {type(instance).__name__}")
    k, plays = instance.n_arms, instance.plays
    if kind is PolicyKind.MP_TS:
        return MpTs(k, plays, batch)
    if kind is PolicyKind.IMP_TS:
        return ImpTs(k, plays, batch)
    if kind is PolicyKind.BC_MP_TS:
        return BcMpTs(k, plays, batch, instance.exposures)
    if kind is PolicyKind.CUCB:
        return Cucb(k, plays, batch)
    return MpKlUcb(k, plays, batch)
