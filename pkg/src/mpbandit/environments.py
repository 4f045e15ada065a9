"""Ground-truth bandit instances, reward generation, and exact per-round
regret accounting for the plain multiple-play model and the position-
discounted (cascade) model.

Instances are immutable after construction and safe to share across
workers; all randomness comes from streams owned by the caller.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "BernoulliBandit",
    "CascadeBandit",
    "draw_rewards",
    "per_round_regret",
    "reward_probs",
    "validate_selection",
]


@dataclass(frozen=True)
class BernoulliBandit:
    """K Bernoulli arms with fixed expectations, ``plays`` arms drawn per round.

    Expectations must lie in [0, 1); an expectation of exactly 0 is legal
    (one published cascade instance carries one) but warned about, since the
    regret-floor calculator rejects boundary values.
    """

    means: tuple[float, ...]
    plays: int

    def __post_init__(self):
        means = tuple(float(m) for m in self.means)
        object.__setattr__(self, "means", means)
        k = len(means)
        if k < 2:
            raise ValueError(f"need at least 2 arms, got {k}")
        if not 1 <= self.plays < k:
            raise ValueError(f"plays must satisfy 1 <= plays < {k}, got {self.plays}")
        for i, m in enumerate(means):
            if not 0.0 <= m < 1.0:
                raise ValueError(f"arm {i} expectation must lie in [0, 1), got {m!r}")
        if any(m == 0.0 for m in means):
            warnings.warn(
                "instance contains an arm with expectation exactly 0; "
                "regret-floor computation will reject it",
                UserWarning,
                stacklevel=2,
            )

    @property
    def n_arms(self) -> int:
        return len(self.means)

    @cached_property
    def means_array(self) -> np.ndarray:
        arr = np.asarray(self.means, dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def sorted_desc(self) -> np.ndarray:
        """Arm indices by expectation, best first (stable)."""
        arr = np.argsort(-self.means_array, kind="stable")
        arr.setflags(write=False)
        return arr

    @cached_property
    def boundary_mean(self) -> float:
        """Expectation of the L-th best arm."""
        return float(self.means_array[self.sorted_desc[self.plays - 1]])

    @cached_property
    def suboptimal_mask(self) -> np.ndarray:
        """True for arms strictly below the play boundary."""
        arr = self.means_array < self.boundary_mean
        arr.setflags(write=False)
        return arr

    @cached_property
    def optimal_value(self) -> float:
        """Expected one-round reward of the best selection."""
        return float(self.means_array[self.sorted_desc[: self.plays]].sum())


@dataclass(frozen=True)
class CascadeBandit:
    """Position-discounted instance: the arm at position l is observed with
    probability ``exposure(l) = prod_{j<=l, j>=2} gamma_j`` and pays 1 with
    probability ``exposure(l) * mean``.

    ``gammas`` has one entry per position; the first entry is unused and
    must be 1 (position 1 is always exposed).  Selection order matters.
    """

    base: BernoulliBandit
    gammas: tuple[float, ...]

    def __post_init__(self):
        gammas = tuple(float(g) for g in self.gammas)
        object.__setattr__(self, "gammas", gammas)
        if len(gammas) != self.base.plays:
            raise ValueError(
                f"need one discount per position ({self.base.plays}), got {len(gammas)}"
            )
        if gammas[0] != 1.0:
            raise ValueError(f"the first position's discount must be 1, got {gammas[0]!r}")
        for l, g in enumerate(gammas):
            if not 0.0 < g <= 1.0:
                raise ValueError(f"discount at position {l + 1} must lie in (0, 1], got {g!r}")

    @property
    def means(self) -> tuple[float, ...]:
        return self.base.means

    @property
    def n_arms(self) -> int:
        return self.base.n_arms

    @property
    def plays(self) -> int:
        return self.base.plays

    @cached_property
    def exposures(self) -> np.ndarray:
        """Per-position observation probabilities; 1 at position 1,
        nonincreasing in the position."""
        arr = np.cumprod(np.asarray(self.gammas, dtype=np.float64))
        arr.setflags(write=False)
        return arr

    @cached_property
    def optimal_value(self) -> float:
        """Expected one-round reward of the best placement, which for
        position-independent discounts is best arm on top."""
        best = self.base.means_array[self.base.sorted_desc[: self.plays]]
        return float(np.dot(self.exposures, best))


Instance = BernoulliBandit | CascadeBandit


def validate_selection(instance: Instance, arms) -> np.ndarray:
    """Check one round's selection: exactly ``plays`` distinct in-range arms."""
    sel = np.asarray(arms, dtype=np.int64)
    if sel.shape != (instance.plays,):
        raise ValueError(f"selection must have exactly {instance.plays} arms, got {sel.shape}")
    if np.unique(sel).size != sel.size:
        raise ValueError(f"selection contains repeated arms: {sel.tolist()}")
    if sel.min() < 0 or sel.max() >= instance.n_arms:
        raise ValueError(f"selection out of range [0, {instance.n_arms}): {sel.tolist()}")
    return sel


def reward_probs(instance: Instance, sel: np.ndarray) -> np.ndarray:
    """Per-position success probabilities of a selection (the cascade model
    defines position rewards directly through the exposure product)."""
    if isinstance(instance, CascadeBandit):
        return instance.exposures * instance.base.means_array[sel]
    return instance.means_array[sel]


def draw_rewards(instance: Instance, arms, rng: np.random.Generator) -> np.ndarray:
    """One round of binary rewards, independent across positions and rounds."""
    sel = validate_selection(instance, arms)
    p = reward_probs(instance, sel)
    return (rng.random(sel.size) < p).astype(np.int64)


def per_round_regret(instance: Instance, arms) -> float:
    """Exact expected regret of one selection.

    Set-valued (order-free) for plain instances; order-sensitive for
    cascade instances, against the best-arm-on-top placement.
    """
    sel = validate_selection(instance, arms)
    if isinstance(instance, CascadeBandit):
        got = float(np.dot(instance.exposures, instance.base.means_array[sel]))
    else:
        got = float(instance.means_array[sel].sum())
    return instance.optimal_value - got
