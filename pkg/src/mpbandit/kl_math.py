"""Scalar kernels for Bernoulli bandits: KL divergence, confidence indices,
the asymptotic regret-floor coefficient, and the CDF/tail oracles the test
suite leans on.

Edge conventions, fixed here once for every caller:

* ``0 * log(0/x) = 0``;
* ``d(p, q) = +inf`` when ``q`` is 0 or 1 and ``p != q``;
* ``d(p, p) = 0`` including at the boundary.

All logarithms are natural.  The confidence index for UCB uses a natural
log as well; a different base would silently rescale every bound curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy

__all__ = [
    "ArmTerm",
    "LowerBoundReport",
    "MarginalTieError",
    "bernoulli_kl",
    "bernoulli_kl_vec",
    "beta_cdf_integer",
    "chernoff_tail_bound",
    "cucb_index",
    "kl_ucb_index",
    "kl_ucb_index_vec",
    "lower_bound_coefficient",
]

# Bisection for the KL-UCB index: absolute tolerance on q and an iteration
# cap that is unreachable for tol 1e-9 on a unit interval.
KL_UCB_TOL = 1e-9
KL_UCB_MAX_ITER = 200


class MarginalTieError(ValueError):
    """The L-th and (L+1)-th largest expectations coincide, so the
    logarithmic regret floor is undefined for the instance."""

    def __init__(self, value: float, indices):
        self.value = value
        self.indices = tuple(indices)
        super().__init__(
            f"marginal arms tied at expectation {value!r} (arm indices {self.indices}); "
            "the regret floor requires a strict gap at the play boundary"
        )


def _check_unit(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0 or math.isnan(x):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return x


def bernoulli_kl(p: float, q: float) -> float:
    """KL divergence d(p, q) between Bernoulli(p) and Bernoulli(q), in nats."""
    p = _check_unit(p, "p")
    q = _check_unit(q, "q")
    if p == q:
        return 0.0
    if q <= 0.0 or q >= 1.0:
        return math.inf
    out = 0.0
    if p > 0.0:
        out += p * math.log(p / q)
    if p < 1.0:
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


def bernoulli_kl_vec(p, q):
    """Vectorized ``bernoulli_kl`` with the same conventions (array math for
    the simulation engine; agrees elementwise with the scalar kernel)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = xlogy(p, p) - xlogy(p, q) + xlogy(1.0 - p, 1.0 - p) - xlogy(1.0 - p, 1.0 - q)
    return np.where(p == q, 0.0, out)


def kl_ucb_index(mean: float, n: int, budget: float) -> float:
    """Largest q in [mean, 1] with ``n * d(mean, q) <= budget``.

    Bisection on q, exploiting that d(mean, .) is nondecreasing on
    [mean, 1]; robust at the q -> 1 singularity.
    """
    mean = _check_unit(mean, "mean")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if budget < 0.0:
        raise ValueError(f"budget must be >= 0, got {budget!r}")
    if mean >= 1.0 or budget == 0.0:
        return mean
    lo, hi = mean, 1.0
    for _ in range(KL_UCB_MAX_ITER):
        if hi - lo <= KL_UCB_TOL:
            break
        mid = 0.5 * (lo + hi)
        if n * bernoulli_kl(mean, mid) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


def kl_ucb_index_vec(means: np.ndarray, counts: np.ndarray, budget: float) -> np.ndarray:
    """Batched KL-UCB index; 40 fixed bisection steps put the result well
    inside the scalar solver's 1e-9 tolerance (interval width 2^-40).

    The feasibility test is rearranged so the entropy part of the
    divergence is computed once outside the loop:
    ``d(p, q) <= budget/n  <=>  -p ln q - (1-p) ln(1-q) <= budget/n + H(p)``.
    """
    means = np.asarray(means, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    one_minus = 1.0 - means
    with np.errstate(divide="ignore", invalid="ignore"):
        target = budget / counts - (xlogy(means, means) + xlogy(one_minus, one_minus))
        lo = means.copy()
        hi = np.ones_like(lo)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            val = -(means * np.log(mid) + one_minus * np.log1p(-mid))
            ok = val <= target
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
    return lo


def cucb_index(mean: float, n: int, t: float) -> float:
    """Confidence index ``mean + sqrt(3 ln t / (2 n))``; deliberately not
    clipped to [0, 1] (clipping never changes a top-L ranking)."""
    mean = _check_unit(mean, "mean")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    return mean + math.sqrt(3.0 * math.log(t) / (2.0 * n))


@dataclass(frozen=True)
class ArmTerm:
    """One arm's contribution to the logarithmic regret floor."""

    arm: int
    gap: float
    kl: float
    coefficient: float


@dataclass(frozen=True)
class LowerBoundReport:
    """Per-arm terms and total slope of the asymptotic regret floor,
    in units of regret per natural-log round."""

    per_arm_terms: tuple[ArmTerm, ...]
    total_coefficient: float

    def value_at(self, t: float) -> float:
        return self.total_coefficient * math.log(t)


def lower_bound_coefficient(means, plays: int) -> LowerBoundReport:
    """Slope of the asymptotic regret floor: sum over arms below the play
    boundary of gap / d(mean_i, mean_L).

    Requires a strict gap between the L-th and (L+1)-th largest means;
    ties elsewhere are fine.  Boundary means (0 or 1) are rejected even
    though instances may carry them, because the coefficient formula
    degenerates there.
    """
    mus = [float(m) for m in means]
    k = len(mus)
    if not 1 <= plays < k:
        raise ValueError(f"plays must satisfy 1 <= plays < {k}, got {plays}")
    for i, m in enumerate(mus):
        if not 0.0 < m < 1.0:
            raise ValueError(
                f"arm {i} has expectation {m!r}; the regret floor needs all "
                "expectations strictly inside (0, 1)"
            )
    order = sorted(range(k), key=lambda i: -mus[i])
    mu_l = mus[order[plays - 1]]
    mu_next = mus[order[plays]]
    if mu_l == mu_next:
        tied = [i for i in order if mus[i] == mu_l]
        raise MarginalTieError(mu_l, tied)
    terms = []
    for i in range(k):
        if mus[i] < mu_l:
            # Gaps are rounded at 12 decimals to cancel binary rounding fuzz
            # in decimal-specified instances (e.g. 0.6 - 0.5 prints as 0.1);
            # the perturbation is ~1e-16 relative, far below report precision.
            gap = round(mu_l - mus[i], 12)
            kl = bernoulli_kl(mus[i], mu_l)
            terms.append(ArmTerm(arm=i, gap=gap, kl=kl, coefficient=gap / kl))
    total = sum(term.coefficient for term in terms)
    return LowerBoundReport(per_arm_terms=tuple(terms), total_coefficient=total)


def beta_cdf_integer(a: int, b: int, y: float) -> float:
    """Beta(a, b) CDF at y for integer parameters, evaluated through the
    binomial identity ``F_beta(a, b; y) = 1 - F_binom(a+b-1, y; a-1)``.

    The binomial CDF is a sum of log-space probability terms added in
    increasing magnitude, stable up to a + b around 1e4.
    """
    if a < 1 or b < 1 or a != int(a) or b != int(b):
        raise ValueError(f"parameters must be integers >= 1, got ({a!r}, {b!r})")
    y = _check_unit(y, "y")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 1.0
    n = int(a) + int(b) - 1
    ks = np.arange(int(a), dtype=np.float64)
    log_terms = (
        gammaln(n + 1.0)
        - gammaln(ks + 1.0)
        - gammaln(n - ks + 1.0)
        + ks * math.log(y)
        + (n - ks) * math.log1p(-y)
    )
    terms = np.exp(log_terms)
    return float(1.0 - np.sum(np.sort(terms)))


def chernoff_tail_bound(mean: float, n: int, epsilon: float, tail: str = "upper") -> float:
    """Exponential bound on the deviation of an empirical Bernoulli mean:
    ``exp(-n * d(mean +/- epsilon, mean))`` for the upper/lower tail."""
    mean = _check_unit(mean, "mean")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if tail == "upper":
        if not 0.0 < epsilon < 1.0 - mean:
            raise ValueError(f"upper tail needs 0 < epsilon < {1.0 - mean}, got {epsilon!r}")
        shifted = mean + epsilon
    elif tail == "lower":
        if not 0.0 < epsilon < mean:
            raise ValueError(f"lower tail needs 0 < epsilon < {mean}, got {epsilon!r}")
        shifted = mean - epsilon
    else:
        raise ValueError(f"tail must be 'upper' or 'lower', got {tail!r}")
    return math.exp(-n * bernoulli_kl(shifted, mean))
