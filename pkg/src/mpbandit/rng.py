"""Counter-based random streams for reproducible parallel simulation.

Every random draw in a simulation run is addressed by a fixed coordinate
(run key, round, purpose, lane, trial) and produced by the Philox4x32-10
counter-based generator.  Two consequences:

* a run's results depend only on ``(master_seed, run_id)``, never on how
  runs are grouped into batches or distributed over workers, and
* draws for a whole batch of runs can be produced in single vectorized
  calls, because no generator state is shared or advanced.

Run keys are derived from ``(master_seed, run_id)`` with the SplitMix64
finalizer; the finalizer is a bijection, so distinct run ids under one
master seed can never collide.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

__all__ = ["BlockStream", "philox4x32_10", "run_key"]

# Philox4x32 round multipliers and Weyl key increments (Salmon et al. constants).
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)

# Purpose words: disjoint counter sub-spaces for the independent roles a
# round's randomness plays.  The low 24 bits of the packed word hold the
# rejection-trial index, so one (purpose, lane, round) cell supports up to
# 2^24 resampling attempts.
PURPOSE_GAMMA = 1
PURPOSE_TIE = 2
PURPOSE_REWARD = 3

_TRIAL_BITS = 24

_MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_2 = np.uint64(0x94D049BB133111EB)


def _mix64(x):
    """SplitMix64 finalizer; a bijection on 64-bit words (wrapping mults)."""
    with np.errstate(over="ignore"):
        x = np.asarray(x, dtype=np.uint64)
        x = x ^ (x >> np.uint64(30))
        x = x * _MIX_1
        x = x ^ (x >> np.uint64(27))
        x = x * _MIX_2
        return x ^ (x >> np.uint64(31))


def run_key(master_seed: int, run_id):
    """Derive the 64-bit Philox key of one run's stream.

    Injective in ``run_id`` for a fixed master seed, so runs of one
    experiment can never share a stream.
    """
    seed = _mix64(master_seed & 0xFFFFFFFFFFFFFFFF)
    rid = np.asarray(run_id, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix64(seed + rid)


def _philox_rounds(c0, c1, c2, c3, round_k0, round_k1):
    """Philox4x32-10 core on uint64 words holding 32-bit values.

    ``round_k0``/``round_k1`` are the ten pre-bumped key words, already
    broadcastable against the counters.  Products of two 32-bit values are
    exact in uint64, so no masking is needed until the split.
    """
    for r in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0 = (p1 >> _SHIFT32) ^ c1 ^ round_k0[r]
        c1 = p1 & _MASK32
        c2_new = (p0 >> _SHIFT32) ^ c3 ^ round_k1[r]
        c3 = p0 & _MASK32
        c2 = c2_new
    return c0, c1, c2, c3


def philox4x32_10(c0, c1, c2, c3, k0, k1):
    """One Philox4x32-10 block: four 32-bit counter words -> four output
    words.  Arguments broadcast; matches the reference known-answer vectors
    for the 10-round variant."""
    k0 = np.asarray(k0, dtype=np.uint64)
    k1 = np.asarray(k1, dtype=np.uint64)
    rk0 = [(k0 + np.uint64(r) * _W0) & _MASK32 for r in range(10)]
    rk1 = [(k1 + np.uint64(r) * _W1) & _MASK32 for r in range(10)]
    words = _philox_rounds(
        np.asarray(c0, dtype=np.uint64) & _MASK32,
        np.asarray(c1, dtype=np.uint64) & _MASK32,
        np.asarray(c2, dtype=np.uint64) & _MASK32,
        np.asarray(c3, dtype=np.uint64) & _MASK32,
        rk0,
        rk1,
    )
    return tuple(w.astype(np.uint32) for w in words)


def _to_unit(hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    """Two 32-bit output words -> one double, strictly inside (0, 1)."""
    bits = (hi << _SHIFT32) | lo
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * (2.0**-53)


def _pack_purpose(purpose: int, trial: int) -> np.uint64:
    if trial >= (1 << _TRIAL_BITS):
        raise OverflowError("rejection trial index exceeded counter budget")
    return np.uint64((purpose << _TRIAL_BITS) | trial)


class BlockStream:
    """Random source for a batch of runs, one Philox key per run.

    One Philox block per (run, lane, round, purpose, trial) coordinate
    yields two independent uniforms; everything else is built on top.
    Uniforms lie strictly inside (0, 1) (midpoints of the 2^-53 grid),
    which keeps log/ndtri transforms finite.
    """

    def __init__(self, master_seed: int, run_ids):
        run_ids = np.atleast_1d(np.asarray(run_ids, dtype=np.uint64))
        if run_ids.ndim != 1 or run_ids.size == 0:
            raise ValueError("run_ids must be a non-empty 1-d sequence")
        keys = run_key(master_seed, run_ids)
        self.n_runs = int(run_ids.size)
        k0 = keys & _MASK32
        k1 = keys >> _SHIFT32
        rounds = np.arange(10, dtype=np.uint64)[:, None]
        self._rk0 = (k0[None, :] + rounds * _W0) & _MASK32  # (10, n_runs)
        self._rk1 = (k1[None, :] + rounds * _W1) & _MASK32

    def _pair_grid(self, t: int, word: np.uint64, n_lanes: int):
        """Two (n_runs, n_lanes) uniform matrices at one counter coordinate."""
        lanes = np.arange(n_lanes, dtype=np.uint64)[None, :]
        w0, w1, w2, w3 = _philox_rounds(
            lanes,
            word,
            np.uint64(t & 0xFFFFFFFF),
            np.uint64((t >> 32) & 0xFFFFFFFF),
            self._rk0[:, :, None],
            self._rk1[:, :, None],
        )
        return _to_unit(w0, w1), _to_unit(w2, w3)

    def uniforms(self, t: int, purpose: int, n_lanes: int, trial: int = 0) -> np.ndarray:
        """(n_runs, n_lanes) uniforms in (0, 1)."""
        u1, _ = self._pair_grid(t, _pack_purpose(purpose, trial), n_lanes)
        return u1

    def tie_keys(self, t: int, n_lanes: int) -> np.ndarray:
        return self.uniforms(t, PURPOSE_TIE, n_lanes)

    def reward_uniforms(self, t: int, n_positions: int) -> np.ndarray:
        return self.uniforms(t, PURPOSE_REWARD, n_positions)

    def _beta_layout(self, n_lanes: int):
        """Cached flat (lanes, round keys) for the 2 * n_runs * n_lanes gamma
        cells behind a beta matrix; the layout is round-invariant."""
        cached = getattr(self, "_beta_cache", None)
        if cached is not None and cached[0] == n_lanes:
            return cached[1:]
        lanes = np.arange(n_lanes, dtype=np.uint64)
        lanes = np.concatenate(
            [np.tile(lanes, self.n_runs), np.tile(lanes + np.uint64(n_lanes), self.n_runs)]
        )
        rows = np.tile(np.repeat(np.arange(self.n_runs), n_lanes), 2)
        rk0 = np.ascontiguousarray(self._rk0[:, rows])
        rk1 = np.ascontiguousarray(self._rk1[:, rows])
        self._beta_cache = (n_lanes, lanes, rk0, rk1)
        return lanes, rk0, rk1

    def beta(self, t: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """(n_runs, K) independent Beta(a, b) samples; a, b >= 1 elementwise.

        Computed as the usual ratio of two standard-gamma draws; both draws
        of one cell share (run, round) but occupy disjoint counter lanes.
        """
        a = np.asarray(a, dtype=np.float64)
        n_lanes = a.shape[-1]
        a = np.broadcast_to(a, (self.n_runs, n_lanes))
        b = np.broadcast_to(np.asarray(b, dtype=np.float64), a.shape)
        shapes = np.concatenate([a.ravel(), b.ravel()])
        lanes, rk0, rk1 = self._beta_layout(n_lanes)
        g = self._standard_gamma(t, shapes, lanes, rk0, rk1)
        ga = g[: a.size].reshape(a.shape)
        gb = g[a.size :].reshape(a.shape)
        return ga / (ga + gb)

    def _standard_gamma(self, t: int, shapes, lanes, rk0, rk1) -> np.ndarray:
        """Marsaglia-Tsang sampler for shape >= 1 over scattered cells, with
        per-cell rejection trials addressed through the counter (an exact
        method; acceptance is ~0.95 and up for shape >= 1)."""
        if np.any(shapes < 1.0):
            raise ValueError("gamma shape parameters must be >= 1")
        t_lo = np.uint64(t & 0xFFFFFFFF)
        t_hi = np.uint64((t >> 32) & 0xFFFFFFFF)
        d = shapes - 1.0 / 3.0
        c = 1.0 / np.sqrt(9.0 * d)
        out = np.empty_like(d)
        pending = None  # all cells on the first trial; index subsets after
        trial = 0
        while pending is None or pending.size:
            if pending is None:
                cur_lanes, cur_rk0, cur_rk1 = lanes, rk0, rk1
                dd, cc = d, c
            else:
                cur_lanes = lanes[pending]
                cur_rk0, cur_rk1 = rk0[:, pending], rk1[:, pending]
                dd, cc = d[pending], c[pending]
            word = _pack_purpose(PURPOSE_GAMMA, trial)
            w0, w1, w2, w3 = _philox_rounds(cur_lanes, word, t_lo, t_hi, cur_rk0, cur_rk1)
            x = ndtri(_to_unit(w0, w1))
            v = (1.0 + cc * x) ** 3
            pos = v > 0.0
            logv = np.log(v, out=np.zeros_like(v), where=pos)
            accept = pos & (np.log(_to_unit(w2, w3)) < 0.5 * x * x + dd - dd * v + dd * logv)
            if pending is None:
                out = np.where(accept, d * v, 0.0)
                pending = np.nonzero(~accept)[0]
            else:
                hit = pending[accept]
                out[hit] = d[hit] * v[accept]
                pending = pending[~accept]
            trial += 1
        return out
