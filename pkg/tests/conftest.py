import numpy as np
import pytest


class StubStream:
    """Stream double that returns injected posterior samples and tie keys,
    recording the Beta parameters it was asked for."""

    def __init__(self, theta=None, tie=None):
        self.theta = theta
        self.tie = tie
        self.beta_calls = []

    def beta(self, t, a, b):
        self.beta_calls.append((np.array(a, dtype=float), np.array(b, dtype=float)))
        return np.atleast_2d(np.asarray(self.theta, dtype=float)).copy()

    def tie_keys(self, t, n_lanes):
        if self.tie is not None:
            return np.atleast_2d(np.asarray(self.tie, dtype=float))
        return np.random.default_rng(10_000 + t).random((1, n_lanes))


@pytest.fixture
def stub_stream():
    return StubStream
