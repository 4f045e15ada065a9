"""Scenario presets and the scenario-file format.

A scenario file is YAML with the keys ``name, arms, L, gammas, policy, T,
n_runs, seed, checkpoints``; only ``arms`` and ``L`` are mandatory, the
rest supply run defaults that command-line flags may override.  Unknown
keys are errors, not warnings: a typo in a config should never silently
change an experiment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import yaml

from .environments import BernoulliBandit, CascadeBandit, Instance

__all__ = ["PRESETS", "Scenario", "resolve_scenario"]

# Seed of the one-off draw behind the synthetic many-arm preset (a stand-in
# for click-log scenarios, with click-rate-scale expectations).
SYNTHETIC_MANY_SEED = 20150731
_FILE_KEYS = ("name", "arms", "L", "gammas", "policy", "T", "n_runs", "seed", "checkpoints")


@dataclass(frozen=True)
class Scenario:
    """Instance definition plus optional run defaults."""

    name: str
    arms: tuple[float, ...]
    plays: int
    gammas: tuple[float, ...] | None = None
    policy: str | None = None
    horizon: int | None = None
    n_runs: int | None = None
    seed: int | None = None
    checkpoints: tuple[int, ...] | None = None

    def instance(self) -> Instance:
        base = BernoulliBandit(means=self.arms, plays=self.plays)
        if self.gammas is None:
            return base
        return CascadeBandit(base=base, gammas=self.gammas)

    @property
    def is_cascade(self) -> bool:
        return self.gammas is not None

    def to_dict(self) -> dict:
        out = {"name": self.name, "arms": list(self.arms), "L": self.plays}
        if self.gammas is not None:
            out["gammas"] = list(self.gammas)
        for key, value in (
            ("policy", self.policy),
            ("T", self.horizon),
            ("n_runs", self.n_runs),
            ("seed", self.seed),
        ):
            if value is not None:
                out[key] = value
        if self.checkpoints is not None:
            out["checkpoints"] = list(self.checkpoints)
        return out

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict, name: str = "inline") -> "Scenario":
        if not isinstance(data, dict):
            raise ValueError(f"scenario config must be a mapping, got {type(data).__name__}")
        unknown = sorted(set(data) - set(_FILE_KEYS))
        if unknown:
            raise ValueError(f"unknown scenario keys: {', '.join(unknown)}")
        for key in ("arms", "L"):
            if key not in data:
                raise ValueError(f"scenario config is missing required key '{key}'")
        return cls(
            name=str(data.get("name", name)),
            arms=tuple(float(a) for a in data["arms"]),
            plays=int(data["L"]),
            gammas=tuple(float(g) for g in data["gammas"]) if "gammas" in data else None,
            policy=str(data["policy"]) if "policy" in data else None,
            horizon=int(data["T"]) if "T" in data else None,
            n_runs=int(data["n_runs"]) if "n_runs" in data else None,
            seed=int(data["seed"]) if "seed" in data else None,
            checkpoints=tuple(int(c) for c in data["checkpoints"])
            if "checkpoints" in data
            else None,
        )

    @classmethod
    def from_yaml(cls, text: str, name: str = "inline") -> "Scenario":
        return cls.from_dict(yaml.safe_load(text), name=name)


def _synthetic_many_arms(n_arms: int = 60) -> tuple[float, ...]:
    """Click-rate-scale expectations drawn once from a pinned stream."""
    gen = np.random.Generator(np.random.Philox(key=SYNTHETIC_MANY_SEED))
    return tuple(float(x) for x in gen.uniform(0.01, 0.07, size=n_arms))


PRESETS: dict[str, Scenario] = {
    "scenario1": Scenario(name="scenario1", arms=(0.7, 0.6, 0.5, 0.4, 0.3), plays=2),
    "scenario2": Scenario(
        name="scenario2",
        arms=(0.15, 0.12, 0.10) + (0.05,) * 9 + (0.03,) * 8,
        plays=3,
    ),
    "cascade9": Scenario(
        name="cascade9",
        arms=tuple(round(0.24 - 0.03 * i, 2) for i in range(9)),
        plays=3,
        gammas=(1.0, 0.7, 0.7),
    ),
    "synthetic-many": Scenario(name="synthetic-many", arms=_synthetic_many_arms(), plays=3),
}


def resolve_scenario(spec: str, text_loader=None) -> Scenario:
    """Look up a preset by name or parse a scenario file.

    ``text_loader`` maps a non-preset spec to file text (defaults to
    reading the path); it exists so client code can resolve files before
    shipping the scenario elsewhere.
    """
    if spec in PRESETS:
        return PRESETS[spec]
    if text_loader is None:
        def text_loader(path):
            with open(path, "r", encoding="utf-8") as fh:
                return fh.read()
    try:
        text = text_loader(spec)
    except OSError as exc:
        raise ValueError(
            f"unknown scenario {spec!r}: not a preset ({', '.join(sorted(PRESETS))}) "
            f"and not a readable file ({exc})"
        ) from None
    return Scenario.from_yaml(text, name=spec)
