"""The CSV and metadata-sidecar formats every figure is rebuilt from.

Column order and names are fixed; floats are printed with 17 significant
digits so a re-run can be compared byte for byte.
"""

from __future__ import annotations

import json

from .harness import AggregateTrace

__all__ = ["CSV_HEADER", "render_csv", "render_meta"]

CSV_HEADER = "checkpoint_t,mean_regret,stderr_regret,mean_multisub,lower_bound"


def _fmt(x: float) -> str:
    return "%.17g" % x


def render_csv(trace: AggregateTrace) -> str:
    lines = [CSV_HEADER]
    lb = trace.lower_bound
    for i, t in enumerate(trace.checkpoints):
        lines.append(
            ",".join(
                (
                    str(int(t)),
                    _fmt(trace.mean_regret[i]),
                    _fmt(trace.stderr_regret[i]),
                    _fmt(trace.mean_multi_suboptimal[i]),
                    _fmt(lb[i]) if lb is not None else "",
                )
            )
        )
    return "\n".join(lines) + "\n"


def render_meta(
    scenario_dict: dict,
    policy: str,
    horizon: int,
    n_runs: int,
    seed: int,
    workers: int,
    checkpoints: tuple[int, ...],
    version: str,
) -> str:
    """Reproducibility sidecar: the fully resolved run configuration.
    Deliberately timestamp-free so identical runs yield identical bytes."""
    meta = {
        "scenario": scenario_dict,
        "policy": policy,
        "horizon": horizon,
        "n_runs": n_runs,
        "seed": seed,
        "workers": workers,
        "checkpoints": list(checkpoints),
        "version": version,
    }
    return json.dumps(meta, indent=2, sort_keys=True) + "\n"
