"""HTTP service wrapping the simulation library.

Endpoints mirror the command-line surface: POST /run executes a batch and
returns the CSV text plus its metadata sidecar verbatim, POST /lowerbound
evaluates the regret-floor coefficient, GET /scenarios lists presets.
Returning the CSV as text (rather than re-encoded numbers) keeps the
byte-reproducibility contract intact across the HTTP boundary.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .environments import CascadeBandit
from .harness import RunConfig, run_batch
from .kl_math import MarginalTieError, lower_bound_coefficient
from .output import render_csv, render_meta
from .policies import PolicyKind
from .scenarios import PRESETS, Scenario

__all__ = ["app"]

CASCADE_BOUND_NOTE = (
    "position-discounted instance: the reported coefficient is the "
    "undiscounted regret floor, which for position-independent discounts "
    "is conjectured, not proven, to stay valid"
)


class ScenarioPayload(BaseModel):
    """A preset name or a fully inline scenario definition."""

    preset: str | None = None
    name: str | None = None
    arms: list[float] | None = None
    plays: int | None = Field(default=None, alias="L")
    gammas: list[float] | None = None

    model_config = {"populate_by_name": True}

    def resolve(self) -> Scenario:
        if self.preset is not None:
            try:
                return PRESETS[self.preset]
            except KeyError:
                raise HTTPException(
                    status_code=404,
                    detail=f"unknown preset {self.preset!r}; have {sorted(PRESETS)}",
                ) from None
        if self.arms is None or self.plays is None:
            raise HTTPException(
                status_code=422,
                detail="scenario needs either a preset name or inline arms and L",
            )
        return Scenario(
            name=self.name or "inline",
            arms=tuple(self.arms),
            plays=self.plays,
            gammas=tuple(self.gammas) if self.gammas is not None else None,
        )


class RunRequest(BaseModel):
    scenario: ScenarioPayload
    policy: str
    horizon: int
    n_runs: int = 100
    seed: int = 0
    workers: int = 1
    checkpoints: list[int] | None = None


class RunResponse(BaseModel):
    csv: str
    meta: str


class ArmTermModel(BaseModel):
    arm: int
    gap: float
    kl: float
    coefficient: float


class LowerBoundRequest(BaseModel):
    scenario: ScenarioPayload
    at: float | None = None


class LowerBoundResponse(BaseModel):
    per_arm: list[ArmTermModel]
    total_coefficient: float
    value_at: float | None = None
    note: str | None = None


class ScenarioInfo(BaseModel):
    name: str
    n_arms: int
    plays: int
    cascade: bool
    policies: list[str]


app = FastAPI(title="mpbandit", version=__version__)


def _build_config(req: RunRequest) -> tuple[Scenario, RunConfig]:
    scenario = req.scenario.resolve()
    try:
        policy = PolicyKind(req.policy)
    except ValueError:
        raise HTTPException(
            status_code=422,
            detail=f"unknown policy {req.policy!r}; have {[k.value for k in PolicyKind]}",
        ) from None
    try:
        config = RunConfig(
            instance=scenario.instance(),
            policy=policy,
            horizon=req.horizon,
            n_runs=req.n_runs,
            master_seed=req.seed,
            checkpoints=tuple(req.checkpoints) if req.checkpoints else (),
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return scenario, config


@app.post("/run", response_model=RunResponse)
def run_endpoint(req: RunRequest) -> RunResponse:
    scenario, config = _build_config(req)
    if req.workers < 1:
        raise HTTPException(status_code=422, detail="workers must be >= 1")
    trace = run_batch(config, workers=req.workers)
    meta = render_meta(
        scenario_dict=scenario.to_dict(),
        policy=config.policy.value,
        horizon=config.horizon,
        n_runs=config.n_runs,
        seed=config.master_seed,
        workers=req.workers,
        checkpoints=config.checkpoints,
        version=__version__,
    )
    return RunResponse(csv=render_csv(trace), meta=meta)


@app.post("/lowerbound", response_model=LowerBoundResponse)
def lowerbound_endpoint(req: LowerBoundRequest) -> LowerBoundResponse:
    scenario = req.scenario.resolve()
    instance = scenario.instance()
    base = instance.base if isinstance(instance, CascadeBandit) else instance
    try:
        report = lower_bound_coefficient(base.means, base.plays)
    except MarginalTieError as exc:
        raise HTTPException(
            status_code=422,
            detail=f"marginal tie: arms {list(exc.indices)} share expectation {exc.value}",
        ) from None
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return LowerBoundResponse(
        per_arm=[
            ArmTermModel(arm=t.arm, gap=t.gap, kl=t.kl, coefficient=t.coefficient)
            for t in report.per_arm_terms
        ],
        total_coefficient=report.total_coefficient,
        value_at=report.value_at(req.at) if req.at is not None else None,
        note=CASCADE_BOUND_NOTE if scenario.is_cascade else None,
    )


@app.get("/scenarios", response_model=list[ScenarioInfo])
def scenarios_endpoint() -> list[ScenarioInfo]:
    out = []
    for name, sc in PRESETS.items():
        policies = [k.value for k in PolicyKind if sc.is_cascade or not k.needs_cascade]
        out.append(
            ScenarioInfo(
                name=name,
                n_arms=len(sc.arms),
                plays=sc.plays,
                cascade=sc.is_cascade,
                policies=policies,
            )
        )
    return out
