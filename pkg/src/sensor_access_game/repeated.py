"""Infinitely repeated play with a history-based reward/punishment strategy.

In the reward regime MA randomizes its signal, HA sends NS, and the DM
blocks S and allows NS. At a fixed stage of every reset interval HA starts
sending S. Everyone sees that deviation in the public history once the stage
ends. From the next stage until the interval resets, the DM punishes by
blocking every request.

The infinite game is cut off at ``horizon`` stages. For ``delta < 1`` any
stage with ``delta**(t-1)`` below 1e-12 adds nothing visible to the
discounted sums.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .game import DEFAULT_PARAMS, AppType, DmAction, GameParameters, Signal, payoff, require_valid

MA, HA = AppType.MALICIOUS, AppType.HONEST
S, NS = Signal.SUSPICIOUS, Signal.NON_SUSPICIOUS


class Regime(Enum):
    REWARD = "Reward"
    PUNISHMENT = "Punishment"

    def respond(self, s: Signal) -> DmAction:
        if self is Regime.PUNISHMENT or s is S:
            return DmAction.BLOCK
        return DmAction.ALLOW


@dataclass(frozen=True)
class RepeatedGameConfig:
    params: GameParameters = DEFAULT_PARAMS
    delta: float = 1.0
    horizon: int = 1000
    reset_interval: int = 100
    deviation_stage_offset: int = 50
    seed: int = 0
    use_discounting: bool = True
    ma_suspicious_prob: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must lie in [0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if not 1 <= self.deviation_stage_offset < self.reset_interval:
            raise ValueError("deviation_stage_offset must satisfy 1 <= offset < reset_interval")
        if not 0.0 <= self.ma_suspicious_prob <= 1.0:
            raise ValueError("ma_suspicious_prob must lie in [0, 1]")


@dataclass(frozen=True)
class StageRecord:
    stage: int
    nature_type: AppType
    signal: Signal
    dm_action: DmAction
    regime: Regime
    ha_signal: Signal  # HA's strategy this stage, public once the stage ends
    u_ma: float
    u_ha: float
    u_dm: float


@dataclass
class RepeatedGameTrace:
    """Stage-by-stage outcome of a repeated run.

    Each stage credits only the type Nature drew. The other type receives 0.
    ``cumulative`` holds running sums for MA, HA and DM in that column order.
    They are discounted when discounting is enabled. ``normalized`` holds
    ``(1 - delta) * cumulative``, or the running mean when ``delta == 1`` or
    discounting is off.
    """

    config: RepeatedGameConfig
    stages: list[StageRecord]
    cumulative: np.ndarray = field(repr=False)
    normalized: np.ndarray = field(repr=False)

    @property
    def final_cumulative(self) -> tuple[float, float, float]:
        return tuple(float(v) for v in self.cumulative[-1])

    @property
    def final_normalized(self) -> tuple[float, float, float]:
        return tuple(float(v) for v in self.normalized[-1])

    def summary(self) -> dict[str, float]:
        cum_ma, cum_ha, cum_dm = self.final_cumulative
        avg_ma, avg_ha, avg_dm = self.final_normalized
        return {
            "stages": len(self.stages),
            "delta": self.config.delta,
            "discounted": self.config.use_discounting,
            "cum_ma": cum_ma,
            "cum_ha": cum_ha,
            "cum_dm": cum_dm,
            "normalized_ma": avg_ma,
            "normalized_ha": avg_ha,
            "normalized_dm": avg_dm,
        }


def run_repeated(cfg: RepeatedGameConfig) -> RepeatedGameTrace:
    require_valid(cfg.params)
    params = cfg.params
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    stages: list[StageRecord] = []
    deviation_seen = False

    for t in range(1, cfg.horizon + 1):
        pos = (t - 1) % cfg.reset_interval + 1
        if pos == 1:
            deviation_seen = False
        regime = Regime.PUNISHMENT if deviation_seen else Regime.REWARD

        is_ma = rng.random() < params.theta
        ma_signal = S if rng.random() < cfg.ma_suspicious_prob else NS
        ha_signal = S if pos >= cfg.deviation_stage_offset else NS

        nature = MA if is_ma else HA
        signal = ma_signal if is_ma else ha_signal
        action = regime.respond(signal)
        app, dm = payoff(params, nature, signal, action)
        stages.append(
            StageRecord(
                stage=t,
                nature_type=nature,
                signal=signal,
                dm_action=action,
                regime=regime,
                ha_signal=ha_signal,
                u_ma=app if is_ma else 0.0,
                u_ha=0.0 if is_ma else app,
                u_dm=dm,
            )
        )
        if ha_signal is S:
            deviation_seen = True

    payoffs = np.array([[r.u_ma, r.u_ha, r.u_dm] for r in stages])
    steps = np.arange(cfg.horizon)
    if cfg.use_discounting:
        weights = np.power(cfg.delta, steps.astype(float))
    else:
        weights = np.ones(cfg.horizon)
    cumulative = np.cumsum(payoffs * weights[:, None], axis=0)
    if cfg.use_discounting and cfg.delta < 1.0:
        normalized = (1.0 - cfg.delta) * cumulative
    else:
        normalized = np.cumsum(payoffs, axis=0) / (steps + 1)[:, None]
    return RepeatedGameTrace(cfg, stages, cumulative, normalized)
