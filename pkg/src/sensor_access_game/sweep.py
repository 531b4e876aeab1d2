"""Monte Carlo theta sweeps of single-stage play, with their closed-form expectations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .beliefs import bayes_update, dm_best_response
from .game import (
    DEFAULT_PARAMS,
    EPS_INDIFF,
    AppType,
    DmAction,
    GameParameters,
    Signal,
    payoff,
    payoff_table,
    require_valid,
)

MA, HA = AppType.MALICIOUS, AppType.HONEST
S, NS = Signal.SUSPICIOUS, Signal.NON_SUSPICIOUS


class Scenario(Enum):
    SEPARATING_S_NS = "SeparatingSNS"
    POOLING_S_S = "PoolingSS"
    HYBRID_MS_HS = "HybridMsHs"
    MIXED_RANDOM = "MixedRandom"


class DegenerateSample(LookupError):
    """A sweep cell has no draws of the requested type."""


def default_theta_grid(step: float = 0.1) -> list[float]:
    count = round(1 / step)
    return [round(i * step, 12) for i in range(count + 1)]


@dataclass(frozen=True)
class SweepConfig:
    scenario: Scenario = Scenario.SEPARATING_S_NS
    theta_grid: tuple[float, ...] = field(default_factory=lambda: tuple(default_theta_grid()))
    iterations_per_point: int = 500
    seed: int = 0
    params: GameParameters = DEFAULT_PARAMS
    off_path_belief: float = 1.0
    eps: float = EPS_INDIFF

    def __post_init__(self):
        grid = tuple(float(t) for t in self.theta_grid)
        object.__setattr__(self, "theta_grid", grid)
        if not grid:
            raise ValueError("theta_grid is empty")
        if any(not 0.0 <= t <= 1.0 for t in grid):
            raise ValueError("theta_grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("theta_grid must be strictly increasing")
        if self.iterations_per_point < 1:
            raise ValueError("iterations_per_point must be at least 1")
        if not 0.0 <= self.off_path_belief <= 1.0:
            raise ValueError("off_path_belief must lie in [0, 1]")


@dataclass(frozen=True)
class SweepRow:
    """Averages at one theta.

    ``avg_payoff_ma`` and ``avg_payoff_ha`` are conditional on the type and
    are None when the type was never drawn. ``avg_eu_dm`` averages over all
    iterations. The ``se_*`` fields hold the standard errors of those means.
    In closed-form rows the sample counts are expected counts.
    """

    theta: float
    avg_payoff_ma: float | None
    avg_payoff_ha: float | None
    avg_eu_dm: float
    n_ma_samples: float
    n_ha_samples: float
    se_ma: float = 0.0
    se_ha: float = 0.0
    se_dm: float = 0.0

    def require(self, t: AppType) -> float:
        value = self.avg_payoff_ma if t is MA else self.avg_payoff_ha
        if value is None:
            raise DegenerateSample(f"no {t.short} draws at theta={self.theta!r}")
        return value

    def per_iteration(self, t: AppType) -> float:
        """Type payoff averaged over all iterations, counting 0 when absent."""
        value = self.avg_payoff_ma if t is MA else self.avg_payoff_ha
        count = self.n_ma_samples if t is MA else self.n_ha_samples
        total = self.n_ma_samples + self.n_ha_samples
        return 0.0 if value is None else value * count / total


def _point_params(cfg: SweepConfig, theta: float) -> GameParameters:
    return cfg.params.with_(theta=theta)


def _pooling_action(params: GameParameters, eps: float) -> DmAction:
    # Ties resolve to Block, matching the non-strict block condition.
    return dm_best_response(params, S, params.theta, eps).resolve(DmAction.BLOCK)


def _mean_se(values: np.ndarray) -> tuple[float | None, float]:
    if values.size == 0:
        return None, math.nan
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.nan
    return mean, se


def _simulate_point(cfg: SweepConfig, theta: float, rng: np.random.Generator) -> SweepRow:
    params = _point_params(cfg, theta)
    app_tab, dm_tab = payoff_table(params)
    k = cfg.iterations_per_point
    sc = cfg.scenario

    is_ma = rng.random(k) < theta
    types = np.where(is_ma, int(MA), int(HA))

    if sc is Scenario.SEPARATING_S_NS:
        m, n = np.ones(k), np.zeros(k)
    elif sc is Scenario.POOLING_S_S:
        m, n = np.ones(k), np.ones(k)
    elif sc is Scenario.HYBRID_MS_HS:
        m, n = rng.random(k), np.ones(k)
    else:
        m, n, x, y = rng.random(k), rng.random(k), rng.random(k), rng.random(k)

    sends_s = rng.random(k) < np.where(is_ma, m, n)
    signals = np.where(sends_s, int(S), int(NS))

    if sc is Scenario.SEPARATING_S_NS:
        block = sends_s
    elif sc is Scenario.POOLING_S_S:
        a_s = _pooling_action(params, cfg.eps)
        a_ns = dm_best_response(params, NS, cfg.off_path_belief, cfg.eps).resolve(DmAction.BLOCK)
        block = np.where(sends_s, a_s is DmAction.BLOCK, a_ns is DmAction.BLOCK)
    elif sc is Scenario.HYBRID_MS_HS:
        block = np.empty(k, dtype=bool)
        for i in range(k):
            beliefs = bayes_update(theta, float(m[i]), 1.0, cfg.off_path_belief, cfg.off_path_belief)
            s = S if sends_s[i] else NS
            br = dm_best_response(params, s, beliefs.at(s), cfg.eps)
            block[i] = br.resolve(DmAction.BLOCK) is DmAction.BLOCK
    else:
        block = rng.random(k) < np.where(sends_s, y, x)

    actions = np.where(block, int(DmAction.BLOCK), int(DmAction.ALLOW))
    app = app_tab[types, signals, actions]
    dm = dm_tab[types, signals, actions]

    avg_ma, se_ma = _mean_se(app[is_ma])
    avg_ha, se_ha = _mean_se(app[~is_ma])
    avg_dm, se_dm = _mean_se(dm)
    return SweepRow(
        theta=theta,
        avg_payoff_ma=avg_ma,
        avg_payoff_ha=avg_ha,
        avg_eu_dm=avg_dm,
        n_ma_samples=int(is_ma.sum()),
        n_ha_samples=int((~is_ma).sum()),
        se_ma=se_ma,
        se_ha=se_ha,
        se_dm=se_dm,
    )


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """Simulate ``iterations_per_point`` stage games at every theta in the grid.

    Each grid point draws from its own child stream of ``cfg.seed``. Points
    can therefore be computed in any order, or in parallel, and still give
    identical results.
    """
    require_valid(cfg.params.with_(theta=cfg.theta_grid[0]))
    streams = np.random.SeedSequence(cfg.seed).spawn(len(cfg.theta_grid))
    return [
        _simulate_point(cfg, theta, np.random.default_rng(ss))
        for theta, ss in zip(cfg.theta_grid, streams)
    ]


def _hybrid_cut(params: GameParameters, eps: float) -> float:
    """Smallest MA sending probability m at which the DM blocks S (HA always sends S)."""
    theta = params.theta
    if params.kappa + params.beta + params.phi == 0:
        return 0.0  # always indifferent, ties go to Block
    if theta == 0.0:
        blocks = dm_best_response(params, S, 0.0, eps).resolve() is DmAction.BLOCK
        return 0.0 if blocks else 1.0
    thr = params.threshold
    if thr >= 1.0:
        return 1.0
    return min(max(thr * (1 - theta) / (theta * (1 - thr)), 0.0), 1.0)


def _expected_moments(cfg: SweepConfig, params: GameParameters, power: int):
    """E[X**power | MA], E[X**power | HA] for app payoffs, and the same for DM payoffs."""
    sc = cfg.scenario

    def leaf(t, s, a):
        app, dm = payoff(params, t, s, a)
        return app**power, dm**power

    if sc is Scenario.SEPARATING_S_NS:
        (eu_ma, dm_ma), (eu_ha, dm_ha) = leaf(MA, S, DmAction.BLOCK), leaf(HA, NS, DmAction.ALLOW)
    elif sc is Scenario.POOLING_S_S:
        a = _pooling_action(params, cfg.eps)
        (eu_ma, dm_ma), (eu_ha, dm_ha) = leaf(MA, S, a), leaf(HA, S, a)
    elif sc is Scenario.HYBRID_MS_HS:
        # m ~ U(0, 1); the DM blocks S iff m >= cut, and blocks NS (only MA sends it).
        cut = _hybrid_cut(params, cfg.eps)
        a_ns = dm_best_response(params, NS, 1.0, cfg.eps).resolve()
        s_allow, s_block, ns_ma = leaf(MA, S, DmAction.ALLOW), leaf(MA, S, DmAction.BLOCK), leaf(MA, NS, a_ns)
        # E[m 1{m<c}] = c^2/2, E[m 1{m>=c}] = (1-c^2)/2, E[1-m] = 1/2
        w_allow, w_block = cut * cut / 2, (1 - cut * cut) / 2
        eu_ma, dm_ma = (w_allow * s_allow[i] + w_block * s_block[i] + 0.5 * ns_ma[i] for i in (0, 1))
        s_allow, s_block = leaf(HA, S, DmAction.ALLOW), leaf(HA, S, DmAction.BLOCK)
        eu_ha, dm_ha = (cut * s_allow[i] + (1 - cut) * s_block[i] for i in (0, 1))
    else:
        # Independent uniform m, n, x, y: leaf probabilities are multilinear, so
        # their means are the values at m = n = x = y = 1/2.
        leaves = {t: [leaf(t, s, a) for s in Signal for a in DmAction] for t in AppType}
        eu_ma, dm_ma = (sum(v[i] for v in leaves[MA]) / 4 for i in (0, 1))
        eu_ha, dm_ha = (sum(v[i] for v in leaves[HA]) / 4 for i in (0, 1))
    return eu_ma, eu_ha, dm_ma, dm_ha


def _expected_point(cfg: SweepConfig, theta: float) -> SweepRow:
    params = _point_params(cfg, theta)
    k = cfg.iterations_per_point
    eu_ma, eu_ha, dm_ma, dm_ha = _expected_moments(cfg, params, 1)
    sq_ma, sq_ha, sq_dm_ma, sq_dm_ha = _expected_moments(cfg, params, 2)
    eu_dm = theta * dm_ma + (1 - theta) * dm_ha
    sq_dm = theta * sq_dm_ma + (1 - theta) * sq_dm_ha

    def se(second, first, count):
        if count <= 0:
            return math.nan
        return math.sqrt(max(second - first * first, 0.0) / count)

    return SweepRow(
        theta=theta,
        avg_payoff_ma=eu_ma,
        avg_payoff_ha=eu_ha,
        avg_eu_dm=eu_dm,
        n_ma_samples=theta * k,
        n_ha_samples=(1 - theta) * k,
        se_ma=se(sq_ma, eu_ma, theta * k),
        se_ha=se(sq_ha, eu_ha, (1 - theta) * k),
        se_dm=se(sq_dm, eu_dm, k),
    )


def expected_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """Exact expectations of the quantities :func:`run_sweep` estimates.

    The ``se_*`` fields hold the exact standard errors of the simulated means,
    taken at the expected sample counts. Unlike the sample standard error,
    they stay positive when a rare outcome happens not to be drawn.
    """
    require_valid(cfg.params.with_(theta=cfg.theta_grid[0]))
    return [_expected_point(cfg, theta) for theta in cfg.theta_grid]

