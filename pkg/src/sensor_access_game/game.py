"""Stage game: types, signals, defender actions, parameters and payoffs.

A stage runs as follows. Nature picks the application type (malicious with
probability ``theta``). The application sends a suspicious or non-suspicious
sensor request. The defense mechanism (DM) sees only the request and blocks
or allows it.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from enum import IntEnum
from typing import NamedTuple

import numpy as np

EPS_INDIFF = 1e-9
EPS_NUM = 1e-12


class AppType(IntEnum):
    MALICIOUS = 0
    HONEST = 1

    @property
    def short(self) -> str:
        return "MA" if self is AppType.MALICIOUS else "HA"


class Signal(IntEnum):
    SUSPICIOUS = 0
    NON_SUSPICIOUS = 1

    @property
    def short(self) -> str:
        return "S" if self is Signal.SUSPICIOUS else "NS"

    @property
    def other(self) -> "Signal":
        return Signal(1 - self)


class DmAction(IntEnum):
    BLOCK = 0
    ALLOW = 1

    @property
    def short(self) -> str:
        return "B" if self is DmAction.BLOCK else "A"


@dataclass(frozen=True)
class GameParameters:
    """Costs and benefits of the sensor access game.

    All values are normalized, unitless utilities.  ``cost_*`` are borne by the
    application, ``psi_*`` by the defense mechanism.
    """

    theta: float = 0.5
    cost_s: float = 2.0
    cost_ns: float = 1.0
    gamma: float = 4.0
    psi_s: float = 1.0
    psi_ns: float = 0.5
    phi: float = 6.0
    tau: float = 5.0
    kappa: float = 4.0
    alpha: float = 10.0
    beta: float = 6.0
    sigma: float = 8.0
    u: float = 3.0
    v: float = 2.0

    @property
    def threshold(self) -> float:
        """Belief in MA above which blocking beats allowing: kappa/(kappa+beta+phi).

        Returns 0.0 when kappa+beta+phi == 0 (the DM is then indifferent at
        every belief).
        """
        denom = self.kappa + self.beta + self.phi
        return self.kappa / denom if denom > 0 else 0.0

    @property
    def cost_gap(self) -> float:
        return self.cost_s - self.cost_ns

    def with_(self, **changes: float) -> "GameParameters":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def zeros(cls) -> "GameParameters":
        return cls(**{name: 0.0 for name in cls.field_names()})


DEFAULT_PARAMS = GameParameters()

_NONNEGATIVE = ("gamma", "phi", "tau", "kappa", "alpha", "beta", "sigma", "u", "v")


class ParameterError(ValueError):
    """Raised by solver entry points when parameters fail validation."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid game parameters: " + "; ".join(violations))


def validate(params: GameParameters) -> list[str]:
    """Return the list of violated parameter constraints (empty when valid)."""
    violations = []
    for name in GameParameters.field_names():
        if not math.isfinite(getattr(params, name)):
            violations.append(f"{name} finite")
    if violations:
        return violations
    if not 0.0 <= params.theta <= 1.0:
        violations.append("theta in [0,1]")
    if params.cost_s < params.cost_ns:
        violations.append("cost_s ≥ cost_ns")
    if params.cost_ns < 0:
        violations.append("cost_ns ≥ 0")
    if params.psi_s < params.psi_ns:
        violations.append("psi_s ≥ psi_ns")
    if params.psi_ns < 0:
        violations.append("psi_ns ≥ 0")
    for name in _NONNEGATIVE:
        if getattr(params, name) < 0:
            violations.append(f"{name} ≥ 0")
    return violations


def require_valid(params: GameParameters) -> None:
    violations = validate(params)
    if violations:
        raise ParameterError(violations)


class PayoffPair(NamedTuple):
    app: float
    dm: float


def payoff(params: GameParameters, t: AppType, s: Signal, a: DmAction) -> PayoffPair:
    """Leaf payoff ``(U_APP, U_DM)`` for type ``t`` sending ``s`` answered by ``a``."""
    suspicious = s is Signal.SUSPICIOUS
    psi = params.psi_s if suspicious else params.psi_ns
    cost = params.cost_s if suspicious else params.cost_ns
    if t is AppType.MALICIOUS:
        if a is DmAction.BLOCK:
            return PayoffPair(-params.tau, params.beta - psi)
        bonus = params.u if suspicious else 0.0
        return PayoffPair(params.alpha + bonus - cost, -params.phi - psi)
    if a is DmAction.BLOCK:
        return PayoffPair(-params.gamma, -params.kappa - psi)
    bonus = params.v if suspicious else 0.0
    return PayoffPair(params.sigma + bonus - cost, -psi)


def payoff_table(params: GameParameters) -> tuple[np.ndarray, np.ndarray]:
    """App and DM payoffs as ``(2, 2, 2)`` arrays indexed ``[type, signal, action]``."""
    app = np.empty((2, 2, 2))
    dm = np.empty((2, 2, 2))
    for t in AppType:
        for s in Signal:
            for a in DmAction:
                app[t, s, a], dm[t, s, a] = payoff(params, t, s, a)
    return app, dm


@dataclass(frozen=True)
class StrategyProfile:
    """Behavioural strategies.

    m: P(MA sends S), n: P(HA sends S), y: P(DM blocks | S), x: P(DM blocks | NS).
    """

    m: float
    n: float
    y: float
    x: float

    def __post_init__(self):
        for name in ("m", "n", "y", "x"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value!r} is not a probability")

    def send_prob(self, t: AppType) -> float:
        return self.m if t is AppType.MALICIOUS else self.n

    def block_prob(self, s: Signal) -> float:
        return self.y if s is Signal.SUSPICIOUS else self.x

    @property
    def is_pure(self) -> bool:
        return all(getattr(self, k) in (0.0, 1.0) for k in ("m", "n", "y", "x"))


def signal_utilities(params: GameParameters, t: AppType, y: float, x: float) -> tuple[float, float]:
    """Expected utility of type ``t`` for sending S and NS against DM mixing ``(y, x)``."""
    eu_s = y * payoff(params, t, Signal.SUSPICIOUS, DmAction.BLOCK).app + (1 - y) * payoff(
        params, t, Signal.SUSPICIOUS, DmAction.ALLOW
    ).app
    eu_ns = x * payoff(params, t, Signal.NON_SUSPICIOUS, DmAction.BLOCK).app + (1 - x) * payoff(
        params, t, Signal.NON_SUSPICIOUS, DmAction.ALLOW
    ).app
    return eu_s, eu_ns


def expected_payoffs(params: GameParameters, profile: StrategyProfile) -> tuple[float, float, float]:
    """Return ``(eu_ma, eu_ha, eu_dm)``.

    ``eu_ma`` and ``eu_ha`` are conditional on the type; ``eu_dm`` is ex ante,
    i.e. averaged over Nature's draw as well.
    """
    ma_s, ma_ns = signal_utilities(params, AppType.MALICIOUS, profile.y, profile.x)
    ha_s, ha_ns = signal_utilities(params, AppType.HONEST, profile.y, profile.x)
    eu_ma = profile.m * ma_s + (1 - profile.m) * ma_ns
    eu_ha = profile.n * ha_s + (1 - profile.n) * ha_ns

    eu_dm = 0.0
    for t, prior in ((AppType.MALICIOUS, params.theta), (AppType.HONEST, 1 - params.theta)):
        send = profile.send_prob(t)
        for s, p_sig in ((Signal.SUSPICIOUS, send), (Signal.NON_SUSPICIOUS, 1 - send)):
            block = profile.block_prob(s)
            eu_dm += prior * p_sig * (
                block * payoff(params, t, s, DmAction.BLOCK).dm
                + (1 - block) * payoff(params, t, s, DmAction.ALLOW).dm
            )
    return eu_ma, eu_ha, eu_dm
