"""Defender posteriors, information-set utilities and best responses."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .game import EPS_INDIFF, EPS_NUM, AppType, DmAction, GameParameters, Signal, payoff


@dataclass(frozen=True)
class Beliefs:
    """P(MA | S) = q and P(MA | NS) = p.

    An off-path flag means the belief was supplied by the caller rather than
    derived with Bayes' rule.
    """

    q: float
    p: float
    q_on_path: bool = True
    p_on_path: bool = True

    def at(self, s: Signal) -> float:
        return self.q if s is Signal.SUSPICIOUS else self.p

    def on_path(self, s: Signal) -> bool:
        return self.q_on_path if s is Signal.SUSPICIOUS else self.p_on_path


class BestResponse(Enum):
    BLOCK = "B"
    ALLOW = "A"
    INDIFFERENT = "I"

    def admits(self, action: DmAction) -> bool:
        if self is BestResponse.INDIFFERENT:
            return True
        return (self is BestResponse.BLOCK) == (action is DmAction.BLOCK)

    def resolve(self, tie: DmAction = DmAction.BLOCK) -> DmAction:
        if self is BestResponse.INDIFFERENT:
            return tie
        return DmAction.BLOCK if self is BestResponse.BLOCK else DmAction.ALLOW


def bayes_update(
    theta: float, m: float, n: float, off_path_q: float = 0.0, off_path_p: float = 0.0
) -> Beliefs:
    """Posterior beliefs of the DM given sender strategies ``m`` and ``n``."""
    s_mass = m * theta + n * (1 - theta)
    ns_mass = (1 - m) * theta + (1 - n) * (1 - theta)
    if s_mass > 0:
        q, q_on = m * theta / s_mass, True
    else:
        q, q_on = off_path_q, False
    if ns_mass > 0:
        p, p_on = (1 - m) * theta / ns_mass, True
    else:
        p, p_on = off_path_p, False
    return Beliefs(q, p, q_on, p_on)


class InfeasibleBeliefs(ValueError):
    """No sender strategy in the unit square produces the target beliefs."""


class UnderdeterminedBeliefs(ValueError):
    """The target beliefs are produced by a whole family of sender strategies.

    The only such case is ``q == p == theta``, solved by every ``m == n == t``.
    """

    family = "m = n = t, t in (0, 1)"

    def __init__(self, theta: float):
        self.theta = theta
        super().__init__(f"q = p = theta = {theta!r} is attained by every {self.family}")


def invert_bayes(
    theta: float, q_target: float, p_target: float, tol: float = EPS_NUM
) -> tuple[float, float]:
    """Find the sender strategy ``(m, n)`` that induces beliefs ``(q, p)``.

    Clearing denominators turns the two Bayes equations into a linear system

        theta(1-q) m - q(1-theta) n  = 0
        -theta(1-p) m + p(1-theta) n = p(1-theta) - theta(1-p)

    whose determinant is ``theta (1-theta) (p-q)``. It is solved with
    Cramer's rule.

    Raises ``UnderdeterminedBeliefs`` when ``q == p == theta`` and
    ``InfeasibleBeliefs`` when no solution lies in ``[0, 1]^2``.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta!r}")
    a11, a12 = theta * (1 - q_target), -q_target * (1 - theta)
    a21, a22 = -theta * (1 - p_target), p_target * (1 - theta)
    rhs = p_target * (1 - theta) - theta * (1 - p_target)
    det = a11 * a22 - a12 * a21

    if abs(det) <= tol:
        if abs(q_target - theta) <= tol and abs(p_target - theta) <= tol:
            raise UnderdeterminedBeliefs(theta)
        raise InfeasibleBeliefs(
            f"q = p = {q_target!r} differs from theta = {theta!r}; total probability cannot hold"
        )

    m = (0.0 * a22 - a12 * rhs) / det
    n = (a11 * rhs - a21 * 0.0) / det
    if not (-tol <= m <= 1 + tol and -tol <= n <= 1 + tol):
        raise InfeasibleBeliefs(f"solution (m={m!r}, n={n!r}) lies outside the unit square")
    m, n = min(max(m, 0.0), 1.0), min(max(n, 0.0), 1.0)

    # A corner solution can leave one information set unreached; the target
    # then stands as the off-path belief.
    check = bayes_update(theta, m, n, off_path_q=q_target, off_path_p=p_target)
    if abs(check.q - q_target) > 1e3 * tol or abs(check.p - p_target) > 1e3 * tol:
        raise InfeasibleBeliefs(f"(m={m!r}, n={n!r}) does not reproduce the target beliefs")
    return m, n


def dm_expected_utilities(params: GameParameters, s: Signal, belief_ma: float) -> tuple[float, float]:
    """``(EU(Block), EU(Allow))`` for the DM at information set ``s``."""
    b = belief_ma
    eu_block = b * payoff(params, AppType.MALICIOUS, s, DmAction.BLOCK).dm + (1 - b) * payoff(
        params, AppType.HONEST, s, DmAction.BLOCK
    ).dm
    eu_allow = b * payoff(params, AppType.MALICIOUS, s, DmAction.ALLOW).dm + (1 - b) * payoff(
        params, AppType.HONEST, s, DmAction.ALLOW
    ).dm
    return eu_block, eu_allow


def block_advantage(params: GameParameters, s: Signal, belief_ma: float) -> float:
    eu_block, eu_allow = dm_expected_utilities(params, s, belief_ma)
    return eu_block - eu_allow


def dm_best_response(
    params: GameParameters, s: Signal, belief_ma: float, eps: float = EPS_INDIFF
) -> BestResponse:
    diff = block_advantage(params, s, belief_ma)
    if diff > eps:
        return BestResponse.BLOCK
    if diff < -eps:
        return BestResponse.ALLOW
    return BestResponse.INDIFFERENT
