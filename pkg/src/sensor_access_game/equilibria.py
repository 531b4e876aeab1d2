"""Perfect Bayesian Nash equilibria of the sensor access signaling game.

Pure and hybrid profiles are emitted from closed-form conditions
(:func:`enumerate_pure_pbne`). The mixed profile is obtained from the
indifference conditions (:func:`solve_mixed`). Any candidate can be checked
directly against the equilibrium definition with :func:`verify_pbne`.
:func:`brute_force_pure_pbne` runs that check over every pure corner, which
makes it an oracle for the closed-form enumerator.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .beliefs import Beliefs, bayes_update, block_advantage, invert_bayes, UnderdeterminedBeliefs
from .game import (
    EPS_INDIFF,
    EPS_NUM,
    AppType,
    DmAction,
    GameParameters,
    Signal,
    StrategyProfile,
    payoff,
    require_valid,
    signal_utilities,
)

S, NS = Signal.SUSPICIOUS, Signal.NON_SUSPICIOUS
MA, HA = AppType.MALICIOUS, AppType.HONEST
B, A = DmAction.BLOCK, DmAction.ALLOW

THRESHOLD_EXPR = "kappa/(beta+kappa+phi)"


class PbneCategory(Enum):
    SEPARATING = "separating"
    POOLING = "pooling"
    HYBRID = "hybrid"
    MIXED = "mixed"


@dataclass(frozen=True)
class PbneProfile:
    category: PbneCategory
    strategy: StrategyProfile
    beliefs: Beliefs
    conditions: tuple[str, ...] = ()
    off_path_support: str = "none"

    @property
    def corner(self) -> tuple[int, int, int, int] | None:
        """``(m, n, y, x)`` as integers for pure profiles, else None."""
        if not self.strategy.is_pure:
            return None
        st = self.strategy
        return int(st.m), int(st.n), int(st.y), int(st.x)

    @property
    def label(self) -> str:
        st = self.strategy

        def sender(prob: float) -> str:
            if prob == 1.0:
                return "S"
            if prob == 0.0:
                return "NS"
            return "(S,NS)"

        def response(prob: float) -> str:
            if prob == 1.0:
                return "B"
            if prob == 0.0:
                return "A"
            return f"{prob:.6g}B"

        return "{(%s,%s), (%s,%s), p, q}" % (
            sender(st.m), sender(st.n), response(st.y), response(st.x)
        )


# Symbolic names for app payoff leaves, used in condition strings.
_LEAF_EXPR = {
    (MA, S, B): "-tau",
    (MA, S, A): "alpha + u - c_s",
    (MA, NS, B): "-tau",
    (MA, NS, A): "alpha - c_ns",
    (HA, S, B): "-gamma",
    (HA, S, A): "sigma + v - c_s",
    (HA, NS, B): "-gamma",
    (HA, NS, A): "sigma - c_ns",
}


def _incentive_condition(t: AppType, sig: Signal, actions: dict[Signal, DmAction]) -> str | None:
    on, off = actions[sig], actions[sig.other]
    if on is B and off is B:
        return None
    if on is A and off is A:
        bonus = "u" if t is MA else "v"
        op = "≥" if sig is S else "≤"
        return f"{bonus} {op} c_s - c_ns"
    return f"{_LEAF_EXPR[(t, sig, on)]} ≥ {_LEAF_EXPR[(t, sig.other, off)]}"


def _dm_condition(action: DmAction, name: str) -> str:
    op = "≥" if action is B else "≤"
    return f"{name} {op} {THRESHOLD_EXPR}"


def _dm_rational(params: GameParameters, s: Signal, belief: float, action: DmAction, eps: float) -> bool:
    adv = block_advantage(params, s, belief)
    return adv >= -eps if action is B else adv <= eps


def _off_path_support(params: GameParameters, s: Signal, action: DmAction, eps: float):
    """Belief interval sustaining ``action`` at an unreached information set.

    Returns ``(description, representative_belief)`` or None when no belief
    in [0, 1] makes the action optimal.
    """
    name = "q" if s is S else "p"
    thr = params.threshold
    if action is B:
        if block_advantage(params, s, 1.0) < -eps:
            return None
        return f"{name} in [{thr:.6g}, 1]", 1.0
    if block_advantage(params, s, 0.0) > eps:
        return None
    return f"{name} in [0, {thr:.6g}]", 0.0


def _pure_profile(
    params: GameParameters,
    ma_sig: Signal,
    ha_sig: Signal,
    actions: dict[Signal, DmAction],
    eps: float,
) -> PbneProfile | None:
    m = 1.0 if ma_sig is S else 0.0
    n = 1.0 if ha_sig is S else 0.0
    pooling = ma_sig is ha_sig
    raw = bayes_update(params.theta, m, n)
    conditions: list[str] = []
    supports: list[str] = []
    off_q, off_p = 0.0, 0.0

    for s in Signal:
        action = actions[s]
        if raw.on_path(s):
            belief = raw.at(s)
            if not _dm_rational(params, s, belief, action, eps):
                return None
            if pooling:
                name = "theta"
            else:
                name = f"{'q' if s is S else 'p'}={belief:g}"
            conditions.append(_dm_condition(action, name))
        else:
            found = _off_path_support(params, s, action, eps)
            if found is None:
                return None
            desc, rep = found
            supports.append(desc)
            if s is S:
                off_q = rep
            else:
                off_p = rep

    for t, sig in ((MA, ma_sig), (HA, ha_sig)):
        on = payoff(params, t, sig, actions[sig]).app
        dev = payoff(params, t, sig.other, actions[sig.other]).app
        if dev - on > eps:
            return None
        cond = _incentive_condition(t, sig, actions)
        if cond is not None and cond not in conditions:
            conditions.append(cond)

    strategy = StrategyProfile(m=m, n=n, y=1.0 if actions[S] is B else 0.0, x=1.0 if actions[NS] is B else 0.0)
    return PbneProfile(
        category=PbneCategory.POOLING if pooling else PbneCategory.SEPARATING,
        strategy=strategy,
        beliefs=bayes_update(params.theta, m, n, off_q, off_p),
        conditions=tuple(conditions),
        off_path_support="; ".join(supports) if supports else "none",
    )


def _allow_weights(theta: float, thr: float, degenerate: bool) -> tuple[float, float] | None:
    """Weights w in (0, 1) with theta / (theta + w (1 - theta)) <= thr.

    The posterior belongs to the mixing type's rivals: a pure MA pooled
    against an HA who sends the same signal with probability w.
    """
    if degenerate or theta == 0.0:
        return 0.0, 1.0
    if theta == 1.0:
        return (0.0, 1.0) if thr >= 1.0 else None
    if thr <= 0.0:
        return None
    num, den = theta * (1 - thr), thr * (1 - theta)
    if num >= den:
        return None
    return max(num / den, 0.0), 1.0


def _block_weights(theta: float, thr: float, degenerate: bool) -> tuple[float, float] | None:
    """Weights w in (0, 1) with theta w / (theta w + 1 - theta) >= thr."""
    if degenerate or theta == 1.0:
        return 0.0, 1.0
    if theta == 0.0:
        return (0.0, 1.0) if thr <= 0.0 else None
    if thr >= 1.0:
        return None
    num, den = thr * (1 - theta), theta * (1 - thr)
    if num >= den:
        return None
    return max(num / den, 0.0), 1.0


def _hybrid_profiles(params: GameParameters, eps: float) -> list[PbneProfile]:
    theta, thr = params.theta, params.threshold
    degenerate = params.kappa + params.beta + params.phi == 0
    gap = params.cost_gap
    out = []

    indifferent = abs(gap - params.u) <= eps and abs(gap - params.v) <= eps
    indiff_conds = ("c_s - c_ns ≃ u", "c_s - c_ns ≃ v")

    if indifferent:
        # MA pure S, HA mixes with P(S) = n: q falls as n grows.
        span = _allow_weights(theta, thr, degenerate)
        if span is not None:
            lo, hi = span
            n = (lo + hi) / 2
            out.append(
                PbneProfile(
                    PbneCategory.HYBRID,
                    StrategyProfile(m=1.0, n=n, y=0.0, x=0.0),
                    bayes_update(theta, 1.0, n, 0.0, 0.0),
                    indiff_conds + ("q ≤ (1-q)kappa/(beta+phi)", f"n in [{lo:.6g}, 1)"),
                )
            )
        # MA pure NS, HA mixes: p falls as 1 - n grows.
        if span is not None:
            lo, hi = span
            n = 1 - (lo + hi) / 2
            out.append(
                PbneProfile(
                    PbneCategory.HYBRID,
                    StrategyProfile(m=0.0, n=n, y=0.0, x=0.0),
                    bayes_update(theta, 0.0, n, 0.0, 0.0),
                    indiff_conds + ("p ≤ (1-p)kappa/(beta+phi)", f"n in (0, {1 - lo:.6g}]"),
                )
            )

    span = _block_weights(theta, thr, degenerate)
    if span is not None:
        lo, hi = span
        # HA pure S, MA mixes with P(S) = m: q rises with m.
        m = (lo + hi) / 2
        out.append(
            PbneProfile(
                PbneCategory.HYBRID,
                StrategyProfile(m=m, n=1.0, y=1.0, x=1.0),
                bayes_update(theta, m, 1.0, 1.0, 1.0),
                ("q ≥ (1-q)kappa/(beta+phi)", f"m in [{lo:.6g}, 1)"),
                "p in [%.6g, 1]" % thr if theta == 0.0 else "none",
            )
        )
        # HA pure NS, MA mixes: p rises with 1 - m.
        m = 1 - (lo + hi) / 2
        out.append(
            PbneProfile(
                PbneCategory.HYBRID,
                StrategyProfile(m=m, n=0.0, y=1.0, x=1.0),
                bayes_update(theta, m, 0.0, 1.0, 1.0),
                ("p ≥ (1-p)kappa/(beta+phi)", f"m in (0, {1 - lo:.6g}]"),
                "q in [%.6g, 1]" % thr if theta == 0.0 else "none",
            )
        )
    return out


def enumerate_pure_pbne(
    params: GameParameters, eps: float = EPS_INDIFF, include_hybrid: bool = True
) -> list[PbneProfile]:
    """All pure-strategy PBNE plus the hybrid families, each with its conditions.

    Every sender corner is paired with every pure DM response. A pairing is
    emitted when three things hold: the on-path DM action is optimal at its
    Bayes belief; some off-path belief sustains the off-path action; and
    neither sender type gains by switching signal. The pooling cases reduce
    to the rows of the usual PBNE table. Two extra rows can appear, and only
    under unusual costs: pooling with the off-path action not listed in the
    table, and separating profiles when a deviation gain is non-positive.

    Hybrid families need ``0 < m < 1`` or ``0 < n < 1``. Each one is
    reported with a representative mixing probability, and the full
    interval is listed in ``conditions``.
    """
    require_valid(params)
    out = []
    for ma_sig, ha_sig in itertools.product(Signal, Signal):
        for a_s, a_ns in itertools.product(DmAction, DmAction):
            found = _pure_profile(params, ma_sig, ha_sig, {S: a_s, NS: a_ns}, eps)
            if found is not None:
                out.append(found)
    if include_hybrid:
        out.extend(_hybrid_profiles(params, eps))
    return out


# --------------------------------------------------------------------------
# Separating profiles


@dataclass(frozen=True)
class SeparatingCertificate:
    """Why a separating sender profile fails against the DM's best response."""

    ma_signal: Signal
    ha_signal: Signal
    beliefs: Beliefs
    dm_response: tuple[DmAction, DmAction]
    deviator: AppType
    gain: float
    gains: dict[AppType, float] = field(default_factory=dict)
    strict: bool = True


class WeakDeviationError(ValueError):
    """The nonexistence argument for separating equilibria does not apply.

    Raised when some separating profile has no type with a strictly positive
    deviation gain, or when the DM is indifferent at a separated belief.
    """

    def __init__(self, certificates: tuple[SeparatingCertificate, ...]):
        self.certificates = certificates
        weak = [c for c in certificates if not c.strict]
        desc = ", ".join(
            f"({c.ma_signal.short},{c.ha_signal.short}) best gain {c.gain:g} by {c.deviator.short}"
            for c in weak
        )
        super().__init__(f"separating deviation is not strict: {desc}")


def check_separating(
    params: GameParameters, eps: float = EPS_INDIFF, strict: bool = True
) -> tuple[SeparatingCertificate, SeparatingCertificate]:
    """Deviation certificates for the separating profiles (S,NS) and (NS,S).

    The DM best-responds to the fully revealing beliefs; ties go to the
    action that is strict in the generic case. The certificate names the
    type with the largest gain from switching signal.

    With ``strict=True`` a ``WeakDeviationError`` is raised unless every
    certificate shows a strictly positive gain.
    """
    require_valid(params)
    certs = []
    for ma_sig in (S, NS):
        ha_sig = ma_sig.other
        m = 1.0 if ma_sig is S else 0.0
        # Off-path beliefs (theta at 0 or 1) keep the revealing values.
        beliefs = bayes_update(
            params.theta, m, 1.0 - m, off_path_q=1.0 if ma_sig is S else 0.0,
            off_path_p=0.0 if ma_sig is S else 1.0,
        )
        actions = {}
        dm_strict = True
        for s in Signal:
            adv = block_advantage(params, s, beliefs.at(s))
            malicious_signal = s is ma_sig
            if abs(adv) <= eps:
                dm_strict = False
                actions[s] = B if malicious_signal else A
            else:
                actions[s] = B if adv > 0 else A
        gains = {}
        for t, sig in ((MA, ma_sig), (HA, ha_sig)):
            on = payoff(params, t, sig, actions[sig]).app
            dev = payoff(params, t, sig.other, actions[sig.other]).app
            gains[t] = dev - on
        deviator = max(gains, key=lambda t: (gains[t], t is MA))
        certs.append(
            SeparatingCertificate(
                ma_signal=ma_sig,
                ha_signal=ha_sig,
                beliefs=beliefs,
                dm_response=(actions[S], actions[NS]),
                deviator=deviator,
                gain=gains[deviator],
                gains=gains,
                strict=dm_strict and gains[deviator] > eps,
            )
        )
    result = (certs[0], certs[1])
    if strict and not all(c.strict for c in result):
        raise WeakDeviationError(result)
    return result


# --------------------------------------------------------------------------
# Mixed equilibrium


class MixedEquilibriumError(ValueError):
    pass


class SingularIndifferenceSystem(MixedEquilibriumError):
    pass


class InfeasibleMixing(MixedEquilibriumError):
    pass


class ThetaMismatch(MixedEquilibriumError):
    pass


@dataclass(frozen=True)
class MixedPbne:
    x: float
    y: float
    q_star: float
    p_star: float
    m_family: str = "any t in (0,1)"
    n_family: str = "m = n = t"
    dm_family: str = "unique"

    def strategy(self, t: float = 0.5) -> StrategyProfile:
        return StrategyProfile(m=t, n=t, y=self.y, x=self.x)

    def as_profile(self, t: float = 0.5) -> PbneProfile:
        return PbneProfile(
            PbneCategory.MIXED,
            self.strategy(t),
            Beliefs(self.q_star, self.p_star),
            (f"theta = {THRESHOLD_EXPR}", f"x* = {self.x:.6g}", f"y* = {self.y:.6g}", "m = n = t, t in (0,1)"),
        )


def _indifference_system(params: GameParameters) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``[coef_y, coef_x]`` and right-hand side of the two indifference equations."""
    p = params
    matrix = np.array([
        [p.tau + p.alpha + p.u - p.cost_s, -(p.tau + p.alpha - p.cost_ns)],
        [p.gamma + p.sigma + p.v - p.cost_s, -(p.gamma + p.sigma - p.cost_ns)],
    ])
    rhs = np.array([p.u - p.cost_s + p.cost_ns, p.v - p.cost_s + p.cost_ns])
    return matrix, rhs


def solve_indifference(params: GameParameters, tol: float = EPS_NUM) -> tuple[float, float, str]:
    """DM mixing ``(x, y)`` that leaves both app types indifferent between S and NS.

    Solves, by Cramer's rule,

        y (tau + alpha + u - c_s)   - x (tau + alpha - c_ns)   = u - c_s + c_ns
        y (gamma + sigma + v - c_s) - x (gamma + sigma - c_ns) = v - c_s + c_ns

    A singular but consistent system has a line of solutions (for example
    ``y = x`` when ``u = v = c_s - c_ns``). The line point closest to the
    origin within the unit square is returned, together with a description
    of the family. Returns ``(x, y, family)``.
    """
    matrix, rhs = _indifference_system(params)
    (a11, a12), (a21, a22) = matrix
    b1, b2 = rhs
    det = a11 * a22 - a12 * a21
    if abs(det) > tol:
        y = (b1 * a22 - a12 * b2) / det
        x = (a11 * b2 - a21 * b1) / det
        return float(x), float(y), "unique"

    scale = max(1.0, float(np.abs(matrix).max()), float(np.abs(rhs).max()))
    z0, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    if np.abs(matrix @ z0 - rhs).max() > 1e3 * tol * scale:
        raise SingularIndifferenceSystem(f"indifference system is singular and inconsistent (det={det!r})")
    if np.abs(matrix).max() <= tol:
        return 0.0, 0.0, "any (x, y)"
    row = matrix[0] if np.abs(matrix[0]).max() >= np.abs(matrix[1]).max() else matrix[1]
    direction = np.array([-row[1], row[0]])
    direction /= np.linalg.norm(direction)
    # Clip the line parameter s so that z0 + s * direction stays in the unit square.
    lo, hi = -np.inf, np.inf
    for z, d in zip(z0, direction):
        if abs(d) <= tol:
            if not -tol <= z <= 1 + tol:
                raise InfeasibleMixing("no indifference mixing of the DM lies in [0, 1]^2")
            continue
        a, b = sorted(((0 - z) / d, (1 - z) / d))
        lo, hi = max(lo, a), min(hi, b)
    if lo > hi + tol:
        raise InfeasibleMixing("no indifference mixing of the DM lies in [0, 1]^2")
    s = min(max(0.0, lo), hi)
    y, x = z0 + s * direction
    family = "(y, x) = (%.6g, %.6g) + s(%.6g, %.6g)" % (z0[0], z0[1], direction[0], direction[1])
    return float(x), float(y), family


def solve_mixed(params: GameParameters, tol: float = EPS_NUM) -> MixedPbne:
    """Mixed PBNE in which both types and the DM all randomize.

    DM indifference at both information sets pins ``q* = p* = threshold``.
    Bayes consistency with both signals on path then forces ``theta`` to
    equal the threshold, and the senders form the family ``m = n = t``.
    Raises a ``MixedEquilibriumError`` subclass when no such equilibrium
    exists.
    """
    require_valid(params)
    if not 0.0 < params.theta < 1.0:
        raise ThetaMismatch(f"theta={params.theta!r} must lie strictly inside (0, 1)")
    x, y, dm_family = solve_indifference(params, tol)
    if not (-tol <= x <= 1 + tol and -tol <= y <= 1 + tol):
        raise InfeasibleMixing(f"DM mixing (x={x!r}, y={y!r}) is outside [0, 1]")
    x, y = min(max(x, 0.0), 1.0), min(max(y, 0.0), 1.0)

    thr = params.threshold
    try:
        invert_bayes(params.theta, thr, thr, tol=max(tol, EPS_NUM))
    except UnderdeterminedBeliefs:
        return MixedPbne(x=x, y=y, q_star=thr, p_star=thr, dm_family=dm_family)
    except ValueError as exc:
        raise ThetaMismatch(
            f"beliefs q* = p* = {thr!r} are inconsistent with theta = {params.theta!r}"
        ) from exc
    # Nonsingular inversion with q* == p* is impossible; unreachable for valid input.
    raise ThetaMismatch("q* = p* admits no on-path sender mixing")


# --------------------------------------------------------------------------
# Verification


@dataclass(frozen=True)
class VerificationResult:
    passed: bool
    check: str | None = None
    player: str | None = None
    gain: float = 0.0
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def verify_pbne(
    params: GameParameters, strategy: StrategyProfile, beliefs: Beliefs, eps: float = EPS_INDIFF
) -> VerificationResult:
    """Check a strategy profile and beliefs against the PBNE definition.

    Checks run in order, and the first failure is returned:

    1. beliefs: on-path beliefs must match Bayes' rule.
    2. dm: every action the DM plays with positive probability must be
       within ``eps`` of its best action at that information set. Off-path
       sets use the supplied belief.
    3. sender: each type's signal mixture must be within ``eps`` of its best
       achievable utility against ``(y, x)``.
    """
    derived = bayes_update(params.theta, strategy.m, strategy.n)
    for s, name in ((S, "q"), (NS, "p")):
        if derived.on_path(s) and abs(derived.at(s) - beliefs.at(s)) > eps:
            return VerificationResult(
                False, "beliefs", "DM", abs(derived.at(s) - beliefs.at(s)),
                f"{name}={beliefs.at(s)!r} but Bayes gives {derived.at(s)!r}",
            )

    for s in Signal:
        belief = derived.at(s) if derived.on_path(s) else beliefs.at(s)
        adv = block_advantage(params, s, belief)
        block = strategy.block_prob(s)
        if block > 0 and adv < -eps:
            return VerificationResult(False, "dm", "DM", -adv, f"blocks on {s.short} although allowing is better")
        if block < 1 and adv > eps:
            return VerificationResult(False, "dm", "DM", adv, f"allows on {s.short} although blocking is better")

    for t in (MA, HA):
        eu_s, eu_ns = signal_utilities(params, t, strategy.y, strategy.x)
        send = strategy.send_prob(t)
        played = send * eu_s + (1 - send) * eu_ns
        gain = max(eu_s, eu_ns) - played
        if gain > eps:
            better = "S" if eu_s >= eu_ns else "NS"
            return VerificationResult(False, "sender", t.short, gain, f"{t.short} gains {gain:g} by sending {better}")
    return VerificationResult(True)


def brute_force_pure_pbne(
    params: GameParameters,
    off_path_grid: tuple[float, ...] | None = None,
    eps: float = EPS_INDIFF,
) -> set[tuple[int, int, int, int]]:
    """Pure corners ``(m, n, y, x)`` that pass :func:`verify_pbne` for some off-path belief.

    Off-path beliefs are searched over ``off_path_grid``, which defaults to
    ``{0, threshold, 1}``.
    """
    grid = off_path_grid if off_path_grid is not None else (0.0, params.threshold, 1.0)
    found = set()
    for m, n, y, x in itertools.product((0, 1), repeat=4):
        strategy = StrategyProfile(float(m), float(n), float(y), float(x))
        for off_q, off_p in itertools.product(grid, grid):
            beliefs = bayes_update(params.theta, float(m), float(n), off_q, off_p)
            if verify_pbne(params, strategy, beliefs, eps):
                found.add((m, n, y, x))
                break
    return found
