import itertools

import pytest
from hypothesis import given, settings, strategies as st

from sensor_access_game import (
    DEFAULT_PARAMS,
    AppType,
    DmAction,
    GameParameters,
    Signal,
    StrategyProfile,
    expected_payoffs,
    payoff,
    validate,
)
from sensor_access_game.game import ParameterError, payoff_table, require_valid

from conftest import valid_params

MA, HA = AppType.MALICIOUS, AppType.HONEST
S, NS = Signal.SUSPICIOUS, Signal.NON_SUSPICIOUS
B, A = DmAction.BLOCK, DmAction.ALLOW

probs = st.floats(0.0, 1.0)


def leaf_sum_oracle(params, m, n, y, x):
    """Expected payoffs by walking all eight leaves with explicit reach probabilities."""
    send = {MA: m, HA: n}
    block = {S: y, NS: x}
    prior = {MA: params.theta, HA: 1 - params.theta}
    cond = {MA: 0.0, HA: 0.0}
    dm = 0.0
    for t, s, a in itertools.product(AppType, Signal, DmAction):
        p_s = send[t] if s is S else 1 - send[t]
        p_a = block[s] if a is B else 1 - block[s]
        leaf = payoff(params, t, s, a)
        cond[t] += p_s * p_a * leaf.app
        dm += prior[t] * p_s * p_a * leaf.dm
    return cond[MA], cond[HA], dm


class TestValidate:
    def test_zero_params_valid(self):
        assert validate(GameParameters.zeros()) == []

    def test_cost_order(self):
        assert "cost_s ≥ cost_ns" in validate(GameParameters.zeros().with_(cost_ns=2, cost_s=1))

    def test_theta_bound(self):
        assert "theta in [0,1]" in validate(DEFAULT_PARAMS.with_(theta=1.5))

    def test_psi_order_and_negative(self):
        bad = DEFAULT_PARAMS.with_(psi_ns=2.0, kappa=-1.0)
        assert set(validate(bad)) >= {"psi_s ≥ psi_ns", "kappa ≥ 0"}

    def test_non_finite(self):
        assert validate(DEFAULT_PARAMS.with_(alpha=float("nan"))) == ["alpha finite"]

    def test_defaults_valid(self):
        assert validate(DEFAULT_PARAMS) == []
        assert DEFAULT_PARAMS.threshold == 0.25

    def test_require_valid_raises(self):
        with pytest.raises(ParameterError, match="theta"):
            require_valid(DEFAULT_PARAMS.with_(theta=-0.1))


class TestPayoff:
    def test_ma_s_block(self):
        p = DEFAULT_PARAMS
        assert payoff(p, MA, S, B) == (-p.tau, p.beta - p.psi_s)

    def test_ha_ns_allow(self):
        p = DEFAULT_PARAMS
        assert payoff(p, HA, NS, A) == (p.sigma - p.cost_ns, -p.psi_ns)

    @pytest.mark.parametrize(
        "leaf, expected",
        [
            ((MA, S, A), (10 + 3 - 2, -6 - 1)),
            ((MA, NS, B), (-5, 6 - 0.5)),
            ((MA, NS, A), (10 - 1, -6 - 0.5)),
            ((HA, S, B), (-4, -4 - 1)),
            ((HA, S, A), (8 + 2 - 2, -1)),
            ((HA, NS, B), (-4, -4 - 0.5)),
        ],
    )
    def test_default_table(self, leaf, expected):
        assert payoff(DEFAULT_PARAMS, *leaf) == pytest.approx(expected)

    def test_zero_params(self):
        zero = GameParameters.zeros()
        for leaf in itertools.product(AppType, Signal, DmAction):
            assert payoff(zero, *leaf) == (0.0, 0.0)

    def test_table_matches_payoff(self):
        app, dm = payoff_table(DEFAULT_PARAMS)
        for t, s, a in itertools.product(AppType, Signal, DmAction):
            assert (app[t, s, a], dm[t, s, a]) == payoff(DEFAULT_PARAMS, t, s, a)

    @given(valid_params(), st.floats(0, 10), st.floats(0, 10))
    def test_app_payoff_ignores_psi(self, params, psi_a, psi_b):
        lo, hi = sorted([psi_a, psi_b])
        other = params.with_(psi_ns=lo, psi_s=hi)
        for leaf in itertools.product(AppType, Signal, DmAction):
            assert payoff(params, *leaf).app == payoff(other, *leaf).app


class TestExpectedPayoffs:
    def test_pooling_s_blocked(self):
        eu_ma, eu_ha, _ = expected_payoffs(DEFAULT_PARAMS, StrategyProfile(1, 1, 1, 1))
        assert (eu_ma, eu_ha) == (-DEFAULT_PARAMS.tau, -DEFAULT_PARAMS.gamma)

    def test_hand_expansion(self):
        # m=n=1, y=x=0, theta=0.5: MA gets 10+3-2, HA 8+2-2,
        # DM 0.5*(-6-1) + 0.5*(-1)
        got = expected_payoffs(DEFAULT_PARAMS, StrategyProfile(1, 1, 0, 0))
        assert got == pytest.approx((11.0, 8.0, -4.0), abs=1e-12)
        assert got == pytest.approx(leaf_sum_oracle(DEFAULT_PARAMS, 1, 1, 0, 0), abs=1e-12)

    @given(probs, probs)
    def test_ignoring_signal_makes_ma_indifferent(self, m, y):
        params = DEFAULT_PARAMS.with_(u=0.0, v=0.0, cost_s=1.0, cost_ns=1.0)
        base = expected_payoffs(params, StrategyProfile(0.0, 0.3, y, y))[0]
        assert expected_payoffs(params, StrategyProfile(m, 0.3, y, y))[0] == pytest.approx(base, abs=1e-12)

    @settings(max_examples=200)
    @given(valid_params(), probs, probs, probs, probs)
    def test_matches_leaf_oracle(self, params, m, n, y, x):
        got = expected_payoffs(params, StrategyProfile(m, n, y, x))
        assert got == pytest.approx(leaf_sum_oracle(params, m, n, y, x), rel=1e-9, abs=1e-9)

    @given(valid_params(), st.sampled_from(list(itertools.product((0, 1), repeat=4))))
    def test_pure_corner_is_leaf(self, params, corner):
        m, n, y, x = corner
        eu_ma, eu_ha, _ = expected_payoffs(params, StrategyProfile(*map(float, corner)))
        ma_leaf = payoff(params, MA, S if m else NS, B if (y if m else x) else A).app
        ha_leaf = payoff(params, HA, S if n else NS, B if (y if n else x) else A).app
        assert (eu_ma, eu_ha) == (ma_leaf, ha_leaf)

    @given(valid_params(), probs, probs, probs, probs, st.sampled_from("mnyx"))
    def test_multilinear(self, params, m, n, y, x, coord):
        base = dict(m=m, n=n, y=y, x=x)
        at = lambda v: expected_payoffs(params, StrategyProfile(**{**base, coord: v}))
        lo, hi, mid = at(0.0), at(1.0), at(0.5)
        for k in range(3):
            assert mid[k] == pytest.approx((lo[k] + hi[k]) / 2, rel=1e-9, abs=1e-9)

    def test_rejects_non_probability(self):
        with pytest.raises(ValueError, match="probability"):
            StrategyProfile(1.2, 0, 0, 0)
