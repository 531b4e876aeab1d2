import itertools

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from sensor_access_game import (
    DEFAULT_PARAMS,
    BestResponse,
    InfeasibleBeliefs,
    Signal,
    UnderdeterminedBeliefs,
    bayes_update,
    dm_best_response,
    dm_expected_utilities,
    invert_bayes,
)
from sensor_access_game.beliefs import block_advantage

from conftest import valid_params

S, NS = Signal.SUSPICIOUS, Signal.NON_SUSPICIOUS
interior = st.floats(0.01, 0.99)


class TestBayesUpdate:
    def test_separating(self):
        b = bayes_update(0.3, 1.0, 0.0)
        assert (b.q, b.p, b.q_on_path, b.p_on_path) == (1.0, 0.0, True, True)

    @pytest.mark.parametrize("theta", [0.1, 0.5, 0.9])
    def test_pooling_s(self, theta):
        b = bayes_update(theta, 1.0, 1.0, off_path_p=0.42)
        assert b.q == pytest.approx(theta)
        assert not b.p_on_path and b.p == 0.42

    def test_mixed_worked_example(self):
        b = bayes_update(0.5, 0.25, 0.75)
        assert (b.q, b.p) == pytest.approx((0.25, 0.75), abs=1e-15)

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
    def test_total_probability(self, theta, m, n):
        b = bayes_update(theta, m, n)
        pr_s = m * theta + n * (1 - theta)
        q = b.q if b.q_on_path else 0.0
        p = b.p if b.p_on_path else 0.0
        assert q * pr_s + p * (1 - pr_s) == pytest.approx(theta, abs=1e-12)


def grid_search_feasible(theta, q, p, tol=1e-3, steps=401):
    """Brute-force scan of (m, n) for strategies whose posteriors approach (q, p)."""
    grid = np.linspace(0, 1, steps)
    m, n = np.meshgrid(grid, grid, indexing="ij")
    s_mass = m * theta + n * (1 - theta)
    ns_mass = (1 - m) * theta + (1 - n) * (1 - theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        qq = m * theta / s_mass
        pp = (1 - m) * theta / ns_mass
    ok = (s_mass > 0) & (ns_mass > 0) & (abs(qq - q) < tol) & (abs(pp - p) < tol)
    return bool(ok.any())


class TestInvertBayes:
    def test_worked_example(self):
        m, n = invert_bayes(0.5, 0.25, 0.75)
        assert abs(m - 0.25) <= 1e-12 and abs(n - 0.75) <= 1e-12

    def test_underdetermined(self):
        with pytest.raises(UnderdeterminedBeliefs) as info:
            invert_bayes(0.5, 0.5, 0.5)
        assert info.value.family == "m = n = t, t in (0, 1)"
        # Every member of the family reproduces the beliefs.
        for t in (0.1, 0.5, 0.9):
            b = bayes_update(0.5, t, t)
            assert (b.q, b.p) == pytest.approx((0.5, 0.5))

    def test_infeasible_below_prior(self):
        with pytest.raises(InfeasibleBeliefs):
            invert_bayes(0.9, 0.01, 0.01)
        assert not grid_search_feasible(0.9, 0.01, 0.01)

    def test_infeasible_outside_square(self):
        # Both posteriors below the prior: total probability fails.
        assert not grid_search_feasible(0.6, 0.1, 0.2)
        with pytest.raises(InfeasibleBeliefs):
            invert_bayes(0.6, 0.1, 0.2)

    def test_bad_theta(self):
        with pytest.raises(ValueError):
            invert_bayes(0.0, 0.2, 0.3)

    @given(interior, interior, interior)
    def test_round_trip(self, theta, m, n):
        assume(abs(m - n) > 1e-3)
        b = bayes_update(theta, m, n)
        m2, n2 = invert_bayes(theta, b.q, b.p)
        assert (m2, n2) == pytest.approx((m, n), abs=1e-7)


class TestDmUtilities:
    def test_certain_malicious_on_s(self):
        p = DEFAULT_PARAMS
        assert dm_expected_utilities(p, S, 1.0) == (p.beta - p.psi_s, -p.phi - p.psi_s)

    def test_certain_honest_on_ns(self):
        p = DEFAULT_PARAMS
        assert dm_expected_utilities(p, NS, 0.0) == (-p.kappa - p.psi_ns, -p.psi_ns)

    @pytest.mark.parametrize("s", list(Signal))
    def test_equal_at_threshold(self, s):
        block, allow = dm_expected_utilities(DEFAULT_PARAMS, s, DEFAULT_PARAMS.threshold)
        assert block == pytest.approx(allow, abs=1e-12)

    @given(valid_params(), st.floats(0, 1), st.floats(0, 10), st.floats(0, 10))
    def test_advantage_ignores_psi(self, params, b, psi_a, psi_b):
        lo, hi = sorted([psi_a, psi_b])
        other = params.with_(psi_ns=lo, psi_s=hi)
        for s in Signal:
            assert block_advantage(params, s, b) == pytest.approx(block_advantage(other, s, b), abs=1e-9)


class TestBestResponse:
    def test_extremes(self):
        assert dm_best_response(DEFAULT_PARAMS, S, 1.0) is BestResponse.BLOCK
        assert dm_best_response(DEFAULT_PARAMS, S, 0.0) is BestResponse.ALLOW

    def test_indifferent_at_threshold(self):
        assert dm_best_response(DEFAULT_PARAMS, S, 4 / 16) is BestResponse.INDIFFERENT

    @given(valid_params(), st.floats(0, 1))
    def test_single_switch_same_for_both_signals(self, params, b):
        assume(params.kappa + params.beta + params.phi > 1e-3)
        thr = params.threshold
        assume(abs(b - thr) > 1e-6)
        expected = BestResponse.BLOCK if b > thr else BestResponse.ALLOW
        for s in Signal:
            assert dm_best_response(params, s, b) is expected

    @given(valid_params(), st.floats(0, 1))
    def test_threshold_forms_agree(self, params, b):
        # Block condition written two ways: b >= thr and b >= (1-b) kappa/(beta+phi).
        assume(params.beta + params.phi > 1e-6)
        assume(abs(b - params.threshold) > 1e-9)
        assert (b >= params.threshold) == (b >= (1 - b) * params.kappa / (params.beta + params.phi))

    def test_admits_and_resolve(self):
        from sensor_access_game import DmAction

        assert BestResponse.INDIFFERENT.admits(DmAction.ALLOW)
        assert not BestResponse.BLOCK.admits(DmAction.ALLOW)
        assert BestResponse.INDIFFERENT.resolve() is DmAction.BLOCK
        assert all(BestResponse.ALLOW.resolve(tie) is DmAction.ALLOW for tie in DmAction)


def test_bayes_matches_direct_enumeration():
    """Posterior from joint type/signal probabilities, enumerated cell by cell."""
    for theta, m, n in itertools.product((0.2, 0.7), (0.0, 0.3, 1.0), (0.0, 0.6, 1.0)):
        joint = {("MA", "S"): theta * m, ("MA", "NS"): theta * (1 - m),
                 ("HA", "S"): (1 - theta) * n, ("HA", "NS"): (1 - theta) * (1 - n)}
        b = bayes_update(theta, m, n, off_path_q=-1, off_path_p=-1)
        for sig, belief, on in (("S", b.q, b.q_on_path), ("NS", b.p, b.p_on_path)):
            mass = joint[("MA", sig)] + joint[("HA", sig)]
            if mass == 0:
                assert not on and belief == -1
            else:
                assert belief == pytest.approx(joint[("MA", sig)] / mass)
