import numpy as np
import pytest
from hypothesis import strategies as st

from sensor_access_game import GameParameters

NONNEG = ("gamma", "phi", "tau", "kappa", "alpha", "beta", "sigma", "u", "v")

# (criterion id, description, passed) recorded by tests/test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[str, str, bool]] = []


def sample_params(rng: np.random.Generator, hi: float = 10.0, cost_hi: float = 10.0) -> GameParameters:
    values = dict(zip(NONNEG, rng.uniform(0.0, hi, size=len(NONNEG))))
    cost_ns, cost_s = np.sort(rng.uniform(0.0, cost_hi, size=2))
    psi_ns, psi_s = np.sort(rng.uniform(0.0, hi, size=2))
    return GameParameters(
        theta=float(rng.uniform()),
        cost_s=float(cost_s),
        cost_ns=float(cost_ns),
        psi_s=float(psi_s),
        psi_ns=float(psi_ns),
        **{k: float(v) for k, v in values.items()},
    )


@st.composite
def valid_params(draw, hi: float = 10.0):
    value = st.floats(0.0, hi, allow_nan=False, allow_infinity=False)
    costs = sorted([draw(value), draw(value)])
    psis = sorted([draw(value), draw(value)])
    return GameParameters(
        theta=draw(st.floats(0.0, 1.0)),
        cost_ns=costs[0],
        cost_s=costs[1],
        psi_ns=psis[0],
        psi_s=psis[1],
        **{name: draw(value) for name in NONNEG},
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, desc, ok in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {cid}: {desc}")
