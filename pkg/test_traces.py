"""
Tests for the distance between finite traces.
"""
import math

from hypothesis import given, settings as hsettings, strategies as st

from app.models.lattice import GridConfig
from app.services.lattice import eval_zero
from app.services.traces import h_trace, max_lead_direct
from conftest import act, delay

GRID = GridConfig(step=1, lead_bound=12, value_cap=12)

steps = st.one_of(st.integers(0, 3).map(delay), st.sampled_from([act("get"), act("grant")]))


def test_empty_and_unequal_lengths():
    assert h_trace((), (), GRID).is_bottom
    assert h_trace((), (act("get"),), GRID).is_exact_top


def test_recursive_and_direct_agree_on_examples():
    sigma = (act("get"), delay(3), act("grant"))
    tau = (act("get"), delay(2), act("grant"))
    assert eval_zero(h_trace(sigma, tau, GRID)) == 1
    assert max_lead_direct(sigma, tau) == 1
    assert max_lead_direct((delay(3), delay(1)), (delay(2), delay(2))) == 1
    assert max_lead_direct((act("get"),), (act("grant"),)) == math.inf
    assert max_lead_direct(sigma, sigma) == 0


equal_length_pairs = st.integers(0, 8).flatmap(
    lambda n: st.tuples(st.lists(steps, min_size=n, max_size=n), st.lists(steps, min_size=n, max_size=n)))


@hsettings(max_examples=10_000, deadline=None)
@given(equal_length_pairs)
def test_recursive_distance_is_the_maximum_lead(pair):
    sigma, tau = pair
    direct = max_lead_direct(sigma, tau)
    expected = direct if direct <= GRID.value_cap else math.inf
    assert eval_zero(h_trace(sigma, tau, GRID)) == expected
