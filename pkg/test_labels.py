"""
Tests for interval-timed labels and their operators.
"""
import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from app.exceptions import ConfigurationError
from app.models.labels import DELTA, Interval, TimedLabel
from app.models.lattice import GridConfig, LeadFunction
from app.services.labels import (
    complement_labels,
    compose_label,
    conjoin_label,
    f_label,
    f_point,
    implementations_of,
    label_distance,
    label_refines,
    quotient_label,
    widen_label,
)
from app.services.lattice import c_relaxed, eval_zero, lattice_add, lattice_leq, lattice_max, p_bound
from conftest import act, delay

GRID = GridConfig(step=1, lead_bound=6, value_cap=6)


def brute_force_f(k, ell, alpha, lead):
    """sup over t in k, inf over u in ell of max(|lead + t - u|, alpha(lead + t - u))."""
    if k.action != ell.action:
        return math.inf
    cap = alpha.grid.value_cap
    # past these cuts every lead is off the grid or the values repeat
    k_hi = int(k.window.hi) if k.window.is_bounded else int(k.window.lo) + 40
    worst = Fraction(0)
    for t in range(int(k.window.lo), k_hi + 1):
        ell_hi = int(ell.window.hi) if ell.window.is_bounded else t + 40
        best = math.inf
        for u in range(int(ell.window.lo), ell_hi + 1):
            shifted = lead + t - u
            value = max(abs(shifted), alpha(shifted))
            best = min(best, value)
        worst = max(worst, best)
    return math.inf if worst > cap else worst


windows = st.tuples(st.integers(0, 3), st.integers(0, 3)).map(lambda p: Interval(min(p), max(p)))
open_windows = st.one_of(windows, st.integers(0, 3).map(lambda lo: Interval(lo, math.inf)))
constants = st.integers(0, 3).map(lambda c: LeadFunction.constant(GRID, c))
ALL_WINDOWS = [Interval(lo, hi) for lo in range(7) for hi in list(range(lo, 7)) + [math.inf]]
alphas = st.lists(st.integers(0, GRID.top_code), min_size=GRID.size, max_size=GRID.size).map(
    lambda codes: LeadFunction(GRID, np.array(codes)))


def test_label_refinement():
    assert label_refines(delay(1, 2), delay(0, 3))
    assert not label_refines(act("get"), act("grant"))
    assert not label_refines(delay(0, 3), delay(1, 2))


def test_implementations():
    assert implementations_of(delay(0, 2), GRID) == {delay(0), delay(1), delay(2)}
    assert implementations_of(act("get"), GRID) == {act("get")}
    assert implementations_of(delay(1), GRID) == {delay(1)}
    assert len(implementations_of(TimedLabel(DELTA, Interval(4, math.inf)), GRID)) == 3
    with pytest.raises(ConfigurationError):
        implementations_of(delay(Fraction(1, 2)), GRID)


def test_point_distance():
    same = f_point(delay(2), delay(2), LeadFunction.bottom(GRID))
    assert same == LeadFunction.from_callable(GRID, lambda d: abs(d))
    assert eval_zero(f_point(delay(3), delay(2), LeadFunction.bottom(GRID))) == 1
    assert f_point(act("get"), act("grant"), LeadFunction.constant(GRID, 1)).is_exact_top
    with pytest.raises(ConfigurationError):
        f_point(delay(0, 1), delay(1), LeadFunction.bottom(GRID))


def test_interval_distance():
    assert eval_zero(label_distance(delay(0, 3), delay(0, 2), GRID)) == 1
    assert eval_zero(label_distance(delay(0, 2), delay(0, 3), GRID)) == 0
    assert label_distance(TimedLabel("a", Interval(0, 0)), TimedLabel("b", Interval(0, 0)), GRID).is_exact_top


@hsettings(max_examples=1000, deadline=None)
@given(windows, windows, alphas)
def test_f_matches_brute_force(k_window, ell_window, alpha):
    k, ell = TimedLabel(DELTA, k_window), TimedLabel(DELTA, ell_window)
    result = f_label(k, ell, alpha)
    for lead in GRID.leads():
        assert result(lead) == brute_force_f(k, ell, alpha, lead)


@hsettings(max_examples=60, deadline=None)
@given(windows, windows, windows)
def test_f_is_monotone_in_refinement(inner, outer, target):
    """Shrinking the left window or growing the right one never increases F."""
    if not inner.within(outer):
        return
    bottom = LeadFunction.bottom(GRID)
    t = TimedLabel(DELTA, target)
    assert lattice_leq(f_label(TimedLabel(DELTA, inner), t, bottom), f_label(TimedLabel(DELTA, outer), t, bottom))
    assert lattice_leq(f_label(t, TimedLabel(DELTA, outer), bottom), f_label(t, TimedLabel(DELTA, inner), bottom))


def test_unbounded_windows_are_not_cut_at_the_cap():
    bottom = LeadFunction.bottom(GRID)
    unbounded = TimedLabel(DELTA, Interval(0, math.inf))
    assert f_label(unbounded, delay(0, 2), bottom)(0) == math.inf
    assert f_label(unbounded, unbounded, bottom)(0) == 0
    assert f_label(delay(0, 2), TimedLabel(DELTA, Interval(3, math.inf)), bottom)(0) == 3
    assert f_label(unbounded, TimedLabel(DELTA, Interval(4, math.inf)), bottom)(0) == 4


@hsettings(max_examples=200, deadline=None)
@given(open_windows, open_windows, alphas)
def test_f_matches_brute_force_on_unbounded_windows(k_window, ell_window, alpha):
    k, ell = TimedLabel(DELTA, k_window), TimedLabel(DELTA, ell_window)
    result = f_label(k, ell, alpha)
    for lead in GRID.leads():
        assert result(lead) == brute_force_f(k, ell, alpha, lead)


@hsettings(max_examples=1000, deadline=None)
@given(open_windows, open_windows, alphas, alphas)
def test_f_is_monotone_in_the_future_distance(k_window, ell_window, alpha, other):
    k, ell = TimedLabel(DELTA, k_window), TimedLabel(DELTA, ell_window)
    assert lattice_leq(f_label(k, ell, alpha), f_label(k, ell, lattice_max(alpha, other)))


@hsettings(max_examples=1000, deadline=None)
@given(open_windows, open_windows, open_windows, constants, constants)
def test_extended_triangle_inequality_at_lead_zero(k_window, ell_window, m_window, alpha, beta):
    k, ell, m = (TimedLabel(DELTA, w) for w in (k_window, ell_window, m_window))
    through = eval_zero(f_label(k, ell, alpha)) + eval_zero(f_label(ell, m, beta))
    if through > GRID.value_cap:
        return
    assert eval_zero(f_label(k, m, lattice_add(alpha, beta))) <= through


def test_extended_triangle_inequality_fails_away_from_lead_zero():
    bottom = LeadFunction.bottom(GRID)
    assert f_label(delay(0), delay(5), bottom)(5) == 0
    assert f_label(delay(5), delay(10), bottom)(5) == 0
    assert f_label(delay(0), delay(10), bottom)(5) == 5


@hsettings(max_examples=1000, deadline=None)
@given(windows, windows, windows, windows)
def test_composition_bound_for_interval_labels(k_window, kp_window, ell_window, lp_window):
    k, kp, ell, lp = (TimedLabel(DELTA, w) for w in (k_window, kp_window, ell_window, lp_window))
    left, right = compose_label(k, kp), compose_label(ell, lp)
    if left is None or right is None:
        return
    bottom = LeadFunction.bottom(GRID)
    bound = p_bound(f_label(k, ell, bottom), f_label(kp, lp, bottom))
    assert lattice_leq(f_label(left, right, bottom), bound)


@hsettings(max_examples=1000, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), alphas, alphas)
def test_composition_bound_for_point_labels(t, u, alpha, alpha_prime):
    composed = f_label(delay(t), delay(u), p_bound(alpha, alpha_prime))
    bound = p_bound(f_label(delay(t), delay(u), alpha), f_label(delay(t), delay(u), alpha_prime))
    assert lattice_leq(composed, bound)


def test_composition_bound_fails_for_interval_labels_with_a_future():
    alpha = LeadFunction.from_callable(GRID, lambda d: math.inf if d in (-1, -2) else 0)
    zero = delay(0)
    composed = f_label(compose_label(zero, zero), compose_label(delay(0, 2), delay(1, 3)), p_bound(alpha, alpha))
    assert eval_zero(composed) == math.inf
    assert eval_zero(p_bound(f_label(zero, delay(0, 2), alpha), f_label(zero, delay(1, 3), alpha))) == 3


@hsettings(max_examples=1000, deadline=None)
@given(windows, windows, windows, st.integers(0, 2), st.integers(0, 2), constants, constants)
def test_conjunction_relaxed_bound(k_window, ell_window, m_window, n, n_prime, alpha, alpha_prime):
    k, ell, m = (TimedLabel(DELTA, w) for w in (k_window, ell_window, m_window))
    both = conjoin_label(widen_label(k, n), widen_label(ell, n_prime))
    if both is None:
        return
    beta, gamma = LeadFunction.constant(GRID, n), LeadFunction.constant(GRID, n_prime)
    relaxed = f_label(m, both, c_relaxed(beta, gamma, alpha, alpha_prime))
    bound = c_relaxed(beta, gamma, f_label(m, k, alpha), f_label(m, ell, alpha_prime))
    assert lattice_leq(relaxed, bound)


@hsettings(max_examples=1000, deadline=None)
@given(open_windows, open_windows, open_windows)
def test_quotient_is_quantitatively_well_behaved_at_lead_zero(ell_window, k_window, m_window):
    ell, k, m = (TimedLabel(DELTA, w) for w in (ell_window, k_window, m_window))
    quotient, composed = quotient_label(ell, k), compose_label(k, m)
    if quotient is None or composed is None:
        return
    bottom = LeadFunction.bottom(GRID)
    assert eval_zero(f_label(m, quotient, bottom)) >= eval_zero(f_label(composed, ell, bottom))


def test_quotient_is_not_well_behaved_away_from_lead_zero():
    ell, k, m = delay(0, 5), delay(1, 3), delay(2)
    bottom = LeadFunction.bottom(GRID)
    assert f_label(m, quotient_label(ell, k), bottom)(4) == 0
    assert f_label(compose_label(k, m), ell, bottom)(4) == 1


def test_conjunction_is_a_greatest_lower_bound():
    small = [w for w in ALL_WINDOWS if w.is_bounded and w.hi <= 4]
    for k_window, ell_window in product(small, repeat=2):
        k, ell = TimedLabel(DELTA, k_window), TimedLabel(DELTA, ell_window)
        both = conjoin_label(k, ell)
        if both is not None:
            assert label_refines(both, k) and label_refines(both, ell)
        for m_window in small:
            m = TimedLabel(DELTA, m_window)
            if label_refines(m, k) and label_refines(m, ell):
                assert both is not None and label_refines(m, both)


def test_composition_definedness_follows_refinement():
    small = [TimedLabel(DELTA, w) for w in ALL_WINDOWS if w.is_bounded and w.hi <= 3]
    for k, kp, ell, lp in product(small, repeat=4):
        defined = compose_label(k, kp) is not None
        assert defined == (k.window.intersect(kp.window) is not None)
        if defined and label_refines(k, ell) and label_refines(kp, lp):
            assert compose_label(ell, lp) is not None


def test_composition_definedness_is_not_preserved_by_finite_distance():
    k, kp, ell = delay(0), delay(1), delay(0, 1)
    assert eval_zero(label_distance(k, ell, GRID)) == 0
    assert eval_zero(label_distance(kp, ell, GRID)) == 0
    assert compose_label(k, kp) is None
    assert compose_label(ell, ell) is not None


def test_refined_labels_are_at_distance_zero():
    for lo, hi in product(range(4), repeat=2):
        if lo <= hi:
            k = delay(lo, hi)
            assert eval_zero(label_distance(k, delay(0, 3), GRID)) == 0


def test_compose():
    assert compose_label(TimedLabel("grant", Interval(0, 2)), TimedLabel("grant", Interval(0, 3))) == \
        TimedLabel("grant", Interval(0, 2))
    assert compose_label(TimedLabel("a", Interval(0, 1)), TimedLabel("a", Interval(2, 3))) is None
    assert compose_label(act("get"), act("grant")) is None


def test_quotient_cases():
    def q(ell, k, **kw):
        return quotient_label(TimedLabel("a", Interval(*ell)), TimedLabel("a", Interval(*k)), **kw)

    assert q((2, 4), (1, 3)) == TimedLabel("a", Interval(2, math.inf))
    assert q((0, 5), (1, 3)) == TimedLabel("a", Interval(0, math.inf))
    assert q((5, 6), (1, 2)) is None
    assert q((1, 2), (5, 6)) is None
    assert q((2, 3), (1, 5)) == TimedLabel("a", Interval(2, 3))
    assert q((0, 3), (1, 5)) == TimedLabel("a", Interval(0, 3))
    assert q((0, 5), (2, 2), narrow=True) == TimedLabel("a", Interval(2, 2))
    assert quotient_label(act("get"), act("grant")) is None


@hsettings(max_examples=1000, deadline=None)
@given(open_windows, open_windows)
def test_quotient_composes_back_into_the_numerator(ell_window, k_window):
    ell, k = TimedLabel(DELTA, ell_window), TimedLabel(DELTA, k_window)
    m = quotient_label(ell, k)
    if m is not None:
        assert label_refines(compose_label(k, m), ell)


def test_quotient_is_most_permissive_among_meeting_labels():
    """For m meeting k: m refines the quotient exactly when k composed with m refines ell."""
    for ell_window, k_window, m_window in product(ALL_WINDOWS, repeat=3):
        ell, k, m = (TimedLabel(DELTA, w) for w in (ell_window, k_window, m_window))
        composed = compose_label(k, m)
        if composed is None:
            continue
        quotient = quotient_label(ell, k)
        assert (quotient is not None and label_refines(m, quotient)) == label_refines(composed, ell)


def test_quotient_galois_fails_for_labels_missing_the_divisor():
    zero = TimedLabel(DELTA, Interval(0, 0))
    assert label_refines(delay(1), quotient_label(zero, zero))
    assert compose_label(zero, delay(1)) is None


def test_widen():
    assert widen_label(delay(0, 2), 1) == delay(0, 3)
    assert widen_label(delay(2, 3), 1) == delay(1, 4)
    assert widen_label(delay(2, 3), 0) == delay(2, 3)
    assert widen_label(act("get"), 5) == act("get")


def test_complement_labels():
    assert complement_labels((), {"get"}, GRID) == {act("get"), TimedLabel(DELTA, Interval(0, math.inf))}
    assert complement_labels([delay(0, 2)], set(), GRID) == {TimedLabel(DELTA, Interval(3, math.inf))}
    assert complement_labels([act("get")], {"get"}, GRID) == {TimedLabel(DELTA, Interval(0, math.inf))}
    assert complement_labels([delay(1, 2)], set(), GRID) == {
        delay(0), TimedLabel(DELTA, Interval(3, math.inf))}
    assert complement_labels([delay(0, 6)], set(), GRID) == set()
