from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import instances
from fedex_menus.curves import (
    RevenueCurve,
    argmax,
    build_curve_stack,
    day_revenue_curve,
    evaluate_envelope,
    iron,
    revenue_decrement,
    virtual_value,
)
from fedex_menus.hard_instances import exponential_instance, lba_instance, perturbed_exponential

F = Fraction


def test_iron_dip_in_middle():
    ic = iron(RevenueCurve([0, 0, 2]))
    assert ic.envelope_values == (0, 1, 2)
    assert ic.ironed_intervals == ((0, 2),)
    assert ic.is_ironed(1) and not ic.is_ironed(0) and not ic.is_ironed(2)


def test_iron_concave_curve_untouched():
    ic = iron(RevenueCurve([0, 1, 0]))
    assert ic.envelope_values == (0, 1, 0)
    assert ic.ironed_intervals == ()
    assert ic.hull_vertices == (0, 1, 2)


def test_collinear_points_not_ironed():
    ic = iron(RevenueCurve([0, 1, 2, 3]))
    assert ic.ironed_intervals == ()
    assert ic.corners == (0, 3)
    assert ic.hull_vertices == (0, 1, 2, 3)


def test_iron_rejects_empty():
    with pytest.raises(ValueError):
        iron(RevenueCurve([]))


def test_interval_containing_is_open():
    ic = iron(RevenueCurve([0, 0, 0, 3]))
    assert ic.interval_containing(F(1, 2)) == (0, 3)
    assert ic.interval_containing(0) is None
    assert ic.interval_containing(3) is None


def test_evaluate_envelope_between_corners():
    ic = iron(RevenueCurve([0, 0, 2]))
    assert evaluate_envelope(ic, F(1, 2)) == F(1, 2)
    assert ic(F(3, 2)) == F(3, 2)
    with pytest.raises(ValueError):
        evaluate_envelope(ic, 3)


def test_evaluate_envelope_lba_half_points():
    n = 4
    stack = build_curve_stack(lba_instance(n))
    for i in range(1, n + 1):
        ic = stack.ironed(i)
        for x in range(n + 1, 3 * n + i):
            mid = x + F(1, 2)
            assert ic(mid) == (ic(x) + ic(x + 1)) / 2


@given(instances())
def test_day_curve_matches_brute_force(inst):
    for d in inst.days:
        assert list(day_revenue_curve(inst, d).values) == oracles.revenue_curve(inst, d)


@given(instances())
def test_envelope_matches_chord_oracle(inst):
    stack = build_curve_stack(inst)
    for d in inst.days:
        vals = stack.geq(d).values
        assert list(iron(stack.geq(d)).envelope_values) == oracles.concave_envelope(vals)


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=1, max_size=14))
def test_iron_properties(vals):
    ic = iron(RevenueCurve(vals))
    env = ic.envelope_values
    assert all(e >= y for e, y in zip(env, vals))
    assert all(env[v - 1] + env[v + 1] <= 2 * env[v] for v in range(1, len(env) - 1))
    again = iron(RevenueCurve(env))
    assert again.envelope_values == env
    assert again.ironed_intervals == ()
    for a, b in ic.ironed_intervals:
        assert all(vals[v] < env[v] for v in range(a + 1, b))
    assert all(vals[v] == env[v] for v in ic.hull_vertices)


def test_virtual_value_identity_exponential():
    inst = exponential_instance(5)
    for d in inst.days:
        R = day_revenue_curve(inst, d)
        for v in range(1, inst.v_max):
            vv = virtual_value(inst, d, v)
            assert vv == revenue_decrement(inst, d, v)
            assert inst.q[d - 1] * vv == R[v] - R[v + 1]


@given(instances(max_v=10))
def test_virtual_value_identity_random(inst):
    for d in inst.days:
        for v in range(1, inst.v_max):
            assert virtual_value(inst, d, v) == revenue_decrement(inst, d, v)


def test_virtual_value_range_checked():
    inst = exponential_instance(3)
    with pytest.raises(ValueError):
        virtual_value(inst, 1, 0)
    with pytest.raises(ValueError):
        virtual_value(inst, 1, inst.v_max)


def test_argmax_ties():
    assert argmax([0, 2, 1, 2]) == 1
    assert argmax([0, 2, 1, 2], "largest") == 3
    with pytest.raises(ValueError):
        argmax([1], "middle")


@given(instances())
def test_stack_recursion_against_direct_formula(inst):
    stack = build_curve_stack(inst)
    n = inst.n
    assert stack.geq(n).values == stack.R(n).values
    for i in range(1, n):
        nxt, r = stack.ironed(i + 1), stack.r(i + 1)
        for v in range(inst.v_max + 1):
            expect = stack.R(i)[v] + nxt(min(v, r))
            assert stack.geq(i)[v] == expect
    for i in inst.days:
        vals = stack.geq(i).values
        assert vals[stack.r(i)] == max(vals)
        assert all(vals[v] < max(vals) for v in range(stack.r(i)))


@given(instances(max_n=1))
def test_single_day_opt_is_best_posted_price(inst):
    assert build_curve_stack(inst).opt() == oracles.best_posted_price_revenue(inst)


def test_opt_is_max_of_first_curve_on_hard_instances():
    for inst in (lba_instance(8), perturbed_exponential(4)):
        stack = build_curve_stack(inst)
        assert stack.opt() == max(stack.geq(1).values)
        assert all(stack.r(i) <= inst.v_max for i in inst.days)


def test_lba_reserve_prices():
    n = 8
    stack = build_curve_stack(lba_instance(n))
    assert [stack.r(i) for i in range(1, n + 1)] == [3 * n + i for i in range(1, n + 1)]
    assert stack.opt() * n == n * (2 * n + 1)
