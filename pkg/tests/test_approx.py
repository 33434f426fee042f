from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import instances
from fedex_menus.approx import (
    AnchorSet,
    approximate_mechanism,
    augment_anchors,
    downward_ic_audit,
    snap_day,
)
from fedex_menus.curves import RevenueCurve, build_curve_stack, iron
from fedex_menus.hard_instances import lba_instance, perturbed_exponential
from fedex_menus.mechanism import PriceMass, fiat_optimal
from fedex_menus.polygon import ConcavePL, max_gap

F = Fraction


def test_augment_non_ironed_point_maps_to_itself():
    ic = iron(RevenueCurve([0, 0, 0, 3, 2]))
    a = augment_anchors(ic, [3])
    assert a.points == (3,) and a.provenance[3] == (3, 3)


def test_augment_ironed_point_maps_to_interval_ends():
    ic = iron(RevenueCurve([0, 0, 0, 3, 2]))
    a = augment_anchors(ic, [1, F(5, 2)])
    assert a.provenance[1] == (0, 3)
    assert a.provenance[F(5, 2)] == (0, 3)
    assert a.points == (0, 3)


def test_augment_lba_long_linear_piece():
    n = 8
    stack = build_curve_stack(lba_instance(n))
    for i in range(2, n + 1):
        ic = stack.ironed(i)
        x = n + i + 1
        lo, hi = augment_anchors(ic, [x]).provenance[x]
        assert lo <= x <= hi
        assert not ic.is_ironed(lo) and not ic.is_ironed(hi)
        assert ic.envelope_values[lo] == stack.geq(i)[lo]
        assert ic.envelope_values[hi] == stack.geq(i)[hi]


def test_augment_does_not_increase_gap():
    n = 8
    stack = build_curve_stack(lba_instance(n))
    for i in range(1, n + 1):
        ic, r = stack.ironed(i), stack.r(i)
        f = ConcavePL.from_ironed(ic, r)
        X = [0, F(r, 3), F(2 * r, 3), r]
        anchors = augment_anchors(ic, X)
        assert len(anchors.points) <= 2 * len(X)
        assert max_gap(f, anchors.points) <= max_gap(f, X)
        for p in anchors.points:
            assert ic.envelope_values[p] == stack.geq(i)[p]


def test_snap_examples():
    anchors = AnchorSet((0, 4, 8))
    assert snap_day(PriceMass(((5, F(1)),)), anchors).atoms == ((4, F(3, 4)), (8, F(1, 4)))
    pm = PriceMass(((4, F(1, 2)), (8, F(1, 2))))
    assert snap_day(pm, anchors) == pm


def test_snap_rejects_atom_above_anchors():
    with pytest.raises(ValueError):
        snap_day(PriceMass.point(9), AnchorSet((0, 4, 8)))


def test_audit_equality_on_unchanged():
    pm = PriceMass(((2, F(1, 2)), (5, F(1, 2))))
    assert downward_ic_audit(pm, pm, 6) == []


def test_audit_detects_upward_snap():
    before = PriceMass.point(5)
    after = PriceMass(((6, F(1, 2)), (8, F(1, 2))))
    assert downward_ic_audit(before, after, 8) == [(6, 1), (7, F(3, 2)), (8, 2)]


def test_lba_day3_snap_to_four_anchors():
    n = 8
    inst = lba_instance(n)
    stack = build_curve_stack(inst)
    mech = fiat_optimal(stack)
    ic, r = stack.ironed(3), stack.r(3)
    f = ConcavePL.from_ironed(ic, r)
    X = [0, n + 2, 2 * n, r]
    anchors = augment_anchors(ic, X)
    day3 = mech.day(3)
    snapped = snap_day(day3, anchors)
    assert len(snapped) <= 2 * len(X)
    env = ic.envelope_values
    loss = sum(m * env[p] for p, m in day3.atoms) - sum(m * env[p] for p, m in snapped.atoms)
    assert 0 <= loss <= max_gap(f, X)
    assert downward_ic_audit(day3, snapped, inst.v_max) == []


def test_eps_range_checked():
    inst = lba_instance(4)
    stack = build_curve_stack(inst)
    for eps in (0, 1, F(3, 2)):
        with pytest.raises(ValueError):
            approximate_mechanism(inst, stack, eps)


def test_fine_eps_recovers_optimum():
    inst = lba_instance(4)
    stack = build_curve_stack(inst)
    mech, rep = approximate_mechanism(inst, stack, F(1, 10 ** 6), scheme="greedy")
    assert rep.revenue == rep.opt
    assert [d.loss for d in rep.days] == [0] * inst.n


@pytest.mark.parametrize("scheme", ["best", "greedy", "dyadic", "level"])
@pytest.mark.parametrize("eps", [F(1, 4), F(1, 10)])
def test_lba8_guarantee(scheme, eps):
    inst = lba_instance(8)
    stack = build_curve_stack(inst)
    mech, rep = approximate_mechanism(inst, stack, eps, scheme)
    assert rep.meets_guarantee
    assert rep.ic_ok and rep.audit_ok
    assert rep.complexity <= 2 * rep.sum_k
    for d in rep.days:
        assert d.loss <= d.eps_i
        assert d.atoms <= max(1, 2 * d.k)


def test_perturbed_exponential_complexity_drops():
    inst = perturbed_exponential(6)
    stack = build_curve_stack(inst)
    mech, rep = approximate_mechanism(inst, stack, F(1, 4))
    assert rep.complexity < 2 ** 6 - 1
    assert rep.revenue >= F(3, 4) * rep.opt
    assert rep.ic_ok


@settings(max_examples=40)
@given(instances())
def test_random_instances_guarantee(inst):
    stack = build_curve_stack(inst)
    for eps in (F(1, 2), F(1, 5)):
        mech, rep = approximate_mechanism(inst, stack, eps)
        assert rep.meets_guarantee
        assert rep.ic_ok and rep.audit_ok
        assert rep.complexity <= 2 * rep.sum_k
        assert mech.downward_feasible()


@settings(max_examples=30)
@given(instances())
def test_revenue_monotone_in_eps_for_nested_scheme(inst):
    stack = build_curve_stack(inst)
    revs = [approximate_mechanism(inst, stack, eps, "level")[1].revenue
            for eps in (F(1, 2), F(1, 4), F(1, 8), F(1, 16))]
    assert all(a <= b for a, b in zip(revs, revs[1:]))
