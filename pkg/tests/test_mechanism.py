from fractions import Fraction

import pytest
from hypothesis import given

from conftest import instances
from fedex_menus.curves import build_curve_stack
from fedex_menus.hard_instances import lba_instance, perturbed_exponential
from fedex_menus.mechanism import (
    Mechanism,
    Menu,
    PriceMass,
    allocation_curve,
    fiat_optimal,
    is_clean,
    menu_complexity,
    menu_from_prices,
    prices_from_menu,
    push_forward,
    split_in_interval,
)

F = Fraction


def solve(inst):
    stack = build_curve_stack(inst)
    return stack, fiat_optimal(stack)


def test_split_examples():
    assert split_in_interval(2, (1, 4)) == (F(2, 3), F(1, 3))
    assert split_in_interval(F(5, 2), (1, 4)) == (F(1, 2), F(1, 2))
    w, _ = split_in_interval(2, (1, 4))
    assert isinstance(w, Fraction)


@pytest.mark.parametrize("p", [1, 4, 0, 5])
def test_split_requires_interior(p):
    with pytest.raises(ValueError):
        split_in_interval(p, (1, 4))


def test_menu_single_price():
    assert menu_from_prices(PriceMass(((3, F(1)),))).options == ((1, 3),)


def test_menu_two_prices():
    pm = PriceMass(((1, F(1, 2)), (4, F(1, 2))))
    assert menu_from_prices(pm).options == ((F(1, 2), F(1, 2)), (1, F(5, 2)))
    assert prices_from_menu(menu_from_prices(pm)) == pm


def test_menu_rejects_nonincreasing_pi():
    with pytest.raises(ValueError):
        Menu(((F(1, 2), 1), (F(1, 2), 2)))


def test_price_mass_validation():
    with pytest.raises(ValueError):
        PriceMass(((2, F(1, 2)), (1, F(1, 2))))
    with pytest.raises(ValueError):
        PriceMass(((2, F(0)),))
    assert PriceMass.merged([(2, F(1, 4)), (2, F(1, 4)), (3, F(0))]).atoms == ((2, F(1, 2)),)


def test_allocation_single_atom_is_step():
    A = allocation_curve(PriceMass.point(3), 5)
    assert A.A == (0, 0, 0, 1, 1, 1)
    assert A.jumps() == [3]


@given(instances())
def test_fiat_optimal_structure(inst):
    stack, mech = solve(inst)
    assert mech.day(1).atoms == ((stack.r(1), 1),)
    for i in inst.days:
        pm = mech.day(i)
        assert pm.total == 1
        ic = stack.ironed(i)
        for p in pm.prices:
            assert p <= stack.r(i)
            assert not ic.is_ironed(p)
        assert prices_from_menu(mech.menu(i)) == pm
        assert menu_complexity(mech)[0][i - 1] == len(allocation_curve(pm, inst.v_max).jumps())
    assert mech.downward_feasible()


@given(instances(max_n=1))
def test_single_day_single_atom(inst):
    stack, mech = solve(inst)
    assert menu_complexity(mech) == ([1], 1)
    assert is_clean(mech, inst)


def test_push_forward_cases():
    from fedex_menus.curves import RevenueCurve, iron

    ic = iron(RevenueCurve([0, 0, 0, 3, 3, 3, 0]))
    pm = PriceMass(((1, F(1, 3)), (3, F(1, 3)), (5, F(1, 3))))
    out = push_forward(pm, ic, 4)
    # 1 splits onto (0, 3); 3 stays; 5 collapses onto r = 4
    assert out.atoms == ((0, F(2, 9)), (3, F(1, 3) + F(1, 9)), (4, F(1, 3)))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_perturbed_exponential_complexity_and_allocation(n):
    stack, mech = solve(perturbed_exponential(n))
    per_day, total = menu_complexity(mech)
    assert per_day == [2 ** (i - 1) for i in range(1, n + 1)]
    assert total == 2 ** n - 1
    for i in range(1, n + 1):
        A = mech.allocation(i).A
        width = 2 ** (n - i + 1)
        for k in range(2 ** (i - 1)):
            lo = 2 ** (n - i) + k * width
            hi = min(lo + width, 2 ** n + 1)
            assert all(A[v] == F(k + 1, 2 ** (i - 1)) for v in range(lo, hi))
        if i < n:
            nxt = stack.ironed(i + 1)
            for p in mech.day(i).prices:
                assert nxt.interval_containing(p) is not None


@pytest.mark.parametrize("n", [4, 8])
def test_lba_atom_pattern(n):
    stack, mech = solve(lba_instance(n))
    for i in range(1, n + 1):
        assert mech.day(i).prices == list(range(n + 2, n + i + 1)) + [3 * n + i]
    assert menu_complexity(mech)[1] == n * (n + 1) // 2
    assert len(mech.allocation(n).jumps()) == n
    assert is_clean(mech, lba_instance(n))


def test_lba_day_one_price_splits():
    n = 4
    stack, mech = solve(lba_instance(n))
    assert mech.day(1).prices == [3 * n + 1]
    assert mech.day(2).prices == [n + 2, 3 * n + 2]


def test_is_clean_detects_dropped_atom():
    n = 4
    inst = lba_instance(n)
    _, mech = solve(inst)
    day3 = mech.day(3)
    (p0, m0), rest = day3.atoms[0], day3.atoms[1:]
    assert p0 == n + 2
    # move the n+2 mass up to the top price on day 3
    moved = PriceMass.merged(list(rest[:-1]) + [(rest[-1][0], rest[-1][1] + m0)])
    assert not is_clean(mech.replace_day(3, moved), inst)


def test_mechanism_accessors():
    mech = Mechanism((PriceMass.point(2), PriceMass.point(1)), v_max=3)
    assert mech.n == 2
    assert mech.menu(2).options == ((1, 1),)
    assert mech.downward_feasible()
    assert not mech.replace_day(2, PriceMass.point(3)).downward_feasible()
