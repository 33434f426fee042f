"""Price distributions, lottery menus and the three-case optimal construction.

A day's menu is stored as a distribution over posted prices (a
:class:`PriceMass`).  Option ``l`` of the equivalent lottery menu ships with
probability ``sum_{j<=l} a_j`` for payment ``sum_{j<=l} a_j * price_j``.
Prices are grid indices; multiply by ``grid_step`` for money.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .curves import CurveStack, IronedCurve
from .instance import FedexInstance, Number


def _merge(atoms: Iterable[tuple]) -> tuple:
    acc: dict = {}
    for price, mass in atoms:
        if mass == 0:
            continue
        acc[price] = acc.get(price, 0) + mass
    return tuple(sorted((p, m) for p, m in acc.items() if m != 0))


@dataclass(frozen=True)
class PriceMass:
    atoms: tuple

    def __post_init__(self):
        atoms = tuple((p, m) for p, m in self.atoms)
        prices = [p for p, _ in atoms]
        if any(b <= a for a, b in zip(prices, prices[1:])):
            raise ValueError("PriceMass prices must be strictly increasing")
        if any(m <= 0 for _, m in atoms):
            raise ValueError("PriceMass masses must be positive")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def merged(cls, atoms: Iterable[tuple]) -> "PriceMass":
        return cls(_merge(atoms))

    @classmethod
    def point(cls, price, mass=Fraction(1)) -> "PriceMass":
        return cls(((price, mass),))

    @property
    def prices(self) -> list:
        return [p for p, _ in self.atoms]

    @property
    def total(self) -> Number:
        return sum((m for _, m in self.atoms), 0)

    def __len__(self):
        return len(self.atoms)

    def utility(self, x) -> Number:
        """Utility of a buyer with grid value ``x`` facing this menu."""
        return sum((m * (x - p) for p, m in self.atoms if p <= x), 0)


@dataclass(frozen=True)
class Menu:
    """Lottery options ``(pi, payment)``, sorted by pi; the null option is implicit."""

    options: tuple

    def __post_init__(self):
        opts = tuple((a, b) for a, b in self.options)
        pis = [a for a, _ in opts]
        if any(b <= a for a, b in zip(pis, pis[1:])) or (pis and pis[0] <= 0):
            raise ValueError("menu allocation probabilities must be strictly increasing and positive")
        object.__setattr__(self, "options", opts)


def menu_from_prices(pm: PriceMass, step: Number = 1) -> Menu:
    opts, pi, pay = [], 0, 0
    for price, mass in pm.atoms:
        pi += mass
        pay += mass * price * step
        opts.append((pi, pay))
    return Menu(tuple(opts))


def prices_from_menu(menu: Menu, step: Number = 1) -> PriceMass:
    atoms, prev_pi, prev_pay = [], 0, 0
    for pi, pay in menu.options:
        if pi <= prev_pi:
            raise ValueError("menu allocation probabilities must be strictly increasing")
        mass = pi - prev_pi
        atoms.append(((pay - prev_pay) / mass / step, mass))
        prev_pi, prev_pay = pi, pay
    return PriceMass(tuple(atoms))


@dataclass(frozen=True)
class AllocationCurve:
    """``A(v) = sum of masses with price <= v``; ``density[v] = A(v) - A(v-1)``."""

    A: tuple

    @property
    def density(self) -> list:
        return [a - (self.A[v - 1] if v else 0) for v, a in enumerate(self.A)]

    def jumps(self) -> list[int]:
        return [v for v, a in enumerate(self.density) if a != 0]


def allocation_curve(pm: PriceMass, v_max: int) -> AllocationCurve:
    A, acc, k = [], 0, 0
    atoms = pm.atoms
    for v in range(v_max + 1):
        while k < len(atoms) and atoms[k][0] <= v:
            acc += atoms[k][1]
            k += 1
        A.append(acc)
    return AllocationCurve(tuple(A))


@dataclass(frozen=True)
class Mechanism:
    days: tuple
    v_max: int
    grid_step: Number = 1

    def day(self, i: int) -> PriceMass:
        return self.days[i - 1]

    @property
    def n(self) -> int:
        return len(self.days)

    def menu(self, i: int) -> Menu:
        return menu_from_prices(self.day(i), self.grid_step)

    def allocation(self, i: int) -> AllocationCurve:
        return allocation_curve(self.day(i), self.v_max)

    def downward_feasible(self) -> bool:
        """Later days must give every value at least the earlier day's utility."""
        for i in range(1, self.n):
            a, b = self.day(i), self.day(i + 1)
            if any(b.utility(x) < a.utility(x) for x in range(self.v_max + 1)):
                return False
        return True

    def replace_day(self, i: int, pm: PriceMass) -> "Mechanism":
        days = list(self.days)
        days[i - 1] = pm
        return Mechanism(tuple(days), self.v_max, self.grid_step)


def split_in_interval(p, interval: Sequence) -> tuple:
    """Weights ``(w, 1 - w)`` on the interval ends with ``w*x + (1-w)*y = p``."""
    x, y = interval
    if not x < p < y:
        raise ValueError(f"price {p} is not strictly inside [{x}, {y}]")
    if all(isinstance(t, (int, Fraction)) for t in (x, y, p)):
        w = Fraction(y - p) / (y - x)
    else:
        w = (y - p) / (y - x)
    return w, 1 - w


def push_forward(pm: PriceMass, ironed: IronedCurve, r_next: int) -> PriceMass:
    """Move one day's price mass onto the next day's curve.

    Prices at or above ``r_next`` collapse onto it, prices interior to an
    ironed interval split onto its ends, everything else stays put.
    """
    out = []
    for p, m in pm.atoms:
        if p >= r_next:
            out.append((r_next, m))
            continue
        iv = ironed.interval_containing(p)
        if iv is None:
            out.append((p, m))
        else:
            w, w2 = split_in_interval(p, iv)
            out.append((iv[0], m * w))
            out.append((iv[1], m * w2))
    return PriceMass.merged(out)


def fiat_optimal(stack: CurveStack) -> Mechanism:
    """Revenue-optimal mechanism: optimal price on day 1, then push mass forward."""
    inst = stack.instance
    one = Fraction(1) if inst.mode == "exact" else 1.0
    days = [PriceMass.point(stack.r(1), one)]
    for i in range(2, stack.n + 1):
        days.append(push_forward(days[-1], stack.ironed(i), stack.r(i)))
    return Mechanism(tuple(days), inst.v_max, inst.grid_step)


def menu_complexity(mech: Mechanism) -> tuple[list[int], int]:
    per_day = [len(pm) for pm in mech.days]
    return per_day, sum(per_day)


def is_clean(mech: Mechanism, inst: FedexInstance) -> bool:
    """Allocation density on values up to ``n + i`` never shrinks from day i to i+1."""
    n = inst.n
    for i in range(1, mech.n):
        a_i = mech.allocation(i).density
        a_next = mech.allocation(i + 1).density
        for x in range(0, min(n + i, mech.v_max) + 1):
            if a_next[x] < a_i[x]:
                return False
    return True
