"""Revenue curves, ironing, and the optimal-continuation curve recursion."""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .instance import FedexInstance, Number

TIE_BREAKS = ("smallest", "largest")


@dataclass(frozen=True)
class RevenueCurve:
    """Curve values on the grid ``v = 0..len(values)-1``."""

    values: tuple
    mode: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, v):
        return self.values[v]

    @property
    def domain_max(self) -> int:
        return len(self.values) - 1

    def scaled(self, k) -> "RevenueCurve":
        return RevenueCurve([k * y for y in self.values], self.mode)

    def negated(self) -> "RevenueCurve":
        # the Gamma = -R convention used by some write-ups; reporting only
        return self.scaled(-1)


def _tolerance(values: Sequence, mode: str) -> Number:
    if mode != "float":
        return 0
    scale = max((abs(y) for y in values), default=0.0)
    return 1e-12 * max(1.0, scale)


def _upper_hull(values: Sequence, tol) -> list[int]:
    """Monotone-chain upper hull over the points ``(v, values[v])``.

    Collinear points are dropped, so consecutive returned corners have
    strictly decreasing slopes.
    """
    hull: list[int] = []
    for v, y in enumerate(values):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # b is redundant if it is on or below the chord a -> v
            cross = (values[b] - values[a]) * (v - a) - (y - values[a]) * (b - a)
            if cross <= tol * (v - a):
                hull.pop()
            else:
                break
        hull.append(v)
    return hull


@dataclass(frozen=True)
class IronedCurve:
    """Upper concave envelope of a grid curve.

    ``corners`` are the strict vertices of the envelope; ``hull_vertices``
    are all grid points where the envelope touches the base curve, collinear
    runs included.  Ironed grid points are exactly the ones not in
    ``hull_vertices``.
    """

    base: RevenueCurve
    corners: tuple
    hull_vertices: tuple
    ironed_intervals: tuple
    envelope_values: tuple = field(repr=False)

    @property
    def domain_max(self) -> int:
        return self.base.domain_max

    @property
    def mode(self) -> str:
        return self.base.mode

    def __call__(self, x) -> Number:
        return evaluate_envelope(self, x)

    def is_ironed(self, v) -> bool:
        """True when ``v`` (grid point or not) lies strictly inside an ironed interval."""
        return self.interval_containing(v) is not None

    def interval_containing(self, p):
        """The ironed interval ``(x, y)`` with ``x < p < y``, or None."""
        ivs = self.ironed_intervals
        k = bisect_right(ivs, (p, float("inf"))) - 1
        if k >= 0:
            x, y = ivs[k]
            if x < p < y:
                return (x, y)
        return None

    def slopes(self) -> list:
        c, e = self.corners, self.envelope_values
        return [(e[c[k + 1]] - e[c[k]]) / (c[k + 1] - c[k]) for k in range(len(c) - 1)]

    def right_slope(self, x) -> Number:
        c = self.corners
        if x >= c[-1]:
            return self.slopes()[-1] if len(c) > 1 else 0
        k = bisect_right(c, x) - 1
        e = self.envelope_values
        return (e[c[k + 1]] - e[c[k]]) / (c[k + 1] - c[k])

    def left_slope(self, x) -> Number:
        c = self.corners
        if x <= c[0]:
            return self.slopes()[0] if len(c) > 1 else 0
        k = bisect_right(c, x) - 1
        if c[k] == x:
            k -= 1
        e = self.envelope_values
        return (e[c[k + 1]] - e[c[k]]) / (c[k + 1] - c[k])


def iron(curve: RevenueCurve) -> IronedCurve:
    vals = curve.values
    if not vals:
        raise ValueError("cannot iron an empty curve")
    tol = _tolerance(vals, curve.mode)
    corners = _upper_hull(vals, tol)
    env = list(vals)
    for a, b in zip(corners, corners[1:]):
        ya, yb = vals[a], vals[b]
        for v in range(a + 1, b):
            env[v] = ya + (yb - ya) * (v - a) / (b - a)
    touch = [v for v in range(len(vals)) if vals[v] >= env[v] - tol]
    intervals = []
    for a, b in zip(touch, touch[1:]):
        if b > a + 1:
            intervals.append((a, b))
    return IronedCurve(
        base=curve,
        corners=tuple(corners),
        hull_vertices=tuple(touch),
        ironed_intervals=tuple(intervals),
        envelope_values=tuple(env),
    )


def evaluate_envelope(ic: IronedCurve, x) -> Number:
    """Piecewise-linear evaluation of the envelope at any x in the domain."""
    if x < 0 or x > ic.domain_max:
        raise ValueError(f"x={x} outside [0, {ic.domain_max}]")
    if isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1):
        return ic.envelope_values[int(x)]
    c, e = ic.corners, ic.envelope_values
    k = bisect_right(c, x) - 1
    if c[k] == x or k == len(c) - 1:
        return e[c[k]]
    a, b = c[k], c[k + 1]
    return e[a] + (e[b] - e[a]) * (x - a) / (b - a)


def day_revenue_curve(inst: FedexInstance, day: int) -> RevenueCurve:
    """``R_i(v) = q_i * value(v) * Pr[value >= v]``."""
    surv = inst.survival(day)
    qi = inst.q[day - 1]
    vals = [qi * inst.value_of(v) * surv[v] for v in range(inst.v_max + 1)]
    if inst.mode == "exact":
        vals[0] = Fraction(0)
    return RevenueCurve(vals, inst.mode)


def revenue_decrement(inst: FedexInstance, day: int, v: int) -> Number:
    """``R_f(v) - R_f(v+1)`` for the day's value distribution, with q divided out."""
    _check_vv_range(inst, v)
    surv = inst.survival(day)
    step = inst.grid_step
    return step * (v * surv[v] - (v + 1) * surv[v + 1])


def virtual_value(inst: FedexInstance, day: int, v: int) -> Number:
    """``phi_f(v) f(v) = v f(v) - (1 - F(v))`` (grid step 1 units scaled by the step)."""
    _check_vv_range(inst, v)
    f = inst.day_pmf(day)
    surv = inst.survival(day)
    return inst.grid_step * (v * f[v] - surv[v + 1])


def _check_vv_range(inst: FedexInstance, v: int) -> None:
    if not 1 <= v <= inst.v_max - 1:
        raise ValueError(f"v={v} outside [1, {inst.v_max - 1}]")


def argmax(values: Sequence, tie_break: str = "smallest") -> int:
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
    best = max(values)
    idx = [v for v, y in enumerate(values) if y == best]
    return idx[0] if tie_break == "smallest" else idx[-1]


@dataclass(frozen=True)
class CurveStack:
    """Per-day optimal-continuation curves, 1-indexed by day via the accessors."""

    instance: FedexInstance
    day_curves: tuple
    R_geq: tuple
    R_geq_ironed: tuple
    r_geq: tuple
    tie_break: str = "smallest"

    @property
    def n(self) -> int:
        return self.instance.n

    def R(self, day: int) -> RevenueCurve:
        return self.day_curves[day - 1]

    def geq(self, day: int) -> RevenueCurve:
        return self.R_geq[day - 1]

    def ironed(self, day: int) -> IronedCurve:
        return self.R_geq_ironed[day - 1]

    def r(self, day: int) -> int:
        return self.r_geq[day - 1]

    def opt(self) -> Number:
        return self.geq(1)[self.r(1)]


def continuation(day_curve: RevenueCurve, nxt: IronedCurve, r_next: int) -> RevenueCurve:
    """``R_i(v) + Rtilde_{>=i+1}(min(v, r_{>=i+1}))``."""
    cap = nxt.envelope_values[r_next]
    vals = [
        y + (nxt.envelope_values[v] if v < r_next else cap)
        for v, y in enumerate(day_curve.values)
    ]
    return RevenueCurve(vals, day_curve.mode)


def build_curve_stack(inst: FedexInstance, tie_break: str = "smallest") -> CurveStack:
    n = inst.n
    day_curves = [day_revenue_curve(inst, d) for d in inst.days]
    R_geq = [None] * n
    ironed = [None] * n
    r = [0] * n
    R_geq[n - 1] = day_curves[n - 1]
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            R_geq[i] = continuation(day_curves[i], ironed[i + 1], r[i + 1])
        ironed[i] = iron(R_geq[i])
        r[i] = argmax(R_geq[i].values, tie_break)
    return CurveStack(
        instance=inst,
        day_curves=tuple(day_curves),
        R_geq=tuple(R_geq),
        R_geq_ironed=tuple(ironed),
        r_geq=tuple(r),
        tie_break=tie_break,
    )
