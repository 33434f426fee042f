"""Polygon approximation of concave piecewise-linear functions.

Every scheme returns interpolating approximations: the approximant passes
through ``(x, f(x))`` for each chosen ``x`` and is linear in between, so it
never exceeds a concave ``f``.  Errors are certified exactly: the gap between
a piecewise-linear ``f`` and a chord is maximized at one of ``f``'s own
breakpoints, so a finite scan suffices.
"""
from __future__ import annotations

import csv
import io
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence

from .curves import IronedCurve

SCHEMES = ("greedy", "dyadic", "level", "best")


@dataclass(frozen=True)
class ConcavePL:
    """Concave piecewise-linear function through ``breakpoints`` (sorted by x)."""

    breakpoints: tuple

    def __post_init__(self):
        pts = tuple((Fraction(x), Fraction(y)) for x, y in self.breakpoints)
        if len(pts) < 2:
            raise ValueError("need at least two breakpoints")
        xs = [x for x, _ in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint x values must be strictly increasing")
        slopes = [(pts[k + 1][1] - pts[k][1]) / (pts[k + 1][0] - pts[k][0]) for k in range(len(pts) - 1)]
        if any(b > a for a, b in zip(slopes, slopes[1:])):
            raise ValueError("slopes must be non-increasing (function not concave)")
        object.__setattr__(self, "breakpoints", pts)
        object.__setattr__(self, "_xs", tuple(xs))
        object.__setattr__(self, "_slopes", tuple(slopes))

    # -- construction ---------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "ConcavePL":
        """Upper concave hull of arbitrary points; repeated x keeps the highest y."""
        best: dict = {}
        for x, y in points:
            x, y = Fraction(x), Fraction(y)
            if x not in best or y > best[x]:
                best[x] = y
        xs = sorted(best)
        hull = _hull_points([(x, best[x]) for x in xs])
        return cls(tuple(hull))

    @classmethod
    def from_ironed(cls, ic: IronedCurve, upto: int | None = None) -> "ConcavePL":
        """The ironed envelope restricted to ``[0, upto]`` (default: whole domain)."""
        end = ic.domain_max if upto is None else upto
        e = ic.envelope_values
        xs = [c for c in ic.corners if c < end] + [end]
        if xs[0] != 0:
            xs.insert(0, 0)
        return cls(tuple((x, e[x]) for x in xs))

    @classmethod
    def from_csv(cls, text: str) -> "ConcavePL":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].lstrip().startswith("#")]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]  # header
        if not rows:
            raise ValueError("no data rows in curve CSV")
        return cls.from_points((Fraction(r[0].strip()), Fraction(r[1].strip())) for r in rows)

    # -- evaluation -----------------------------------------------------

    @property
    def lo(self) -> Fraction:
        return self._xs[0]

    @property
    def hi(self) -> Fraction:
        return self._xs[-1]

    @property
    def domain_max(self) -> Fraction:
        return self.hi

    @property
    def xs(self) -> tuple:
        return self._xs

    @property
    def slopes(self) -> tuple:
        return self._slopes

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        if x < self.lo or x > self.hi:
            raise ValueError(f"x={x} outside [{self.lo}, {self.hi}]")
        k = min(bisect_right(self._xs, x) - 1, len(self._slopes) - 1)
        x0, y0 = self.breakpoints[k]
        return y0 + self._slopes[k] * (x - x0)

    def right_derivative(self, x) -> Fraction:
        """``f+``; at the right end of the domain the one-sided slope from the left is used."""
        k = bisect_right(self._xs, Fraction(x)) - 1
        return self._slopes[min(max(k, 0), len(self._slopes) - 1)]

    def left_derivative(self, x) -> Fraction:
        """``f-``; at the left end of the domain the one-sided slope from the right is used."""
        k = bisect_left(self._xs, Fraction(x)) - 1
        return self._slopes[min(max(k, 0), len(self._slopes) - 1)]

    def restrict(self, a, b) -> "ConcavePL":
        a, b = Fraction(a), Fraction(b)
        if not self.lo <= a < b <= self.hi:
            raise ValueError(f"[{a}, {b}] not a subinterval of [{self.lo}, {self.hi}]")
        inner = [(x, y) for x, y in self.breakpoints if a < x < b]
        return ConcavePL(((a, self(a)),) + tuple(inner) + ((b, self(b)),))

    def corners(self) -> list:
        """x values where the slope actually changes, plus both ends."""
        out = [self.lo]
        for k in range(1, len(self._xs) - 1):
            if self._slopes[k] != self._slopes[k - 1]:
                out.append(self._xs[k])
        out.append(self.hi)
        return out


def _is_number(s: str) -> bool:
    try:
        Fraction(s.strip())
        return True
    except (ValueError, ZeroDivisionError):
        return False


def _hull_points(pts: list) -> list:
    """Upper hull of x-sorted points, collinear points dropped."""
    ys = [y for _, y in pts]
    xs = [x for x, _ in pts]
    hull: list = []
    for k in range(len(pts)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (ys[b] - ys[a]) * (xs[k] - xs[a]) - (ys[k] - ys[a]) * (xs[b] - xs[a])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(k)
    return [pts[k] for k in hull]


# --- approximations -------------------------------------------------------


@dataclass(frozen=True)
class PolygonApprox:
    f: ConcavePL
    X: tuple
    certified_error: Fraction
    scheme: str = ""
    bound: Fraction | None = None

    def __len__(self):
        return len(self.X)

    def __call__(self, x) -> Fraction:
        """The interpolant through ``(x_i, f(x_i))``."""
        x = Fraction(x)
        X = self.X
        if x < X[0] or x > X[-1]:
            raise ValueError(f"x={x} outside [{X[0]}, {X[-1]}]")
        k = min(bisect_right(X, x) - 1, len(X) - 2)
        a, b = X[k], X[k + 1]
        fa, fb = self.f(a), self.f(b)
        return fa + (fb - fa) * (x - a) / (b - a)

    def collapsed(self) -> tuple:
        """X without points where the interpolant does not bend."""
        X, f = self.X, self.f
        out = [X[0]]
        for k in range(1, len(X) - 1):
            a, b, c = out[-1], X[k], X[k + 1]
            if (f(b) - f(a)) * (c - b) != (f(c) - f(b)) * (b - a):
                out.append(b)
        out.append(X[-1])
        return tuple(out)

    @property
    def size(self) -> int:
        return len(self.X)


def max_gap(f: ConcavePL, X: Sequence) -> Fraction:
    """``max_x f(x) - f_X(x)`` over ``[X[0], X[-1]]``, exactly."""
    X = [Fraction(x) for x in X]
    worst = Fraction(0)
    xs = f.xs
    for a, b in zip(X, X[1:]):
        fa, fb = f(a), f(b)
        lo, hi = bisect_right(xs, a), bisect_left(xs, b)
        for k in range(lo, hi):
            x, y = f.breakpoints[k]
            gap = y - (fa + (fb - fa) * (x - a) / (b - a))
            if gap > worst:
                worst = gap
    return worst


def _make(f: ConcavePL, X: Iterable, scheme: str, bound=None) -> PolygonApprox:
    pts = tuple(sorted({Fraction(x) for x in X}))
    if pts[0] != f.lo or pts[-1] != f.hi:
        raise ValueError("X must contain both ends of the domain")
    return PolygonApprox(f, pts, max_gap(f, pts), scheme, bound)


def _greedy_points(f: ConcavePL, eps: Fraction) -> list:
    """Farthest-reach chord walk; ``eps = 0`` reproduces the corners."""
    bp = f.breakpoints
    X = [f.lo]
    k = 0  # index of the last breakpoint <= current start
    while X[-1] < f.hi:
        x0 = X[-1]
        y0 = f(x0)
        while k + 1 < len(bp) and bp[k + 1][0] <= x0:
            k += 1
        T = None  # max over interior breakpoints b of (f(b) - y0 - eps)/(b - x0)
        j = k + 1
        reach = None
        while j < len(bp):
            bx, by = bp[j]
            s = (by - y0) / (bx - x0)
            if T is not None and s < T:
                # farthest end lies on the segment [bp[j-1], bp[j]]: solve chord slope == T
                ax, ay = bp[j - 1]
                m = (by - ay) / (bx - ax)
                reach = (ay - m * ax - y0 + T * x0) / (T - m)
                break
            t = (by - y0 - eps) / (bx - x0)
            T = t if T is None or t > T else T
            j += 1
        if reach is None:
            reach = f.hi
        X.append(reach)
    return X


def _check_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return eps


def greedy_eps_approx(f: ConcavePL, eps) -> PolygonApprox:
    eps = _check_eps(eps)
    return _make(f, _greedy_points(f, eps), "greedy", eps)


def ceil_log2(v) -> int:
    """``ceil(log2 v)`` for rational ``v >= 1`` via the bit length of ``ceil(v) - 1``."""
    v = Fraction(v)
    if v < 1:
        return 0
    c = -(-v.numerator // v.denominator)
    return (c - 1).bit_length()


def _check_hybrid_pre(f: ConcavePL) -> None:
    if f.lo != 0 or f(0) != 0:
        raise ValueError("dyadic scheme needs f(0) = 0 on a domain starting at 0")
    if f.right_derivative(0) > 1:
        raise ValueError("dyadic scheme needs f+(0) <= 1")
    if f.left_derivative(f.hi) < 0:
        raise ValueError("dyadic scheme needs f-(v_max) >= 0")


def dyadic_intervals(v) -> list:
    """``[(a, b, relative)]``: ``I_0`` uses the additive budget, the rest the relative one."""
    v = Fraction(v)
    c = ceil_log2(v)
    out = [(Fraction(0), v / 2 ** c, False)]
    for i in range(c, 0, -1):
        out.append((v / 2 ** i, v / 2 ** (i - 1), True))
    return out


def dyadic_hybrid_approx(f: ConcavePL, eps) -> PolygonApprox:
    eps = _check_eps(eps)
    _check_hybrid_pre(f)
    fv = f(f.hi)
    X = set()
    for a, b, relative in dyadic_intervals(f.hi):
        if a == b:
            continue
        X.update(_greedy_points(f.restrict(a, b), eps * fv if relative else eps))
    return _make(f, X, "dyadic", eps * (1 + fv))


def level_set_approx(f: ConcavePL, eps) -> PolygonApprox:
    eps = _check_eps(eps)
    if any(s < 0 for s in f.slopes):
        raise ValueError("level-set scheme needs a non-decreasing f")
    fv, f0 = f(f.hi), f(f.lo)
    if f0 != 0:
        raise ValueError("level-set scheme needs f(0) = 0")
    X = {f.lo, f.hi}
    for i in range(int(1 / eps) + 1):
        X.add(_first_reaching(f, i * eps * fv))
    return _make(f, X, "level", eps * fv)


def _first_reaching(f: ConcavePL, level: Fraction) -> Fraction:
    """``min{x : f(x) >= level}`` for non-decreasing f with ``level <= f(hi)``."""
    bp = f.breakpoints
    if bp[0][1] >= level:
        return bp[0][0]
    for (ax, ay), (bx, by) in zip(bp, bp[1:]):
        if by >= level:
            return ax + (level - ay) * (bx - ax) / (by - ay)
    raise ValueError("level above the range of f")


def hybrid_best(f: ConcavePL, eps) -> PolygonApprox:
    """The smaller of the dyadic and level-set schemes; ties go to dyadic."""
    d = dyadic_hybrid_approx(f, eps)
    lv = level_set_approx(f, eps)
    best = lv if len(lv) < len(d) else d
    return PolygonApprox(best.f, best.X, best.certified_error, best.scheme, Fraction(eps) * (1 + f(f.hi)))


def approximate(f: ConcavePL, eps, scheme: str = "best") -> PolygonApprox:
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    return {
        "greedy": greedy_eps_approx,
        "dyadic": dyadic_hybrid_approx,
        "level": level_set_approx,
        "best": hybrid_best,
    }[scheme](f, eps)


# --- budgets --------------------------------------------------------------


def _dec(x) -> Decimal:
    x = Fraction(x)
    return Decimal(x.numerator) / Decimal(x.denominator)


def greedy_budget(f: ConcavePL, eps) -> Decimal:
    """``3 + sqrt(9 L D / (8 eps))`` with L the domain length and D the total slope drop."""
    with localcontext() as ctx:
        ctx.prec = 50
        L = f.hi - f.lo
        D = f.right_derivative(f.lo) - f.left_derivative(f.hi)
        return 3 + _dec(Fraction(9, 8) * L * D / Fraction(eps)).sqrt()


def dyadic_budget(v, eps) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = 50
        c = ceil_log2(v)
        eps = Fraction(eps)
        return 3 * (1 + c) + _dec(Fraction(9, 8) / eps).sqrt() + _dec(Fraction(18, 8) * c / eps).sqrt()


def level_budget(eps) -> int:
    return int(1 / Fraction(eps)) + 2


def scheme_budget(pa: PolygonApprox, eps) -> Decimal:
    if pa.scheme == "greedy":
        return greedy_budget(pa.f, eps)
    if pa.scheme == "dyadic":
        return dyadic_budget(pa.f.hi, eps)
    return Decimal(level_budget(eps))


# --- the logarithmically piecewise-linear family --------------------------


def lpl_knots(k: int) -> list:
    return [3 * (2 ** (i + 1) - 2) for i in range(k + 1)]


def lpl(k: int) -> ConcavePL:
    """Slope ``2^-i`` on ``[3(2^{i+1}-2), 3(2^{i+2}-2)]`` for i < k; value 6i at each knot."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return ConcavePL(tuple((x, 6 * i) for i, x in enumerate(lpl_knots(k))))


def lpl_interval(i: int) -> tuple:
    m = 3 * (2 ** i - 2)
    return (m - 2 ** i, m + 2 ** i)


def lpl_interval_cover_check(X: Iterable, k: int) -> list[str]:
    """Names of the intervals ``I_2..I_k`` whose interior holds no point of X."""
    pts = sorted(Fraction(x) for x in X)
    missing = []
    for i in range(2, k + 1):
        a, b = lpl_interval(i)
        j = bisect_right(pts, a)
        if not (j < len(pts) and pts[j] < b):
            missing.append(f"missing interval {i}")
    return missing


# --- tangent stitching and the derivative-sum inequality ------------------


def tangent_stitch(f: ConcavePL, X: Iterable) -> ConcavePL:
    """Lower envelope of the one-sided tangents of f at each point of X."""
    pts = sorted({Fraction(x) for x in X})
    if not pts or pts[0] < f.lo or pts[-1] > f.hi:
        raise ValueError("X must lie inside the domain of f")
    lines = {}
    for x in pts:
        y = f(x)
        for s in (f.left_derivative(x), f.right_derivative(x)):
            c = y - s * x
            if s not in lines or c < lines[s]:
                lines[s] = c
    # min of lines: active slope decreases left to right
    ordered = sorted(lines.items(), key=lambda t: -t[0])
    stack: list = []
    for s, c in ordered:
        while stack:
            s1, c1 = stack[-1]
            if len(stack) >= 2:
                s0, c0 = stack[-2]
                # (s1, c1) is useless if the new line undercuts it before it beats (s0, c0)
                if (c - c0) * (s0 - s1) <= (c1 - c0) * (s0 - s):
                    stack.pop()
                    continue
            break
        stack.append((s, c))
    lo, hi = f.lo, f.hi
    xs = [lo]
    for (s0, c0), (s1, c1) in zip(stack, stack[1:]):
        x = (c1 - c0) / (s0 - s1)
        if lo < x < hi:
            xs.append(x)
    xs.append(hi)

    def g(x):
        return min(s * x + c for s, c in stack)

    return ConcavePL(tuple((x, g(x)) for x in sorted(set(xs))))


def derivative_sum_bound(f: ConcavePL) -> tuple[Fraction, Fraction]:
    """``(f(v), sum_i f+(v/2^i) v/2^{i+1})`` for i = 0..ceil(log2 v); the i = 0 term uses f-(v)."""
    if f.lo != 0:
        raise ValueError("domain must start at 0")
    if f(0) < 0:
        raise ValueError("f must be nonnegative")
    v = f.hi
    if f.left_derivative(v) < 0:
        raise ValueError("need f-(v_max) >= 0")
    rhs = f.left_derivative(v) * v / 2
    for i in range(1, ceil_log2(v) + 1):
        rhs += f.right_derivative(v / 2 ** i) * v / 2 ** (i + 1)
    return f(v), rhs
