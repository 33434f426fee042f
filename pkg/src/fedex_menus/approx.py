"""Low-complexity approximately optimal mechanisms from polygon approximations."""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import polygon
from .curves import CurveStack, IronedCurve
from .instance import FedexInstance
from .mechanism import Mechanism, PriceMass, push_forward
from .verify import assign_types, check_ic, revenue_direct


@dataclass(frozen=True)
class AnchorSet:
    """Augmented points of one day; every point touches the base curve."""

    points: tuple
    provenance: dict = field(default_factory=dict, compare=False)

    def bracket(self, p) -> tuple:
        """Nearest anchors ``(under, over)`` with ``under <= p <= over``."""
        pts = self.points
        k = bisect_right(pts, p) - 1
        if k >= 0 and pts[k] == p:
            return p, p
        if k < 0 or k + 1 >= len(pts):
            raise ValueError(f"price {p} outside the anchor range [{pts[0]}, {pts[-1]}]")
        return pts[k], pts[k + 1]


def augment_anchors(ic: IronedCurve, X: Iterable) -> AnchorSet:
    """Replace each point by the touch points bracketing the envelope piece it lies on."""
    touch = ic.hull_vertices
    prov = {}
    out = set()
    for x in X:
        x = Fraction(x)
        k = bisect_left(touch, x)
        if k < len(touch) and touch[k] == x:
            pair = (int(x), int(x))
        else:
            if k == 0 or k == len(touch):
                raise ValueError(f"point {x} outside the curve's domain")
            pair = (touch[k - 1], touch[k])
        prov[x] = pair
        out.update(pair)
    return AnchorSet(tuple(sorted(out)), prov)


def snap_day(pm: PriceMass, anchors: AnchorSet) -> PriceMass:
    """Split every atom onto its bracketing anchors, preserving the mean price."""
    out = []
    for p, m in pm.atoms:
        under, over = anchors.bracket(p)
        if under == over:
            out.append((p, m))
            continue
        lam = Fraction(over - p, over - under)
        out.append((under, m * lam))
        out.append((over, m * (1 - lam)))
    return PriceMass.merged(out)


def downward_ic_audit(before: PriceMass, after: PriceMass, v_max: int) -> list:
    """Grid values whose utility drops from ``before`` to ``after``; empty means ok."""
    bad = []
    for x in range(v_max + 1):
        ub, ua = before.utility(x), after.utility(x)
        if ua < ub:
            bad.append((x, ub - ua))
    return bad


@dataclass
class DayReport:
    day: int
    eps_i: Fraction
    scheme: str
    k: int
    anchors: int
    atoms: int
    certified_error: Fraction
    loss: Fraction
    budget: float


@dataclass
class ApproxReport:
    eps: Fraction
    eps_prime: Fraction
    branch: str
    days: list
    opt: Fraction
    revenue: Fraction
    ic_ok: bool
    audit_ok: bool

    @property
    def ratio(self) -> Fraction:
        return self.revenue / self.opt if self.opt else Fraction(1)

    @property
    def complexity(self) -> int:
        return sum(d.atoms for d in self.days)

    @property
    def sum_k(self) -> int:
        return sum(d.k for d in self.days)

    @property
    def meets_guarantee(self) -> bool:
        return self.revenue >= (1 - self.eps) * self.opt


def approximate_mechanism(inst: FedexInstance, stack: CurveStack, eps, scheme: str = "best"):
    """Day 1 posts ``r_{>=1}``; each later day pushes the previous day forward and snaps.

    Returns ``(Mechanism, ApproxReport)``.  With ``OPT >= 1`` each day's curve is
    approximated to ``eps/(2n)`` under the hybrid guarantee; otherwise the
    level-set scheme runs with relative budget ``eps/n``.
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if inst.mode != "exact":
        raise ValueError("approximate mechanisms are built on exact instances")
    n, opt = inst.n, stack.opt()
    if opt >= 1:
        branch, eps_p = "hybrid", eps / (2 * n)
    else:
        branch, eps_p, scheme = "level-fallback", eps / n, "level"

    days = [PriceMass.point(stack.r(1))]
    reports = []
    audit_ok = True
    for i in range(1, n + 1):
        ic, r = stack.ironed(i), stack.r(i)
        top = ic.envelope_values[r]
        eps_i = eps_p * (1 + top) if branch == "hybrid" else eps_p * top
        if r == 0:
            pa, X = None, [Fraction(0)]
        else:
            f = polygon.ConcavePL.from_ironed(ic, r)
            pa = polygon.approximate(f, eps_p, scheme)
            X = pa.X
        anchors = augment_anchors(ic, X)
        if i > 1:
            pushed = push_forward(days[-1], ic, r)
            snapped = snap_day(pushed, anchors)
            if downward_ic_audit(pushed, snapped, inst.v_max):
                audit_ok = False
            days.append(snapped)
        cur = days[-1]
        loss = Fraction(0)
        if i > 1 and pa is not None:
            base = push_forward(days[-2], ic, r)
            loss = sum((m * ic.envelope_values[p] for p, m in base.atoms), Fraction(0)) - sum(
                (m * ic.envelope_values[p] for p, m in cur.atoms), Fraction(0)
            )
        reports.append(
            DayReport(
                day=i,
                eps_i=eps_i,
                scheme=pa.scheme if pa else "trivial",
                k=len(X),
                anchors=len(anchors.points),
                atoms=len(cur),
                certified_error=pa.certified_error if pa else Fraction(0),
                loss=loss,
                budget=float(polygon.scheme_budget(pa, eps_p)) if pa else 1.0,
            )
        )
    mech = Mechanism(tuple(days), inst.v_max, inst.grid_step)
    am = assign_types(mech)
    report = ApproxReport(
        eps=eps,
        eps_prime=eps_p,
        branch=branch,
        days=reports,
        opt=opt,
        revenue=revenue_direct(am, inst),
        ic_ok=check_ic(am).ok,
        audit_ok=audit_ok,
    )
    return mech, report
