"""Incentive-compatibility checks, revenue accounting and the exact LP oracle."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import simplex
from .curves import CurveStack
from .instance import FedexInstance, Number
from .mechanism import Mechanism

FAMILIES = ("Leftwards IC", "Rightwards IC", "Downwards IC", "Feasibility", "Individual Rationality")

# Tiny instances only; 72 admits the perturbed four-day bit-sequence instance.
LP_MAX_TYPES_PER_FAMILY = 72


@dataclass(frozen=True)
class AssignedMechanism:
    """``pi[i-1][v]`` and ``pay[i-1][v]`` for every type ``(v, i)`` on the grid."""

    pi: tuple
    pay: tuple
    grid_step: Number = 1
    mode: str = "exact"

    @property
    def n(self) -> int:
        return len(self.pi)

    @property
    def v_max(self) -> int:
        return len(self.pi[0]) - 1

    def utility(self, v: int, i: int, as_v: int | None = None, as_i: int | None = None) -> Number:
        """Utility of true type (v, i) when reporting (as_v, as_i)."""
        rv = v if as_v is None else as_v
        ri = i if as_i is None else as_i
        return self.pi[ri - 1][rv] * v * self.grid_step - self.pay[ri - 1][rv]


@dataclass
class ICReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def assign_types(mech: Mechanism) -> AssignedMechanism:
    """Each type picks its favourite option of its own day's menu; ties go to higher pi."""
    step = mech.grid_step
    zero = Fraction(0) if not isinstance(step, float) else 0.0
    pis, pays = [], []
    for i in range(1, mech.n + 1):
        opts = [(zero, zero)] + list(mech.menu(i).options)
        row_pi, row_pay = [], []
        for v in range(mech.v_max + 1):
            x = v * step
            best = None
            for pi, pay in opts:
                u = pi * x - pay
                if best is None or u > best[0] or (u == best[0] and pi > best[1]):
                    best = (u, pi, pay)
            row_pi.append(best[1])
            row_pay.append(best[2])
        pis.append(tuple(row_pi))
        pays.append(tuple(row_pay))
    mode = "float" if isinstance(step, float) else "exact"
    return AssignedMechanism(tuple(pis), tuple(pays), step, mode)


def check_ic(am: AssignedMechanism) -> ICReport:
    tol = 1e-9 if am.mode == "float" else 0
    rep = ICReport()
    n, V = am.n, am.v_max

    def need(family, v, i, slack):
        if slack < -tol:
            rep.violations.append((family, v, i, slack))

    for i in range(1, n + 1):
        for v in range(V + 1):
            u = am.utility(v, i)
            if v >= 1:
                need("Leftwards IC", v, i, u - am.utility(v, i, as_v=v - 1))
            if v < V:
                need("Rightwards IC", v, i, u - am.utility(v, i, as_v=v + 1))
            if i > 1:
                need("Downwards IC", v, i, u - am.utility(v, i, as_i=i - 1))
            need("Feasibility", v, i, 1 - am.pi[i - 1][v])
    # the lowest type anchors utility; IC then propagates u >= 0 everywhere
    need("Individual Rationality", 0, 1, am.utility(0, 1))
    return rep


def revenue_direct(am: AssignedMechanism, inst: FedexInstance) -> Number:
    total = 0
    for i in inst.days:
        qi, row = inst.q[i - 1], inst.pmf[i - 1]
        total += qi * sum((row[v] * am.pay[i - 1][v] for v in range(inst.v_max + 1)), 0)
    return total


def revenue_by_curves(mech: Mechanism, stack: CurveStack) -> Number:
    """``sum_j a_1(j) R_{>=1}(p_j)``; valid when days 2..n price optimally."""
    curve = stack.geq(1)
    return sum((m * curve[p] for p, m in mech.day(1).atoms), 0)


def revenue_per_day(mech: Mechanism, stack: CurveStack) -> list:
    """``sum_j a_i(j) R_i(p_j)`` for each day; sums to the direct revenue."""
    out = []
    for i in range(1, mech.n + 1):
        curve = stack.R(i)
        out.append(sum((m * curve[p] for p, m in mech.day(i).atoms), 0))
    return out


# --- LP oracle ------------------------------------------------------------


@dataclass
class LpModel:
    """LP1 written in utility variables ``u = pi*v - pay`` so every variable is >= 0.

    Columns: ``pi(v,i)`` then ``u(v,i)`` for all types except the fixed
    anchor ``(0, 1)``.  Rows are ``<=`` constraints tagged with their family.
    """

    inst: FedexInstance
    columns: list
    rows: list
    rhs: list
    families: list
    objective: list

    @property
    def n_constraints(self) -> int:
        return len(self.rows)


def build_lp(inst: FedexInstance) -> LpModel:
    if inst.mode != "exact":
        raise ValueError("the LP oracle runs on exact instances only")
    n, V = inst.n, inst.v_max
    if n * (V + 1) > LP_MAX_TYPES_PER_FAMILY:
        raise ValueError(f"instance too large for the LP oracle ({n * (V + 1)} types per family)")
    columns, index = [], {}
    for kind in ("pi", "u"):
        for i in range(1, n + 1):
            for v in range(V + 1):
                if (v, i) == (0, 1):
                    continue
                index[(kind, v, i)] = len(columns)
                columns.append((kind, v, i))

    def term(row, kind, v, i, coef):
        j = index.get((kind, v, i))
        if j is not None:  # the anchor type is fixed at zero
            row[j] = row.get(j, 0) + coef

    rows, rhs, fams = [], [], []

    def add(fam, terms, b=0):
        row = {}
        for kind, v, i, coef in terms:
            term(row, kind, v, i, Fraction(coef))
        rows.append({j: a for j, a in row.items() if a != 0})
        rhs.append(Fraction(b))
        fams.append(fam)

    for i in range(1, n + 1):
        for v in range(V + 1):
            if v >= 1:
                # u(v,i) >= u(v-1,i) + pi(v-1,i)
                add("Leftwards IC", [("u", v - 1, i, 1), ("pi", v - 1, i, 1), ("u", v, i, -1)])
            if v < V:
                # u(v,i) >= u(v+1,i) - pi(v+1,i)
                add("Rightwards IC", [("u", v + 1, i, 1), ("pi", v + 1, i, -1), ("u", v, i, -1)])
            if i > 1:
                add("Downwards IC", [("u", v, i - 1, 1), ("u", v, i, -1)])
            if (v, i) != (0, 1):
                add("Feasibility", [("pi", v, i, 1)], 1)
    obj = [Fraction(0)] * len(columns)
    for (kind, v, i), j in index.items():
        w = inst.q[i - 1] * inst.pmf[i - 1][v]
        obj[j] = w * v if kind == "pi" else -w
    return LpModel(inst, columns, rows, rhs, fams, obj)


def lp_solve(inst: FedexInstance) -> tuple[Fraction, AssignedMechanism]:
    """Exact optimum of LP1 and a mechanism attaining it."""
    model = build_lp(inst)
    try:
        res = simplex.solve_max(model.objective, model.rows, model.rhs)
    except simplex.Unbounded as exc:  # pragma: no cover - IC and pi <= 1 bound the LP
        raise simplex.LPError("LP1 reported unbounded; this is an internal error") from exc
    problems = simplex.certify(model.objective, model.rows, model.rhs, res)
    if problems:
        raise simplex.LPError("optimality certificate failed: " + "; ".join(problems))
    n, V = inst.n, inst.v_max
    pi = [[Fraction(0)] * (V + 1) for _ in range(n)]
    u = [[Fraction(0)] * (V + 1) for _ in range(n)]
    for j, (kind, v, i) in enumerate(model.columns):
        (pi if kind == "pi" else u)[i - 1][v] = res.x[j]
    pay = [[pi[i][v] * v - u[i][v] for v in range(V + 1)] for i in range(n)]
    # payments of zero-probability types carry no weight and are left unchecked
    neg = [(v, i + 1) for i in range(n) for v in range(V + 1) if pay[i][v] < 0 and inst.q[i] * inst.pmf[i][v] > 0]
    if neg:
        raise simplex.LPError(f"negative payment at types {neg[:5]}")
    am = AssignedMechanism(tuple(map(tuple, pi)), tuple(map(tuple, pay)))
    return res.value, am


# --- structural checks on the hard instance --------------------------------


def density_floor_check(mech: Mechanism, inst: FedexInstance, n: int | None = None) -> list:
    """Allocation density on ``[n+2, n+n/4]`` must be at least ``1/(300n)`` for days in [n/4, n/2)."""
    n = inst.n if n is None else n
    floor = Fraction(1, 300 * n)
    bad = []
    for i in range(1, n + 1):
        if not (Fraction(n, 4) <= i < Fraction(n, 2)):
            continue
        dens = mech.allocation(i).density
        for j in range(n + 2, n + n // 4 + 1):
            if dens[j] < floor:
                bad.append((i, j, dens[j]))
    return bad
