"""Command-line front end: ``fedex-menus <subcommand> ...``.

JSON goes to stdout, diagnostics to stderr.  Exit status is 0 on success,
1 when a check fails and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import hard_instances as hi
from . import polygon
from .approx import approximate_mechanism
from .curves import build_curve_stack
from .instance import InstanceError, format_rat, instance_from_dict, instance_to_dict
from .mechanism import Mechanism, PriceMass, fiat_optimal, menu_complexity
from .simplex import LPError
from .verify import (
    LP_MAX_TYPES_PER_FAMILY,
    assign_types,
    check_ic,
    lp_solve,
    revenue_by_curves,
    revenue_direct,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _num(x):
    return format_rat(x) if isinstance(x, (Fraction, int)) else float(x)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from exc


def _load_instance(data):
    """Accept a bare instance or any document embedding one under ``instance``."""
    if isinstance(data, dict) and "instance" in data:
        data = data["instance"]
    try:
        return instance_from_dict(data)
    except InstanceError as exc:
        raise UsageError(str(exc)) from exc


def mechanism_to_dict(mech: Mechanism) -> list:
    out = []
    for i in range(1, mech.n + 1):
        out.append(
            {
                "atoms": [[_num(p), _num(m)] for p, m in mech.day(i).atoms],
                "menu": [[_num(a), _num(b)] for a, b in mech.menu(i).options],
            }
        )
    return out


def mechanism_from_dict(days: list, v_max: int, step) -> Mechanism:
    pms = []
    for d in days:
        atoms = []
        for p, m in d["atoms"]:
            p = Fraction(p) if isinstance(p, str) else p
            m = Fraction(m) if isinstance(m, str) else m
            atoms.append((int(p) if p == int(p) else p, m))
        pms.append(PriceMass(tuple(atoms)))
    return Mechanism(tuple(pms), v_max, step)


# --- subcommands ------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.family == "exponential":
        inst = (hi.perturbed_exponential if args.perturbed else hi.exponential_instance)(args.n)
    elif args.family == "lba":
        inst = hi.lba_instance(args.n)
    elif args.family == "regular3":
        inst = hi.regular_three_day(args.grid, args.cap)
    else:
        import random

        inst = hi.random_instance(random.Random(args.seed), args.n, args.vmax)
    print(_dump(instance_to_dict(inst)))
    return EXIT_OK


def _solve_doc(inst):
    stack = build_curve_stack(inst)
    mech = fiat_optimal(stack)
    per_day, total = menu_complexity(mech)
    return stack, mech, {
        "instance": instance_to_dict(inst),
        "mode": inst.mode,
        "days": mechanism_to_dict(mech),
        "menu_complexity": {"per_day": per_day, "total": total},
        "r_geq": [stack.r(i) for i in range(1, inst.n + 1)],
        "revenue": _num(stack.opt()),
    }


def _table(mech: Mechanism) -> str:
    lines = ["day  atoms  prices"]
    step = mech.grid_step
    for i in range(1, mech.n + 1):
        prices = ", ".join(
            format_rat(p * step) if not isinstance(step, float) else f"{p * step:g}" for p in mech.day(i).prices
        )
        lines.append(f"{i:>3}  {len(mech.day(i)):>5}  {prices}")
    return "\n".join(lines)


def cmd_solve(args) -> int:
    inst = _load_instance(_read_json(args.input))
    _, mech, doc = _solve_doc(inst)
    print(_dump(doc))
    print(_table(mech), file=sys.stderr)
    return EXIT_OK


def _verify_one(inst, mech, stack, use_lp: bool) -> dict:
    am = assign_types(mech)
    ic = check_ic(am)
    direct = revenue_direct(am, inst)
    by_curves = revenue_by_curves(mech, stack)
    res = {
        "mode": inst.mode,
        "ic_ok": ic.ok,
        "ic_violations": [[f, v, i, _num(s)] for f, v, i, s in ic.violations[:20]],
        "revenue_direct": _num(direct),
        "revenue_by_curves": _num(by_curves),
        "accounting_ok": direct == by_curves if inst.mode == "exact" else abs(direct - by_curves) < 1e-9,
    }
    ok = res["ic_ok"] and res["accounting_ok"]
    if use_lp:
        if inst.mode != "exact" or inst.n * (inst.v_max + 1) > LP_MAX_TYPES_PER_FAMILY:
            res["lp"] = "skipped (size or mode)"
        else:
            value, lp_mech = lp_solve(inst)
            gap = value - direct
            res["lp_value"] = _num(value)
            res["lp_gap"] = _num(gap)
            res["lp_mechanism_ic_ok"] = check_ic(lp_mech).ok
            ok = ok and gap == 0 and res["lp_mechanism_ic_ok"]
    res["ok"] = ok
    return res


def cmd_verify(args) -> int:
    if args.battery:
        return _verify_battery(args)
    data = _read_json(args.input)
    inst = _load_instance(data)
    stack = build_curve_stack(inst)
    if isinstance(data, dict) and "days" in data:
        mech = mechanism_from_dict(data["days"], inst.v_max, inst.grid_step)
    elif args.mechanism:
        mech = mechanism_from_dict(_read_json(args.mechanism)["days"], inst.v_max, inst.grid_step)
    else:
        mech = fiat_optimal(stack)
    res = _verify_one(inst, mech, stack, args.lp)
    print(_dump(res))
    return EXIT_OK if res["ok"] else EXIT_FAIL


def _verify_battery(args) -> int:
    insts = hi.random_battery(args.seed, args.battery, args.max_n, args.max_v)

    def trial(inst):
        stack = build_curve_stack(inst)
        return _verify_one(inst, fiat_optimal(stack), stack, True)

    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(trial, insts))
    failures = [k for k, r in enumerate(results) if not r["ok"]]
    doc = {
        "mode": "exact",
        "seed": args.seed,
        "trials": len(results),
        "failures": failures,
        "max_lp_gap": "0" if not failures else "nonzero",
    }
    print(_dump(doc))
    print(f"battery: {len(results)} trials, {len(failures)} failures, {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return EXIT_OK if not failures else EXIT_FAIL


def _report_doc(rep) -> dict:
    return {
        "mode": "exact",
        "eps": _num(rep.eps),
        "eps_prime": _num(rep.eps_prime),
        "branch": rep.branch,
        "opt": _num(rep.opt),
        "revenue": _num(rep.revenue),
        "ratio": _num(rep.ratio),
        "ratio_float": float(rep.ratio),
        "meets_guarantee": rep.meets_guarantee,
        "ic_ok": rep.ic_ok,
        "audit_ok": rep.audit_ok,
        "menu_complexity": rep.complexity,
        "sum_k": rep.sum_k,
        "days": [
            {
                "day": d.day,
                "eps_i": _num(d.eps_i),
                "scheme": d.scheme,
                "k": d.k,
                "anchors": d.anchors,
                "atoms": d.atoms,
                "certified_error": _num(d.certified_error),
                "loss": _num(d.loss),
                "budget": round(d.budget, 6),
            }
            for d in rep.days
        ],
    }


def cmd_approx(args) -> int:
    inst = _load_instance(_read_json(args.input))
    stack = build_curve_stack(inst)
    mech, rep = approximate_mechanism(inst, stack, _frac_arg(args.eps), args.scheme)
    doc = {
        "instance": instance_to_dict(inst),
        "mode": inst.mode,
        "days": mechanism_to_dict(mech),
        "report": _report_doc(rep),
    }
    print(_dump(doc))
    ok = rep.meets_guarantee and rep.ic_ok and rep.audit_ok
    return EXIT_OK if ok else EXIT_FAIL


def _frac_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def cmd_polygon(args) -> int:
    k = None
    if args.gen:
        name, _, param = args.gen.partition(":")
        if name != "lpl" or not param.isdigit():
            raise UsageError("--gen expects lpl:<k>")
        k = int(param)
        f = polygon.lpl(k)
    elif args.input:
        try:
            text = sys.stdin.read() if args.input == "-" else open(args.input, encoding="utf-8").read()
            f = polygon.ConcavePL.from_csv(text)
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
    else:
        raise UsageError("polygon needs --gen or an input CSV")
    eps = _frac_arg(args.eps)
    try:
        pa = polygon.approximate(f, eps, args.scheme)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    budget = polygon.scheme_budget(pa, eps)
    doc = {
        "mode": "exact",
        "scheme": pa.scheme,
        "eps": _num(eps),
        "X": [_num(x) for x in pa.X],
        "size": len(pa),
        "certified_error": _num(pa.certified_error),
        "bound": _num(pa.bound),
        "budget": float(budget),
    }
    ok = pa.certified_error <= pa.bound and len(pa.collapsed()) <= budget
    if k is not None:
        missing = polygon.lpl_interval_cover_check(pa.X, k)
        doc["interval_cover"] = missing or "ok"
        if pa.certified_error <= Fraction(1, 2):
            ok = ok and not missing and len(pa) >= k - 1
    print(_dump(doc))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_curves(args) -> int:
    inst = _load_instance(_read_json(args.input))
    stack = build_curve_stack(inst)
    out = sys.stdout
    out.write("day,v,R_i,R_i_float,R_geq,R_geq_float,R_tilde_geq,R_tilde_geq_float\n")
    for i in range(1, inst.n + 1):
        R, G, T = stack.R(i), stack.geq(i), stack.ironed(i).envelope_values
        for v in range(inst.v_max + 1):
            row = [i, v]
            for val in (R[v], G[v], T[v]):
                row += [_num(val), repr(float(val))]
            out.write(",".join(str(c) for c in row) + "\n")
    return EXIT_OK


def cmd_report(args) -> int:
    inst = _load_instance(_read_json(args.input))
    t0 = time.perf_counter()
    stack, mech, doc = _solve_doc(inst)
    t_solve = time.perf_counter() - t0
    ver = _verify_one(inst, mech, stack, use_lp=args.lp)
    t_verify = time.perf_counter() - t0 - t_solve
    report = {
        "mode": inst.mode,
        "instance": {"name": inst.name, "n": inst.n, "v_max": inst.v_max, "mode": inst.mode},
        "mechanism": {"mode": inst.mode, **doc["menu_complexity"]},
        "revenue": {k: v for k, v in ver.items() if k.startswith(("revenue", "lp_"))} | {"mode": inst.mode},
        "checks": {"ic_ok": ver["ic_ok"], "accounting_ok": ver["accounting_ok"], "ok": ver["ok"]},
    }
    ok = ver["ok"]
    if args.eps is not None:
        if inst.mode != "exact":
            raise UsageError("--eps needs an exact instance")
        _, rep = approximate_mechanism(inst, stack, _frac_arg(args.eps), args.scheme)
        report["approximation"] = _report_doc(rep)
        ok = ok and rep.meets_guarantee and rep.ic_ok
    report["timings"] = {"solve_s": round(t_solve, 4), "verify_s": round(t_verify, 4)}
    print(_dump(report))
    return EXIT_OK if ok else EXIT_FAIL


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fedex-menus", description="Optimal and approximate FedEx menus.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("family", choices=("exponential", "lba", "regular3", "random"))
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--perturbed", action="store_true")
    g.add_argument("--grid", type=float, default=0.01)
    g.add_argument("--cap", type=float, default=15.0)
    g.add_argument("--vmax", type=int, default=6)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="revenue-optimal mechanism")
    s.add_argument("input", nargs="?", default="-")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("approx", help="approximately optimal mechanism")
    a.add_argument("input", nargs="?", default="-")
    a.add_argument("--eps", required=True)
    a.add_argument("--scheme", choices=polygon.SCHEMES, default="best")
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_approx)

    v = sub.add_parser("verify", help="IC, revenue accounting and LP checks")
    v.add_argument("input", nargs="?", default="-")
    v.add_argument("--mechanism", help="mechanism JSON when the input holds only an instance")
    v.add_argument("--lp", action="store_true", help="compare against the exact LP optimum")
    v.add_argument("--battery", type=int, default=0, help="run N random instances instead")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threads", type=int, default=4)
    v.add_argument("--max-n", type=int, default=3)
    v.add_argument("--max-v", type=int, default=8)
    v.set_defaults(func=cmd_verify)

    pg = sub.add_parser("polygon", help="polygon approximation of a concave curve")
    pg.add_argument("input", nargs="?", default=None, help="CSV of x,y points (hulled on load)")
    pg.add_argument("--gen", help="named generator, e.g. lpl:6")
    pg.add_argument("--eps", required=True)
    pg.add_argument("--scheme", choices=polygon.SCHEMES, default="greedy")
    pg.add_argument("--seed", type=int, default=0)
    pg.set_defaults(func=cmd_polygon)

    c = sub.add_parser("curves", help="per-day revenue curves as CSV")
    c.add_argument("input", nargs="?", default="-")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_curves)

    r = sub.add_parser("report", help="solve, verify and optionally approximate")
    r.add_argument("input", nargs="?", default="-")
    r.add_argument("--lp", action="store_true")
    r.add_argument("--eps")
    r.add_argument("--scheme", choices=polygon.SCHEMES, default="best")
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
        sys.stdout.flush()
        return code
    except (UsageError, InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LPError as exc:
        print(f"LP failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
