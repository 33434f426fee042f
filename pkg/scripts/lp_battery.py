"""Exact LP optimum versus the constructed mechanism on a seeded random battery."""
import argparse
import time

from fedex_menus.curves import build_curve_stack
from fedex_menus.hard_instances import random_battery
from fedex_menus.mechanism import fiat_optimal
from fedex_menus.verify import assign_types, check_ic, lp_solve, revenue_direct


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--max-v", type=int, default=8)
    args = ap.parse_args()
    t0 = time.perf_counter()
    bad = 0
    for k, inst in enumerate(random_battery(args.seed, args.count, args.max_n, args.max_v)):
        am = assign_types(fiat_optimal(build_curve_stack(inst)))
        value, lp_am = lp_solve(inst)
        gap = value - revenue_direct(am, inst)
        if gap != 0 or not check_ic(am).ok or not check_ic(lp_am).ok:
            bad += 1
            print(f"instance {k}: gap {gap}")
    print(f"{args.count} instances, {bad} mismatches, {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
