"""Optimal menus on the quadratic lower-bound instance, checked against the closed forms."""
import argparse

from fedex_menus.curves import build_curve_stack
from fedex_menus.hard_instances import LbaParams, lba_closed_R, lba_closed_Rtilde, lba_instance
from fedex_menus.mechanism import fiat_optimal, is_clean, menu_complexity
from fedex_menus.verify import density_floor_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[4, 8, 12, 16])
    args = ap.parse_args()
    for n in args.n:
        p = LbaParams(n)
        stack = build_curve_stack(lba_instance(n))
        mech = fiat_optimal(stack)
        closed = all(
            stack.geq(i)[x] * n == lba_closed_R(p, i, x) and stack.ironed(i).envelope_values[x] * n == lba_closed_Rtilde(p, i, x)
            for i in range(1, n + 1)
            for x in range(5 * n + 1)
        )
        total = menu_complexity(mech)[1]
        print(
            f"n={n:>2} OPT*n={stack.opt() * n} total={total} (n(n+1)/2={n * (n + 1) // 2}) "
            f"closed_forms={'ok' if closed else 'MISMATCH'} clean={is_clean(mech, lba_instance(n))} "
            f"density_floor={'ok' if not density_floor_check(mech, lba_instance(n)) else 'violated'}"
        )
        print(f"      day {n} prices: {mech.day(n).prices}")


if __name__ == "__main__":
    main()
