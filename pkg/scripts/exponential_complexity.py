"""Per-day menu complexity of the optimal mechanism on the bit-sequence instances."""
import argparse
import time

from fedex_menus import hard_instances as hi
from fedex_menus.curves import build_curve_stack
from fedex_menus.mechanism import fiat_optimal, menu_complexity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=7)
    args = ap.parse_args()
    print(f"{'n':>2} {'variant':>9} {'total':>6} {'2^n-1':>6} {'secs':>6}  per-day")
    for n in range(2, args.max_n + 1):
        for name, gen in (("plain", hi.exponential_instance), ("perturbed", hi.perturbed_exponential)):
            t0 = time.perf_counter()
            per_day, total = menu_complexity(fiat_optimal(build_curve_stack(gen(n))))
            dt = time.perf_counter() - t0
            print(f"{n:>2} {name:>9} {total:>6} {2 ** n - 1:>6} {dt:>6.2f}  {per_day}")


if __name__ == "__main__":
    main()
