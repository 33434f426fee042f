"""Point counts of each scheme on LPL_k at error 1/2, against the k-1 lower bound."""
import argparse
from fractions import Fraction

from fedex_menus.polygon import (
    dyadic_hybrid_approx,
    greedy_eps_approx,
    level_set_approx,
    lpl,
    lpl_interval_cover_check,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[4, 6, 8, 10, 12, 16, 20])
    args = ap.parse_args()
    half = Fraction(1, 2)
    print(f"{'k':>3} {'k-1':>4} {'greedy':>7} {'dyadic':>7} {'level':>7}  cover")
    for k in args.k:
        f = lpl(k)
        fv = f(f.hi)
        g = greedy_eps_approx(f, half)
        d = dyadic_hybrid_approx(f, half / (1 + fv))
        lv = level_set_approx(f, half / fv)
        cover = "ok" if not any(lpl_interval_cover_check(pa.X, k) for pa in (g, d, lv)) else "missing"
        print(f"{k:>3} {k - 1:>4} {g.size:>7} {d.size:>7} {lv.size:>7}  {cover}")


if __name__ == "__main__":
    main()
