"""The three-day example with exponential marginals whose optimum must randomize."""
import argparse

from fedex_menus.curves import build_curve_stack
from fedex_menus.hard_instances import regular_three_day
from fedex_menus.mechanism import fiat_optimal


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=float, nargs="+", default=[0.05, 0.02, 0.01, 0.005])
    ap.add_argument("--cap", type=float, default=15.0)
    args = ap.parse_args()
    for step in args.grid:
        inst = regular_three_day(step, args.cap)
        stack = build_curve_stack(inst)
        mech = fiat_optimal(stack)
        iv = stack.ironed(2).interval_containing(stack.r(1))
        ivs = f"[{iv[0] * step:.3f}, {iv[1] * step:.3f}]" if iv else "none"
        day2 = ", ".join(f"{p * step:.2f}:{m:.3f}" for p, m in mech.day(2).atoms)
        print(
            f"grid={step:<6} r1={stack.r(1) * step:.3f} r2={stack.r(2) * step:.3f} r3={stack.r(3) * step:.3f} "
            f"ironed={ivs} day2 atoms {day2}"
        )


if __name__ == "__main__":
    main()
