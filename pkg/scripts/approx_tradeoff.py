"""Revenue ratio versus menu complexity of the approximate mechanism across eps and schemes."""
import argparse
import csv
import sys
from fractions import Fraction

from fedex_menus import hard_instances as hi
from fedex_menus.approx import approximate_mechanism
from fedex_menus.curves import build_curve_stack
from fedex_menus.mechanism import fiat_optimal, menu_complexity
from fedex_menus.polygon import SCHEMES

EPSILONS = ["1/2", "1/4", "1/10", "1/20", "1/50", "1/100"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lba", type=int, default=8)
    ap.add_argument("--exp", type=int, default=6)
    args = ap.parse_args()
    out = csv.writer(sys.stdout)
    out.writerow(["instance", "scheme", "eps", "ratio", "complexity", "sum_k", "optimal_complexity"])
    cases = [(f"lba{args.lba}", hi.lba_instance(args.lba)), (f"pexp{args.exp}", hi.perturbed_exponential(args.exp))]
    for name, inst in cases:
        stack = build_curve_stack(inst)
        opt_c = menu_complexity(fiat_optimal(stack))[1]
        for scheme in SCHEMES:
            for eps in EPSILONS:
                _, rep = approximate_mechanism(inst, stack, Fraction(eps), scheme)
                out.writerow([name, scheme, eps, f"{float(rep.ratio):.6f}", rep.complexity, rep.sum_k, opt_c])


if __name__ == "__main__":
    main()
