"""Optimal and approximately optimal menus for the single-bidder FedEx problem."""
from .approx import approximate_mechanism, augment_anchors, downward_ic_audit, snap_day
from .curves import build_curve_stack, evaluate_envelope, iron, virtual_value
from .hard_instances import exponential_instance, lba_instance, perturbed_exponential, regular_three_day
from .instance import FedexInstance, read_instance, validate, write_instance
from .mechanism import fiat_optimal, menu_complexity
from .polygon import ConcavePL, dyadic_hybrid_approx, greedy_eps_approx, hybrid_best, level_set_approx, lpl
from .verify import assign_types, check_ic, lp_solve, revenue_by_curves, revenue_direct

__version__ = "0.1.0"
