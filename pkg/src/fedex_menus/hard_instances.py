"""Generators for the structured hard instances and their closed-form curves."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .instance import FedexInstance, InstanceError, check_valid, pmf_from_survival, uniform_q

PLAIN_EXP_CAP = 10
PERTURBED_EXP_CAP = 8


# --- revenue sequences -> distributions ----------------------------------


def dist_from_rev_sequence(r: Sequence, v: int) -> list:
    """pmf on ``{0..v}`` whose revenue curve ``x * Pr[X >= x]`` equals ``r[x-1]`` for x in 1..v.

    Uses ``F(x) = 1 - r_{x+1}/(x+1)`` with ``r_{v+1} = 0``.  Requires
    ``r_1 = 1`` and consecutive steps strictly below ``1/(2v)``.
    """
    if v < 1 or len(r) != v:
        raise InstanceError(f"need a sequence of length v={v}, got {len(r)}")
    r = [Fraction(x) for x in r]
    if r[0] != 1:
        raise InstanceError(f"r_1 must be 1, got {r[0]}")
    bound = Fraction(1, 2 * v)
    for k in range(v - 1):
        if abs(r[k + 1] - r[k]) >= bound:
            raise InstanceError(f"step at index {k + 1} is {r[k + 1] - r[k]}, must be below 1/(2v)")
    shifted = r + [Fraction(0)]  # shifted[x] = r_{x+1}
    cdf = [1 - shifted[x] / (x + 1) for x in range(v + 1)]
    return [cdf[0]] + [cdf[x] - cdf[x - 1] for x in range(1, v + 1)]


def bit(j: int, i: int) -> int:
    """The i-th least significant bit of j (1-indexed)."""
    return (j >> (i - 1)) & 1


def _in_dip(v: int, m: int) -> bool:
    """Interior of the level-``m`` ironed pattern ``[2^{m-1}(1+4k), 2^{m-1}(3+4k)]``."""
    h = 1 << (m - 1)
    return h < v % (4 * h) < 3 * h


def tent_sequence(v: int, peak: int, eps: Fraction) -> list:
    """Rises by eps up to ``peak`` and falls by eps afterwards; starts at 1."""
    return [1 + eps * (x - 1) if x <= peak else 1 + eps * (2 * peak - x - 1) for x in range(1, v + 1)]


def level_sequence(v: int, m: int, depth: Fraction) -> list:
    """Constant 1 with dips of ``depth`` strictly inside each level-m interval."""
    return [1 - depth if _in_dip(x, m) else Fraction(1) for x in range(1, v + 1)]


@dataclass(frozen=True)
class BitSeqParams:
    n: int
    perturbed: bool = False
    v_max: int = field(init=False)
    eps: Fraction = field(init=False)
    delta: Fraction = field(init=False)

    def __post_init__(self):
        if self.perturbed:
            v = 2 ** self.n
            eps, delta = Fraction(1, 4 * v), Fraction(1, v ** 10)
        else:
            v = 2 ** self.n - 1
            eps, delta = Fraction(1, 4 ** self.n), Fraction(0)
        object.__setattr__(self, "v_max", v)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "delta", delta)
        if not eps < Fraction(1, 2 * v):
            raise InstanceError("eps must be below 1/(2 v_max)")

    def sequence(self, day: int) -> list:
        """Revenue levels ``R_f(1..v_max)`` for the given day (before the q factor)."""
        n, v = self.n, self.v_max
        if day == 1:
            return tent_sequence(v, 2 ** (n - 1), Fraction(1, 4 ** n))
        m = n + 1 - day
        if not self.perturbed:
            return level_sequence(v, m, self.eps)
        base = level_sequence(v, m, self.eps / 2)
        d = self.delta
        return [b + d * (x * (2 * v - x) - (2 * v - 1)) for x, b in zip(range(1, v + 1), base)]

    def increments(self, day: int) -> list:
        """``s_j = r_j - r_{j+1}`` for j in 1..v_max-1."""
        r = self.sequence(day)
        return [r[j] - r[j + 1] for j in range(len(r) - 1)]


def _bitseq_instance(n: int, perturbed: bool, cap: int) -> FedexInstance:
    if not 2 <= n <= cap:
        raise InstanceError(f"n={n} outside [2, {cap}]")
    params = BitSeqParams(n, perturbed)
    pmf = [dist_from_rev_sequence(params.sequence(d), params.v_max) for d in range(1, n + 1)]
    name = f"{'perturbed_' if perturbed else ''}exponential(n={n})"
    inst = FedexInstance(n=n, v_max=params.v_max, q=uniform_q(n), pmf=pmf, name=name)
    return check_valid(inst)


def exponential_instance(n: int, cap: int = PLAIN_EXP_CAP) -> FedexInstance:
    return _bitseq_instance(n, False, cap)


def perturbed_exponential(n: int, cap: int = PERTURBED_EXP_CAP) -> FedexInstance:
    return _bitseq_instance(n, True, cap)


# --- the quadratic lower-bound instance ------------------------------------


@dataclass(frozen=True)
class LbaParams:
    n: int
    lam: Fraction = field(init=False)
    S: tuple = field(init=False)
    beta: tuple = field(init=False)
    C: Fraction = Fraction(1, 2)

    def __post_init__(self):
        n = self.n
        if n < 4:
            raise InstanceError(f"n must be >= 4, got {n}")
        lam = 1 + Fraction(1, 4 * n)
        S = [Fraction(n)]
        for i in range(1, n + 2):
            S.append(S[-1] + lam ** -(i - 1))
        beta = [
            Fraction(1, 3 * n + i) * (Fraction(3 * n - i, 2) - (n - i) / lam ** i + S[i])
            for i in range(n + 1)
        ]
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "S", tuple(S))
        object.__setattr__(self, "beta", tuple(beta))
        for problem in self.violations():
            raise InstanceError(problem)

    @property
    def v_max(self) -> int:
        return 5 * self.n

    def violations(self) -> list[str]:
        n, lam, S, beta = self.n, self.lam, self.S, self.beta
        out = []
        for i in range(n + 1):
            if not lam ** -i > Fraction(3, 4):
                out.append(f"lambda^-{i} <= 3/4")
        for i in range(n):
            if not beta[i] < beta[i + 1]:
                out.append(f"beta not increasing at {i}")
        if beta[1] != Fraction(1, 2) + Fraction(5, 4) / (lam * (3 * n + 1)):
            out.append("beta_1 closed form mismatch")
        if not (Fraction(1, 2) < beta[1] and beta[n] <= Fraction(3, 4)):
            out.append("beta outside (1/2, 3/4]")
        for i in range(1, n):
            if S[i] / (n + i) < S[i + 1] / (n + i + 1):
                out.append(f"S_{i}/(n+{i}) < S_{i + 1}/(n+{i + 1})")
        for i in range(1, n + 1):
            if beta[i] > S[i] / (n + i):
                out.append(f"beta_{i} > S_{i}/(n+{i})")
        return out

    def survival(self, day: int) -> list:
        """``Pr[X >= x]`` for x = 0..5n."""
        n, i = self.n, day
        out = []
        for x in range(self.v_max + 1):
            if x <= n:
                out.append(Fraction(1))
            elif x <= n + i:
                k = x - n
                out.append(self.S[k] / (n + k))
            elif x <= 3 * n + i:
                out.append(self.beta[i])
            else:
                out.append(Fraction(0))
        return out


def lba_instance(n: int) -> FedexInstance:
    params = LbaParams(n)
    pmf = [pmf_from_survival(params.survival(d)) for d in range(1, n + 1)]
    inst = FedexInstance(n=n, v_max=params.v_max, q=uniform_q(n), pmf=pmf, name=f"lba(n={n})")
    return check_valid(inst)


def _check_lba_args(p: LbaParams, i: int, x) -> None:
    if not 1 <= i <= p.n:
        raise ValueError(f"day {i} outside [1, {p.n}]")
    if not 0 <= x <= 5 * p.n:
        raise ValueError(f"x={x} outside [0, {5 * p.n}]")


def lba_closed_Ri(p: LbaParams, i: int, x) -> Fraction:
    """Single-day curve of day i with q divided out."""
    _check_lba_args(p, i, x)
    n = p.n
    if x <= n:
        return Fraction(x)
    for k in range(1, i + 1):
        if x <= n + k:
            return p.S[k] / (n + k) * x
    if x <= 3 * n + i:
        return p.beta[i] * x
    return Fraction(0)


def lba_closed_R(p: LbaParams, i: int, x) -> Fraction:
    """Continuation curve ``R_{>=i}(x)`` with q divided out."""
    _check_lba_args(p, i, x)
    n, lam, S, C, b = p.n, p.lam, p.S, p.C, p.beta[i]
    x = Fraction(x)
    if x <= n:
        return x + (n - i) * x
    for k in range(1, i + 1):
        if x <= n + k:
            return S[k] / (n + k) * x + (n - i) * ((x - n - k + 1) / lam ** (k - 1) + S[k - 1])
    if x <= n + i + 1:
        return b * x + (n - i) * ((x - n - i) / lam ** i + S[i])
    if x <= 3 * n + i:
        return b * x + (n - i) * (C * (x - n - i - 1) + S[i + 1])
    if x <= 3 * n + i + 1:
        return (n - i) * (C * (x - n - i - 1) + S[i + 1])
    return (n - i) * (2 * n * C + S[i + 1])


def lba_closed_Rtilde(p: LbaParams, i: int, x) -> Fraction:
    """Ironed continuation curve with q divided out."""
    _check_lba_args(p, i, x)
    n, lam, S, C, b = p.n, p.lam, p.S, p.C, p.beta[i]
    x = Fraction(x)
    if x <= n:
        return (n + 1 - i) * x
    for k in range(1, i + 1):
        if x <= n + k:
            return (n + 1 - i) * ((x - n - k + 1) / lam ** (k - 1) + S[k - 1])
    if x <= 3 * n + i:
        return (n + 1 - i) * (C * (x - n - i) + S[i])
    slope = ((n - i) * C - b * (3 * n + i)) / (2 * n - i)
    return (n - i) * (2 * n * C + S[i + 1]) + slope * (x - 5 * n)


def lba_opt_scaled(n: int) -> Fraction:
    return Fraction(n * (2 * n + 1))


# --- the randomized-optimum example with regular marginals -----------------

REG3_RATES = (1.0, 5.0, 0.2)
REG3_Q = (10 / 21, 10 / 21, 1 / 21)


def regular_three_day(grid_step: float = 0.01, v_cap: float = 15.0) -> FedexInstance:
    """Three exponential marginals on the grid ``k * grid_step``; float mode."""
    if not 0 < grid_step <= 0.1:
        raise InstanceError("grid_step must lie in (0, 0.1]")
    if v_cap < 15:
        raise InstanceError("v_cap must be at least 15")
    K = int(round(v_cap / grid_step))
    pmf = []
    for a in REG3_RATES:
        surv = [math.exp(-a * k * grid_step) for k in range(K + 1)]
        row = [surv[k] - surv[k + 1] for k in range(K)] + [surv[K]]
        row[0] += 1.0 - surv[0]
        pmf.append(row)
    inst = FedexInstance(
        n=3, v_max=K, q=REG3_Q, pmf=pmf, grid_step=float(grid_step), mode="float", name="regular3"
    )
    return check_valid(inst)


# --- random small instances -------------------------------------------------


def random_instance(rng: random.Random, n: int, v_max: int, weight_max: int = 4) -> FedexInstance:
    """Integer weights normalized to exact rationals; zero weights give sparse supports."""
    q = [Fraction(rng.randint(1, weight_max)) for _ in range(n)]
    total = sum(q)
    pmf = []
    for _ in range(n):
        w = [Fraction(rng.randint(0, weight_max)) for _ in range(v_max + 1)]
        if not any(w):
            w[rng.randint(0, v_max)] = Fraction(1)
        s = sum(w)
        pmf.append([x / s for x in w])
    return FedexInstance(n=n, v_max=v_max, q=[x / total for x in q], pmf=pmf, name="random")


def random_battery(seed: int, count: int, max_n: int = 3, max_v: int = 8) -> list[FedexInstance]:
    rng = random.Random(seed)
    return [random_instance(rng, rng.randint(1, max_n), rng.randint(1, max_v)) for _ in range(count)]
