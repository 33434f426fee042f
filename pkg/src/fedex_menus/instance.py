"""FedEx instances: a single buyer with a value on an integer grid and a deadline.

All probabilities are stored as :class:`fractions.Fraction`.  Float-mode
instances (continuous sources discretized onto a fine grid) store floats and
carry ``mode="float"``; everything downstream is written against plain
arithmetic so both modes flow through the same code.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

Rat = Fraction
Number = Union[Fraction, float]

MODES = ("exact", "float")


def default_mode() -> str:
    mode = os.environ.get("FEDEX_MENUS_MODE", "exact").strip().lower()
    if mode not in MODES:
        raise ValueError(f"FEDEX_MENUS_MODE must be one of {MODES}, got {mode!r}")
    return mode


class InstanceError(ValueError):
    """Raised for malformed or invalid instance data."""


def parse_rat(text) -> Fraction:
    """Parse ``"p/q"`` or a decimal string into an exact Fraction.

    Bare JSON numbers are refused: a float has already lost precision by
    the time it reaches us.
    """
    if isinstance(text, bool) or not isinstance(text, str):
        raise InstanceError(f"rational must be a string like '3/4' or '0.75', got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"cannot parse rational {text!r}") from exc


def format_rat(x: Number) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


@dataclass(frozen=True)
class TypePoint:
    value: int
    deadline: int

    def check(self, inst: "FedexInstance") -> None:
        if not 0 <= self.value <= inst.v_max:
            raise InstanceError(f"value {self.value} outside [0, {inst.v_max}]")
        if not 1 <= self.deadline <= inst.n:
            raise InstanceError(f"deadline {self.deadline} outside [1, {inst.n}]")


@dataclass(frozen=True)
class FedexInstance:
    """Deadline probabilities ``q`` and per-day value pmfs on ``{0..v_max}``.

    ``pmf[i]`` is the distribution for deadline ``i + 1``.  ``grid_step`` maps
    grid index ``v`` to the monetary value ``v * grid_step``; it is 1 for
    every integral instance.
    """

    n: int
    v_max: int
    q: tuple
    pmf: tuple
    grid_step: Number = 1
    mode: str = "exact"
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "pmf", tuple(tuple(row) for row in self.pmf))

    @property
    def days(self) -> range:
        return range(1, self.n + 1)

    def value_of(self, v: int) -> Number:
        return v * self.grid_step

    def day_pmf(self, day: int) -> tuple:
        _check_day(self, day)
        return self.pmf[day - 1]

    def survival(self, day: int) -> list:
        """``S[v] = Pr[value >= v]`` for v = 0..v_max+1."""
        row = self.day_pmf(day)
        out = [0] * (self.v_max + 2)
        acc = 0
        for v in range(self.v_max, -1, -1):
            acc += row[v]
            out[v] = acc
        return out

    def with_mode(self, mode: str) -> "FedexInstance":
        if mode == self.mode:
            return self
        if mode == "float":
            conv = float
        else:
            conv = lambda x: Fraction(x).limit_denominator(10**12) if isinstance(x, float) else Fraction(x)
        return FedexInstance(
            n=self.n,
            v_max=self.v_max,
            q=[conv(x) for x in self.q],
            pmf=[[conv(x) for x in row] for row in self.pmf],
            grid_step=conv(self.grid_step) if mode == "float" else self.grid_step,
            mode=mode,
            name=self.name,
        )


def _check_day(inst: FedexInstance, day: int) -> None:
    if not 1 <= day <= inst.n:
        raise IndexError(f"day {day} outside [1, {inst.n}]")


def _approx_equal(a, b, mode: str) -> bool:
    if mode == "float":
        return abs(a - b) <= 1e-9
    return a == b


def validate(inst: FedexInstance) -> list[str]:
    """Return a list of violations; an empty list means the instance is valid."""
    problems: list[str] = []
    if inst.n < 1:
        problems.append(f"n must be >= 1, got {inst.n}")
    if inst.v_max < 1:
        problems.append(f"v_max must be >= 1, got {inst.v_max}")
    if len(inst.q) != inst.n:
        problems.append(f"q has {len(inst.q)} entries, expected n={inst.n}")
    for i, qi in enumerate(inst.q):
        if qi < 0:
            problems.append(f"q[{i}] is negative ({format_rat(qi)})")
    total = sum(inst.q, 0)
    if not _approx_equal(total, 1, inst.mode):
        problems.append(f"q sums to {format_rat(total)}")
    if len(inst.pmf) != inst.n:
        problems.append(f"pmf has {len(inst.pmf)} rows, expected n={inst.n}")
    for i, row in enumerate(inst.pmf):
        day = i + 1
        if len(row) != inst.v_max + 1:
            problems.append(f"day {day} pmf has {len(row)} entries, expected v_max+1={inst.v_max + 1}")
        for v, p in enumerate(row):
            if p < 0:
                problems.append(f"day {day} pmf[{v}] is negative ({format_rat(p)})")
        s = sum(row, 0)
        if not _approx_equal(s, 1, inst.mode):
            problems.append(f"day {day} pmf sums to {format_rat(s)}")
    if inst.grid_step <= 0:
        problems.append(f"grid_step must be positive, got {inst.grid_step}")
    return problems


def check_valid(inst: FedexInstance) -> FedexInstance:
    problems = validate(inst)
    if problems:
        raise InstanceError("; ".join(problems))
    return inst


def marginal_cdf(inst: FedexInstance, day: int) -> list:
    """``F_day(v) = sum_{x <= v} f_day(x)`` for v = 0..v_max."""
    row = inst.day_pmf(day)
    out, acc = [], 0
    for p in row:
        acc += p
        out.append(acc)
    return out


def instance_to_dict(inst: FedexInstance) -> dict:
    d = {
        "n": inst.n,
        "v_max": inst.v_max,
        "q": [format_rat(x) for x in inst.q],
        "pmf": [[format_rat(x) for x in row] for row in inst.pmf],
    }
    if inst.grid_step != 1:
        d["grid_step"] = format_rat(inst.grid_step)
    if inst.mode != "exact":
        d["mode"] = inst.mode
    if inst.name:
        d["name"] = inst.name
    return d


def instance_from_dict(data: dict, mode: str | None = None) -> FedexInstance:
    try:
        n = data["n"]
        v_max = data["v_max"]
        q_raw = data["q"]
        pmf_raw = data["pmf"]
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"instance JSON missing field: {exc}") from exc
    if not isinstance(n, int) or not isinstance(v_max, int) or isinstance(n, bool):
        raise InstanceError("n and v_max must be JSON integers")
    if not isinstance(q_raw, list) or not isinstance(pmf_raw, list):
        raise InstanceError("q and pmf must be JSON arrays")
    q = [parse_rat(x) for x in q_raw]
    pmf = []
    for row in pmf_raw:
        if not isinstance(row, list):
            raise InstanceError("each pmf row must be a JSON array")
        pmf.append([parse_rat(x) for x in row])
    step = parse_rat(data["grid_step"]) if "grid_step" in data else 1
    declared = data.get("mode")
    if declared is not None and declared not in MODES:
        raise InstanceError(f"mode must be one of {MODES}")
    inst = FedexInstance(n=n, v_max=v_max, q=q, pmf=pmf, grid_step=step, name=data.get("name", ""))
    target = mode or declared or default_mode()
    if declared == "float" or target == "float":
        # float-sourced data is checked with tolerance before conversion
        inst = inst.with_mode("float")
    check_valid(inst)
    return inst


def write_instance(inst: FedexInstance) -> str:
    return json.dumps(instance_to_dict(inst))


def read_instance(text: str, mode: str | None = None) -> FedexInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    return instance_from_dict(data, mode=mode)


def uniform_q(n: int) -> list[Fraction]:
    return [Fraction(1, n)] * n


def pmf_from_survival(surv: Sequence) -> list:
    """Turn ``Pr[value >= v]`` (v = 0..v_max) into a pmf; ``surv[0]`` must be 1."""
    out = []
    for v in range(len(surv)):
        nxt = surv[v + 1] if v + 1 < len(surv) else 0
        out.append(surv[v] - nxt)
    return out
