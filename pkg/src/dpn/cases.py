"""Case descriptions and proof traces for the elimination engine.

A CaseSpec describes a family of candidate odd deficient perfect numbers
n = p1^a1 ... pk^ak with p1 < ... < pk: each slot is either pinned to a
prime or ranged over an interval of primes, and each exponent is either
pinned or bounded below (always by an even number >= 2).  ElimStep trees
record every rule application with exact witnesses so a trace can be
re-checked without re-running the search.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .arith import is_prime, next_prime, sigma_ratio

SCHEMA_VERSION = 1

RULE_IDS = (
    "R1-abundancy",
    "R2-D-bound",
    "R3-fg-gap",
    "R4-order-parity",
    "R5-sigma-forcing",
    "R6-residual",
    "Branch",
)


@dataclass(frozen=True)
class Slot:
    """One prime-power position of the candidate."""

    prime: Optional[int]  # fixed prime, or None when ranged
    lo: int = 3  # ranged: inclusive lower bound
    hi: Optional[int] = None  # ranged: inclusive upper bound, None = unbounded
    exp_exact: Optional[int] = None  # exactly known (even) exponent
    exp_lb: int = 2  # even lower bound when exponent is free

    @staticmethod
    def fixed(p: int, lb: int = 2, exact: Optional[int] = None) -> "Slot":
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        return Slot(prime=p, lo=p, hi=p, exp_exact=exact, exp_lb=lb)

    @staticmethod
    def ranged(lo: int, hi: Optional[int] = None, lb: int = 2) -> "Slot":
        return Slot(prime=None, lo=lo, hi=hi, exp_exact=None, exp_lb=lb)

    def __post_init__(self):
        lb = self.exp_lb
        if lb < 2 or lb % 2 != 0:
            raise ValueError(f"exponent lower bound must be even and >= 2, got {lb}")
        if self.exp_exact is not None and (self.exp_exact < 2 or self.exp_exact % 2):
            raise ValueError(f"exact exponent must be even and >= 2, got {self.exp_exact}")

    @property
    def min_exp(self) -> int:
        return self.exp_exact if self.exp_exact is not None else self.exp_lb

    def describe(self) -> str:
        p = str(self.prime) if self.prime else f"[{self.lo},{self.hi if self.hi else 'inf'}]"
        e = f"={self.exp_exact}" if self.exp_exact is not None else f">={self.exp_lb}"
        return f"p{p}^a{e}"


@dataclass(frozen=True)
class CaseSpec:
    """A constrained family of candidates, plus (optionally) a pinned complement D."""

    slots: tuple[Slot, ...]
    D: Optional[int] = None  # complement n/d once forced
    d_candidates: Optional[tuple[int, ...]] = None
    label: str = ""

    @property
    def k(self) -> int:
        return len(self.slots)

    def effective_slots(self) -> list[Slot]:
        """Slots with lower bounds tightened by the strict ordering p1 < p2 < ...

        Raises EmptyCase when the constraints admit no prime tuple.
        """
        out: list[Slot] = []
        floor = 2  # primes must exceed this
        for i, s in enumerate(self.slots):
            if s.prime is not None:
                if s.prime <= floor:
                    raise EmptyCase(f"slot {i}: prime {s.prime} <= {floor}")
                out.append(s)
                floor = s.prime
            else:
                lo = max(s.lo, next_prime(floor))
                if not is_prime(lo):
                    lo = next_prime(lo - 1)
                if s.hi is not None and lo > s.hi:
                    raise EmptyCase(f"slot {i}: empty prime range [{lo},{s.hi}]")
                out.append(replace(s, lo=lo))
                floor = lo
        return out

    def min_primes(self) -> tuple[int, ...]:
        return tuple(s.prime if s.prime is not None else s.lo for s in self.effective_slots())

    def fixed_primes(self) -> tuple[int, ...]:
        return tuple(s.prime for s in self.slots if s.prime is not None)

    def all_fixed(self) -> bool:
        return all(s.prime is not None for s in self.slots)

    def with_slot(self, i: int, slot: Slot) -> "CaseSpec":
        slots = list(self.slots)
        slots[i] = slot
        return replace(self, slots=tuple(slots))

    def with_d(self, D: int) -> "CaseSpec":
        return replace(self, D=D)

    def describe(self) -> str:
        parts = [s.describe() for s in self.slots]
        if self.D is not None:
            parts.append(f"D={self.D}")
        return " ".join(parts)

    def to_obj(self) -> dict:
        return {
            "label": self.label,
            "D": self.D,
            "d_candidates": list(self.d_candidates) if self.d_candidates else None,
            "slots": [
                {
                    "prime": s.prime,
                    "lo": s.lo,
                    "hi": s.hi,
                    "exp_exact": s.exp_exact,
                    "exp_lb": s.exp_lb,
                }
                for s in self.slots
            ],
        }

    @staticmethod
    def from_obj(obj: dict) -> "CaseSpec":
        slots = tuple(
            Slot(
                prime=s["prime"],
                lo=s["lo"],
                hi=s["hi"],
                exp_exact=s["exp_exact"],
                exp_lb=s["exp_lb"],
            )
            for s in obj["slots"]
        )
        dc = obj.get("d_candidates")
        return CaseSpec(
            slots=slots,
            D=obj.get("D"),
            d_candidates=tuple(dc) if dc else None,
            label=obj.get("label", ""),
        )


class EmptyCase(Exception):
    """The case constraints admit no candidate at all."""


# --- exact interval arithmetic for sigma(n)/n over a case ------------------


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    lo_attained: bool
    hi: Fraction
    hi_attained: bool

    def __mul__(self, other: "Interval") -> "Interval":
        return Interval(
            self.lo * other.lo,
            self.lo_attained and other.lo_attained,
            self.hi * other.hi,
            self.hi_attained and other.hi_attained,
        )

    def excludes(self, t: Fraction) -> Optional[str]:
        """Why t cannot be attained in this interval, or None if it can."""
        if t < self.lo or (t == self.lo and not self.lo_attained):
            return "below"
        if t > self.hi or (t == self.hi and not self.hi_attained):
            return "above"
        return None


POINT_ONE = Interval(Fraction(1), True, Fraction(1), True)


def slot_interval(slot: Slot) -> Interval:
    """Range of sigma(p^a)/p^a over the slot (increasing in a, decreasing in p)."""
    if slot.prime is not None:
        p = slot.prime
        if slot.exp_exact is not None:
            v = sigma_ratio(p, slot.exp_exact)
            return Interval(v, True, v, True)
        return Interval(sigma_ratio(p, slot.exp_lb), True, Fraction(p, p - 1), False)
    # ranged slot: min at the largest prime, max at the smallest
    a_min = slot.min_exp
    if slot.hi is None:
        lo, lo_att = Fraction(1), False
    else:
        lo, lo_att = sigma_ratio(slot.hi, a_min), True
    if slot.exp_exact is not None:
        hi, hi_att = sigma_ratio(slot.lo, slot.exp_exact), True
    else:
        hi, hi_att = Fraction(slot.lo, slot.lo - 1), False
    return Interval(lo, lo_att, hi, hi_att)


def case_interval(case: CaseSpec) -> Interval:
    out = POINT_ONE
    for s in case.effective_slots():
        out = out * slot_interval(s)
    return out


def target(D: int) -> Fraction:
    """The abundancy forced by complement D: sigma(n)/n = 2 - 1/D."""
    return 2 - Fraction(1, D)


# --- proof traces ----------------------------------------------------------


@dataclass
class ElimStep:
    """One node of a proof trace: a rule application on a concrete case."""

    rule: str
    case: CaseSpec
    verdict: str  # "eliminated" | "survived" | "branch"
    reason: str = ""
    witnesses: dict = field(default_factory=dict)
    children: list["ElimStep"] = field(default_factory=list)

    def leaves(self) -> list["ElimStep"]:
        if not self.children:
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    def to_obj(self) -> dict:
        return {
            "rule": self.rule,
            "case": self.case.to_obj(),
            "verdict": self.verdict,
            "reason": self.reason,
            "witnesses": self.witnesses,
            "children": [c.to_obj() for c in self.children],
        }

    @staticmethod
    def from_obj(obj: dict) -> "ElimStep":
        return ElimStep(
            rule=obj["rule"],
            case=CaseSpec.from_obj(obj["case"]),
            verdict=obj["verdict"],
            reason=obj.get("reason", ""),
            witnesses=obj.get("witnesses", {}),
            children=[ElimStep.from_obj(c) for c in obj.get("children", [])],
        )


@dataclass
class ProofTrace:
    root_case: CaseSpec
    root: ElimStep
    meta: dict = field(default_factory=dict)

    def leaves(self) -> list[ElimStep]:
        return self.root.leaves()

    def survived(self) -> list[ElimStep]:
        return [s for s in self.leaves() if s.verdict == "survived"]

    def eliminated(self) -> list[ElimStep]:
        return [s for s in self.leaves() if s.verdict == "eliminated"]

    def rules_used(self) -> set[str]:
        out = set()

        def walk(node: ElimStep):
            out.add(node.rule)
            for c in node.children:
                walk(c)

        walk(self.root)
        return out

    def to_obj(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "proof-trace",
            "case": self.root_case.to_obj(),
            "root": self.root.to_obj(),
            "meta": self.meta,
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        obj = self.to_obj()
        obj["meta"] = {k: v for k, v in self.meta.items() if k != "timestamp"}
        stable = json.dumps(obj, sort_keys=True, indent=indent)
        return stable

    @staticmethod
    def from_obj(obj: dict) -> "ProofTrace":
        version = obj.get("schema_version")
        if version != SCHEMA_VERSION:
            raise TraceSchemaError(f"unsupported schema_version {version!r}")
        if obj.get("kind") != "proof-trace":
            raise TraceSchemaError(f"not a proof trace: kind={obj.get('kind')!r}")
        return ProofTrace(
            root_case=CaseSpec.from_obj(obj["case"]),
            root=ElimStep.from_obj(obj["root"]),
            meta=obj.get("meta", {}),
        )

    @staticmethod
    def from_json(text: str) -> "ProofTrace":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise TraceSchemaError(f"not valid JSON: {e}") from e
        if not isinstance(obj, dict):
            raise TraceSchemaError("trace JSON must be an object")
        return ProofTrace.from_obj(obj)


class TraceSchemaError(Exception):
    pass


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))
