"""Mechanized case elimination for odd deficient perfect numbers.

The engine takes a CaseSpec (a family of candidates n = p1^a1...pk^ak with
ordered prime slots and even exponents) and applies exact elimination rules
until every leaf is contradicted or survives, emitting an auditable
ProofTrace.  Rule families:

  R1  abundancy ceiling: sup sigma(n)/n too small for 2 - 1/D.
  R2  complement bound: a specific D is impossible for the same reason.
  R3  abundancy floor: inf sigma(n)/n already exceeds 2 - 1/D (the f/g
      gap argument, in the equivalent sigma(n)/n form).
  R4  order parity: a forced prime divisor q cannot divide any sigma(p^a)
      with a even because every ord_q(p) is even.
  R5  sigma-factor forcing: prime factors of sigma(p^a) must divide
      (2D-1) * n, excluding exponents or forcing an open prime slot.
  R6  residual ratio: with everything else pinned, the one remaining
      slot must satisfy sigma(p^a)/p^a = r for an explicit rational r,
      which admits at most a couple of integer candidates.

All comparisons are exact rational arithmetic; no step is ever concluded
from a floating-point value.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

from .arith import (
    factorize,
    is_prime,
    multiplicative_order,
    next_prime,
    primes_in,
    sigma_prime_power,
    _perfect_power,
)
from .cases import (
    CaseSpec,
    ElimStep,
    EmptyCase,
    Interval,
    ProofTrace,
    Slot,
    case_interval,
    frac_str,
    slot_interval,
    target,
)


@dataclass(frozen=True)
class Budget:
    """Deterministic resource limits; exhaustion yields Survived('budget...')."""

    max_nodes: int = 500_000
    exp_scan_cap: int = 20  # R5 scans even exponents up to this ceiling
    branch_width: int = 64  # max primes branched for one slot
    exp_lb_ceiling: int = 44  # stop raising exponent lower bounds here
    candidate_window: int = 8  # max integers tolerated in a residual window
    bound_search_limit: int = 10**7  # give up bounding a slot beyond this


def ratio(m: int, a: int) -> Fraction:
    """Formal sigma-ratio (1 + 1/m + ... + 1/m^a); matches sigma(p^a)/p^a."""
    return Fraction(sum(m**j for j in range(a + 1)), m**a)


def _factor_value(p: Optional[int], a: Optional[int]) -> tuple[Fraction, bool]:
    """Value and attainment of one witness factor (see interval witnesses)."""
    if p is None:
        return Fraction(1), False  # limit of sigma(p^a)/p^a as p -> inf
    if a is None:
        return Fraction(p, p - 1), False  # sup over a of sigma(p^a)/p^a
    return ratio(p, a), True


def _interval_witness(case: CaseSpec, side: str) -> dict:
    """Factors realizing the inf ('below') or sup ('above') of sigma(n)/n."""
    factors: list[list[Optional[int]]] = []
    for s in case.effective_slots():
        if side == "above":
            p = s.prime if s.prime is not None else s.lo
            factors.append([p, s.exp_exact])
        else:
            if s.prime is not None:
                factors.append([s.prime, s.min_exp])
            elif s.hi is not None:
                factors.append([s.hi, s.min_exp])
            else:
                factors.append([None, None])
    value = Fraction(1)
    attained = True
    for p, a in factors:
        v, att = _factor_value(p, a)
        value *= v
        attained = attained and att
    return {
        "kind": "interval",
        "side": side,
        "factors": factors,
        "value": frac_str(value),
        "attained": attained,
    }


def d_floor(case: CaseSpec) -> int:
    """Smallest complement D > 1 can be: the smallest admissible slot prime."""
    return case.min_primes()[0]


class Engine:
    """Deterministic depth-first eliminator."""

    def __init__(self, budget: Budget = Budget(), skip: Optional[Callable[[CaseSpec], bool]] = None):
        self.budget = budget
        self.skip = skip
        self.nodes = 0

    # -- bookkeeping --------------------------------------------------------

    def _node(self, **kw) -> ElimStep:
        self.nodes += 1
        return ElimStep(**kw)

    def _over_budget(self) -> bool:
        return self.nodes >= self.budget.max_nodes

    # -- entry points -------------------------------------------------------

    def solve(self, case: CaseSpec) -> ElimStep:
        """Eliminate or survive a case with the complement D not yet fixed."""
        if self._over_budget():
            return self._node(rule="Branch", case=case, verdict="survived", reason="budget: node limit")
        if self.skip is not None and self.skip(case):
            return self._node(
                rule="Branch", case=case, verdict="survived", reason="out-of-scope"
            )
        try:
            case.effective_slots()
        except EmptyCase as e:
            return self._node(
                rule="R1-abundancy", case=case, verdict="eliminated",
                reason="empty-case", witnesses={"final": {"kind": "empty", "detail": str(e)}},
            )

        if case.D is not None:
            return self.solve_with_d(case)

        # R1: ceiling vs the smallest conceivable complement
        dmin = d_floor(case)
        step = self.r1(case, dmin)
        if step is not None:
            return step

        # branch ranged prime slots left to right (the last slot may stay open)
        for i, s in enumerate(case.slots):
            if s.prime is not None:
                continue
            bound = self.bound_slot(case, i, dmin=dmin)
            if bound is None:
                if i < case.k - 1:
                    return self._node(
                        rule="Branch", case=case, verdict="survived",
                        reason=f"unbounded: slot {i} not boundable by R1",
                    )
                break  # last slot stays ranged; D-phase handles it
            lo = case.effective_slots()[i].lo
            if i == case.k - 1 and len(primes_in(lo, bound)) > self.budget.branch_width:
                case = case.with_slot(i, replace(s, hi=bound))
                break
            # include the first prime past the bound: its child is killed by
            # R1, witnessing the bound inside the trace itself
            primes = primes_in(lo, bound) + [next_prime(bound)]
            if len(primes) > self.budget.branch_width + 1:
                return self._node(
                    rule="Branch", case=case, verdict="survived",
                    reason=f"budget: slot {i} branch of {len(primes)} primes too wide",
                )
            beyond = self._beyond_witness(case, i, primes[-1], dmin)
            children = [
                self.solve(case.with_slot(i, Slot.fixed(p, lb=s.exp_lb, exact=s.exp_exact)))
                for p in primes
            ]
            return self._node(
                rule="Branch", case=case,
                verdict=self._branch_verdict(children),
                reason=f"slot {i} in {{{', '.join(map(str, primes))}}}",
                witnesses={"branch": {"kind": "prime-slot", "slot": i, "primes": primes,
                                      "bound": bound, "beyond": beyond}},
                children=children,
            )

        return self.enumerate_d(case)

    def _branch_verdict(self, children: list[ElimStep]) -> str:
        return "eliminated" if all(c.verdict == "eliminated" for c in children) else "branch"

    # -- R1 / bounding ------------------------------------------------------

    def r1(self, case: CaseSpec, dmin: int) -> Optional[ElimStep]:
        """Ceiling test: sup sigma(n)/n + 1/dmin <= 2 kills the whole case."""
        iv = case_interval(case)
        t = 2 - Fraction(1, dmin)
        if t > iv.hi or (t == iv.hi and not iv.hi_attained):
            w = _interval_witness(case, "above")
            w["d_min"] = dmin
            w["target"] = frac_str(t)
            w["total"] = frac_str(iv.hi + Fraction(1, dmin))
            return self._node(
                rule="R1-abundancy", case=case, verdict="eliminated",
                reason=f"sup sigma(n)/n + 1/{dmin} <= 2", witnesses={"final": w},
            )
        return None

    def _sup_with_slot_at(self, case: CaseSpec, i: int, p: int) -> tuple[Fraction, bool, list]:
        """Sup of sigma(n)/n when ranged slot i takes prime p (later ranged
        slots take successive next primes above p)."""
        factors: list[list[Optional[int]]] = []
        prev = 0
        for j, s in enumerate(case.effective_slots()):
            if j < i:
                q = s.prime if s.prime is not None else s.lo
            elif j == i:
                q = p
            else:
                q = s.prime if s.prime is not None else next_prime(max(prev, s.lo - 1))
            factors.append([q, s.exp_exact])
            prev = q
        value = Fraction(1)
        attained = True
        for q, a in factors:
            v, att = _factor_value(q, a)
            value *= v
            attained = attained and att
        return value, attained, factors

    def _slot_killed_at(self, case: CaseSpec, i: int, p: int, t: Fraction) -> bool:
        value, attained, _ = self._sup_with_slot_at(case, i, p)
        return t > value or (t == value and not attained)

    def bound_slot(self, case: CaseSpec, i: int, dmin: Optional[int] = None) -> Optional[int]:
        """Largest prime slot i can take before the ceiling test kills the case.

        Returns None when no finite bound exists.  Uses the target fixed by
        case.D when present, else 2 - 1/dmin (both monotone in the slot prime).
        """
        eff = case.effective_slots()
        lo = eff[i].lo
        if case.D is not None:
            t = target(case.D)
        else:
            t = 2 - Fraction(1, dmin if dmin is not None else d_floor(case))
        # limit as the slot prime -> infinity: preceding slots at their sup,
        # this and later ranged factors -> 1
        limit = Fraction(1)
        for j, s in enumerate(eff):
            if j < i or (j > i and s.prime is not None):
                v, _ = _factor_value(s.prime if s.prime is not None else s.lo, s.exp_exact)
                limit *= v
        if limit >= t:
            return None
        if not self._slot_killed_at(case, i, lo, t):
            hi = lo
            step = 2
            while hi < self.budget.bound_search_limit and not self._slot_killed_at(case, i, hi + step, t):
                hi += step
                step *= 2
            if hi >= self.budget.bound_search_limit:
                return None
            lo_n, hi_n = hi, hi + step  # killed at hi_n, alive at lo_n
            while hi_n - lo_n > 1:
                mid = (lo_n + hi_n) // 2
                if self._slot_killed_at(case, i, mid, t):
                    hi_n = mid
                else:
                    lo_n = mid
            # largest *prime* not killed
            bound = lo_n
            while bound >= lo and not is_prime(bound):
                bound -= 1
            return bound if bound >= lo else None
        return None  # even the minimal prime is killed; caller's R1 handles it

    def _beyond_witness(self, case: CaseSpec, i: int, bound: int, dmin: int) -> dict:
        """Witness that slot i above `bound` dies by the ceiling test."""
        p = next_prime(bound)
        t = target(case.D) if case.D is not None else 2 - Fraction(1, dmin)
        value, attained, factors = self._sup_with_slot_at(case, i, p)
        return {
            "kind": "interval", "side": "above", "factors": factors,
            "value": frac_str(value), "attained": attained, "target": frac_str(t),
        }

    # -- R2: complement enumeration ------------------------------------------

    def feasible_ds(self, case: CaseSpec) -> Optional[tuple[list[int], list[int], int, Optional[int]]]:
        """(feasible Ds, infeasible Ds <= Dmax, Dmax, smallest D > Dmax).

        None when the feasible complement set is not finite (sup >= 2, or a
        ranged slot's primes could themselves enter D).
        """
        iv = case_interval(case)
        if iv.hi >= 2:
            return None
        dmax = int(Fraction(1) / (2 - iv.hi))
        fixed = list(case.fixed_primes())
        for s in case.effective_slots():
            if s.prime is None and s.lo <= dmax + 2:
                return None  # a ranged prime could enter D; not supported here
        feasible, infeasible = [], []
        for D in _products_up_to(fixed, dmax):
            t = target(D)
            excluded = t > iv.hi or (t == iv.hi and not iv.hi_attained)
            (infeasible if excluded else feasible).append(D)
        boundary = _smallest_product_above(fixed, dmax)
        if case.d_candidates is not None:
            feasible = [D for D in feasible if D in case.d_candidates]
        return feasible, infeasible, dmax, boundary

    def _r2_child(self, case: CaseSpec, D: int) -> ElimStep:
        """Explicit R2 elimination of one complement value."""
        sub = case.with_d(D)
        w = _interval_witness(case, "above")
        w["target"] = frac_str(target(D))
        return self._node(
            rule="R2-D-bound", case=sub, verdict="eliminated",
            reason=f"sup sigma(n)/n <= 2 - 1/{D}", witnesses={"final": w},
        )

    def enumerate_d(self, case: CaseSpec) -> ElimStep:
        got = self.feasible_ds(case)
        if got is None:
            return self._node(
                rule="R2-D-bound", case=case, verdict="survived",
                reason="unbounded: feasible complement set is not finite",
            )
        feasible, infeasible, dmax, boundary = got
        children = [self._r2_child(case, D) for D in infeasible]
        if boundary is not None:
            # smallest admissible product beyond Dmax; larger D only raise
            # the target 2 - 1/D further, so one witness covers them all
            children.append(self._r2_child(case, boundary))
        children += [self.solve_with_d(case.with_d(D)) for D in feasible]
        if not feasible:
            verdict = "eliminated"
        else:
            verdict = self._branch_verdict(children)
        return self._node(
            rule="Branch" if feasible else "R2-D-bound", case=case, verdict=verdict,
            reason=f"complement D in {{{', '.join(map(str, feasible))}}}" if feasible
            else "no feasible complement D",
            witnesses={"branch": {"kind": "complement", "Ds": feasible,
                                  "infeasible": infeasible, "Dmax": dmax,
                                  "boundary": boundary}},
            children=children,
        )

    # -- the per-D solver ----------------------------------------------------

    def solve_with_d(self, case: CaseSpec) -> ElimStep:
        assert case.D is not None
        t = target(case.D)
        refinements: list[dict] = []
        forced_children: list[ElimStep] = []
        checked_exact: set[tuple[int, int]] = set()

        def finish(rule, verdict, reason, final=None, children=()):
            w = {}
            if refinements:
                w["refinements"] = refinements
            if final is not None:
                w["final"] = final
            return self._node(
                rule=rule, case=case, verdict=verdict, reason=reason,
                witnesses=w, children=forced_children + list(children),
            )

        for _round in range(64):
            if self._over_budget():
                return finish("Branch", "survived", "budget: node limit")
            try:
                iv = case_interval(case)
            except EmptyCase as e:
                return finish("R1-abundancy", "eliminated", "empty-case",
                              final={"kind": "empty", "detail": str(e)})
            if iv.excludes(t) == "above":
                w = _interval_witness(case, "above")
                w["target"] = frac_str(t)
                return finish("R1-abundancy", "eliminated",
                              f"sup sigma(n)/n <= 2 - 1/{case.D}", final=w)

            # R5 on pinned exponents: sigma(p^a) is a concrete integer whose
            # surplus factors either kill the case or pin the open slot
            acted = False
            for i, s in enumerate(case.slots):
                if s.prime is None or s.exp_exact is None:
                    continue
                key = (i, s.exp_exact)
                if key in checked_exact:
                    continue
                checked_exact.add(key)
                analysis = self.forcing_analysis(case, i, s.exp_exact)
                if analysis["outcome"] == "excluded":
                    return finish("R5-sigma-forcing", "eliminated",
                                  f"sigma({s.prime}^{s.exp_exact}) has an inadmissible factor",
                                  final={"kind": "forcing", "analysis": analysis})
                if analysis["outcome"] == "forced":
                    j, r = analysis["open_slot"], analysis["forced"]
                    case = case.with_slot(j, Slot.fixed(r, lb=case.slots[j].exp_lb))
                    refinements.append({"rule": "R5-sigma-forcing",
                                        "kind": "forced-slot", "analysis": analysis})
                    acted = True
                    break
            if acted:
                continue

            # R5 scans: raise free exponent floors slot by slot
            progressed = False
            for i, s in enumerate(case.slots):
                if s.prime is None or s.exp_exact is not None:
                    continue
                new_case, events, children, dead = self._scan_exponents(case, i)
                refinements.extend(events)
                forced_children.extend(children)
                if dead is not None:
                    return finish(dead["rule"], "eliminated", dead["reason"], final=dead["final"])
                if new_case is not case:
                    case = new_case
                    progressed = True
            if progressed:
                continue

            open_slots = [i for i, s in enumerate(case.slots) if s.prime is None]

            # R4: order parity (needs every prime pinned); runs before R3 so
            # traces prefer the structural contradiction over the numeric one
            if not open_slots:
                step = self._r4(case)
                if step is not None:
                    return finish("R4-order-parity", "eliminated", step["reason"], final=step)

            if iv.excludes(t) == "below":
                w = _interval_witness(case, "below")
                w["target"] = frac_str(t)
                return finish("R3-fg-gap", "eliminated",
                              f"inf sigma(n)/n >= 2 - 1/{case.D}", final=w)

            # bound + branch the open slot under this D's tighter target
            if len(open_slots) == 1:
                i = open_slots[0]
                s = case.slots[i]
                bound = self.bound_slot(case, i)
                eff_lo = case.effective_slots()[i].lo
                if bound is not None and (s.hi is None or bound < s.hi):
                    primes = primes_in(eff_lo, bound) + [next_prime(bound)]
                    if len(primes) <= self.budget.branch_width + 1:
                        beyond = self._beyond_witness(case, i, primes[-1], case.D)
                        children = [
                            self.solve_with_d(case.with_slot(i, Slot.fixed(p, lb=s.exp_lb)))
                            for p in primes
                        ]
                        return finish(
                            "Branch", self._branch_verdict(children),
                            f"slot {i} in {{{', '.join(map(str, primes))}}} (D={case.D})",
                            final={"kind": "prime-slot", "slot": i, "primes": primes,
                                   "bound": bound, "beyond": beyond},
                            children=children,
                        )
                    case = case.with_slot(i, replace(s, hi=bound))
                    refinements.append({"kind": "slot-bound", "slot": i, "hi": bound,
                                        "beyond": self._beyond_witness(case, i, bound, case.D)})
                    continue

            if len(open_slots) >= 2:
                return finish("Branch", "survived", "budget: multiple open prime slots")

            # residual analysis / exponent branching
            result = self._residual(case, t)
            if result is not None:
                kind, payload = result
                if kind == "eliminated":
                    return finish(payload["rule"], "eliminated", payload["reason"],
                                  final=payload["final"])
                if kind == "concrete":
                    return finish("R6-residual", "survived", "concrete-solution",
                                  final=payload)
                if kind == "branch":
                    return finish("Branch", self._branch_verdict(payload["children"]),
                                  payload["reason"], final=payload["final"],
                                  children=payload["children"])
            step = self._branch_exponent(case, t)
            if step is None:
                return finish("Branch", "survived", "budget: no applicable rule")
            return finish("Branch", self._branch_verdict(step["children"]),
                          step["reason"], final=step["final"], children=step["children"])

        return finish("Branch", "survived", "budget: refinement loop limit")

    # -- R5 ------------------------------------------------------------------

    def _allowed_primes(self, case: CaseSpec) -> tuple[set[int], dict[int, int]]:
        """(slot primes with unbounded supply, coefficient primes with caps)."""
        slot_primes = {s.prime for s in case.slots if s.prime is not None}
        coeff: dict[int, int] = {}
        for p, e in factorize(2 * case.D - 1):
            if p not in slot_primes:
                coeff[p] = e
        return slot_primes, coeff

    def forcing_analysis(self, case: CaseSpec, i: int, a: int) -> dict:
        """What the factorization of sigma(p_i^a) forces under case.D.

        Returns {"outcome": "excluded"|"forced"|"inconclusive", ...}.
        """
        s = case.slots[i]
        p = s.prime
        sig = sigma_prime_power(p, a)
        slot_primes, coeff = self._allowed_primes(case)
        rem = sig
        for q in sorted(slot_primes):
            while rem % q == 0:
                rem //= q
        for q in sorted(coeff):
            cap = coeff[q]
            while cap > 0 and rem % q == 0:
                rem //= q
                cap -= 1
        base = {"slot": i, "p": p, "a": a, "sigma": str(sig), "remainder": str(rem),
                "slot_primes": sorted(slot_primes), "coeff_primes": sorted(coeff.items())}
        if rem == 1:
            return {"outcome": "inconclusive", **base}
        open_slots = [(j, sl) for j, sl in enumerate(case.effective_slots()) if sl.prime is None]
        if not open_slots:
            return {"outcome": "excluded", "why": "leftover", **base}
        min_lo = min(sl.lo for _, sl in open_slots)
        small = _smallest_factor_below(rem, min_lo)
        if small is not None:
            return {"outcome": "excluded", "why": "small-factor", "factor": small,
                    "min_open_lo": min_lo, **base}
        if len(open_slots) > 1:
            return {"outcome": "inconclusive", **base}
        j, sl = open_slots[0]
        root, k = _perfect_power(rem)
        if not is_prime(root):
            return {"outcome": "excluded", "why": "multiple-outside-primes", **base}
        if root < sl.lo or (sl.hi is not None and root > sl.hi):
            return {"outcome": "excluded", "why": "forced-prime-out-of-range",
                    "forced": root, "range": [sl.lo, sl.hi], **base}
        return {"outcome": "forced", "open_slot": j, "forced": root, **base}

    def _scan_exponents(self, case: CaseSpec, i: int):
        """R5 scan of slot i: returns (new_case, events, forced_children, dead)."""
        t = target(case.D)
        events: list[dict] = []
        children: list[ElimStep] = []
        s = case.slots[i]
        lb = s.exp_lb
        a = lb
        while a <= self.budget.exp_scan_cap:
            # truncated interval with the exponent pinned to a
            pinned = case.with_slot(i, replace(s, exp_exact=a, exp_lb=a))
            try:
                iv = case_interval(pinned)
                side = iv.excludes(t)
            except EmptyCase:
                side = "above"
            if side is not None:
                w = _interval_witness(pinned, side)
                w["target"] = frac_str(t)
                events.append({"rule": "R5-sigma-forcing", "kind": "truncated-interval",
                               "slot": i, "a": a, "witness": w})
                a += 2
                continue
            analysis = self.forcing_analysis(case, i, a)
            if analysis["outcome"] == "excluded":
                events.append({"rule": "R5-sigma-forcing", "kind": "forcing",
                               "analysis": analysis})
                a += 2
                continue
            if analysis["outcome"] == "forced":
                j, r = analysis["open_slot"], analysis["forced"]
                sub = case.with_slot(i, replace(s, exp_exact=a, exp_lb=a))
                sub = sub.with_slot(j, Slot.fixed(r, lb=case.slots[j].exp_lb))
                child = self.solve_with_d(sub)
                children.append(child)
                events.append({"rule": "R5-sigma-forcing", "kind": "forced-branch",
                               "analysis": analysis,
                               "resolved": child.verdict == "eliminated"})
                if child.verdict == "eliminated":
                    a += 2
                    continue
            break
        if a == lb:
            return case, events, children, None
        if a > self.budget.exp_scan_cap:
            events.append({"rule": "R5-sigma-forcing", "kind": "scan-capped",
                           "slot": i, "cap": self.budget.exp_scan_cap})
        new_lb = a if a <= self.budget.exp_scan_cap else self.budget.exp_scan_cap + 2
        new_case = case.with_slot(i, replace(s, exp_lb=new_lb))
        return new_case, events, children, None

    # -- R4 ------------------------------------------------------------------

    def _r4(self, case: CaseSpec) -> Optional[dict]:
        D = case.D
        slot_primes = [s.prime for s in case.slots]
        coeff = factorize(2 * D - 1)
        qs = sorted(set(p for p, _ in coeff) | set(slot_primes))
        for q in qs:
            w = self._r4_forward(case, q)
            if w is not None:
                return w
        for i, s in enumerate(case.slots):
            w = self._r4_reverse(case, i)
            if w is not None:
                return w
        return None

    def _r4_forward(self, case: CaseSpec, q: int) -> Optional[dict]:
        """No sigma(p^a) with a even can supply q, yet the RHS demands it."""
        D = case.D
        vq_d = _valuation(D, q)
        vq_c = _valuation(2 * D - 1, q)
        min_aq = 0
        for s in case.slots:
            if s.prime == q:
                min_aq = s.min_exp
        if vq_d >= vq_c + min_aq:
            return None  # valuations can balance; rule inapplicable
        orders = []
        for s in case.slots:
            p = s.prime
            if p == q:
                continue
            ordv = multiplicative_order(p, q)
            if ordv % 2 == 1:
                return None  # this slot could supply q
            orders.append([p, ordv])
        return {
            "kind": "order-parity", "direction": "forward", "q": q, "D": D,
            "orders": orders, "vq_D": vq_d, "vq_2D1": vq_c, "min_aq": min_aq,
            "reason": f"q={q}: every ord_q(p) even, valuation deficit",
        }

    def _r4_reverse(self, case: CaseSpec, i: int) -> Optional[dict]:
        """sigma(p_i^a) > 1 but no admissible prime can divide it."""
        D = case.D
        p = case.slots[i].prime
        allowed = sorted(
            set(q for q, _ in factorize(2 * D - 1))
            | {s.prime for s in case.slots if s.prime != p}
        )
        orders = []
        for r in allowed:
            if r == p:
                continue
            ordv = multiplicative_order(p, r)
            if ordv % 2 == 1:
                return None
            orders.append([r, ordv])
        return {
            "kind": "order-parity", "direction": "reverse", "slot_prime": p, "D": D,
            "allowed": allowed, "orders": orders,
            "reason": f"sigma({p}^a) has no admissible prime divisor",
        }

    # -- residual ratio endgame ------------------------------------------------

    def _residual(self, case: CaseSpec, t: Fraction):
        """Close a case whose slots are all pinned except at most one degree
        of freedom block: one free exponent, or one open prime slot whose
        companion fixed slots are exponent-exact (or tightly banded)."""
        open_slots = [i for i, s in enumerate(case.slots) if s.prime is None]
        free_exps = [i for i, s in enumerate(case.slots)
                     if s.prime is not None and s.exp_exact is None]

        if not open_slots and not free_exps:
            value = Fraction(1)
            factors = []
            for s in case.slots:
                value *= ratio(s.prime, s.exp_exact)
                factors.append([s.prime, s.exp_exact])
            if value == t:
                n = 1
                for s in case.slots:
                    n *= s.prime**s.exp_exact
                return "concrete", {"kind": "point", "n": str(n), "factors": factors,
                                    "value": frac_str(value), "target": frac_str(t)}
            return "eliminated", {
                "rule": "R6-residual", "reason": "exact abundancy mismatch",
                "final": {"kind": "point", "factors": factors,
                          "value": frac_str(value), "target": frac_str(t)},
            }

        if not open_slots and len(free_exps) == 1:
            i = free_exps[0]
            K = Fraction(1)
            k_factors = []
            for j, s in enumerate(case.slots):
                if j != i:
                    K *= ratio(s.prime, s.exp_exact)
                    k_factors.append([s.prime, s.exp_exact])
            r = t / K
            s = case.slots[i]
            final = {"kind": "pinned-exponent", "slot": i, "p": s.prime,
                     "K_factors": k_factors, "K": frac_str(K), "target": frac_str(t),
                     "r": frac_str(r), "exp_lb": s.exp_lb}
            a = _ratio_exponent(r, s.prime)
            if a is not None and a % 2 == 0 and a >= s.exp_lb:
                n = 1
                for j, sl in enumerate(case.slots):
                    n *= sl.prime ** (a if j == i else sl.exp_exact)
                final["a"] = a
                final["n"] = str(n)
                return "concrete", final
            final["a"] = a
            return "eliminated", {"rule": "R6-residual",
                                  "reason": "no admissible exponent matches the forced ratio",
                                  "final": final}

        if len(open_slots) == 1 and not free_exps:
            return self._residual_open_slot(case, t, open_slots[0], exact=True)
        if len(open_slots) == 1:
            return self._residual_open_slot(case, t, open_slots[0], exact=False)
        return None

    def _residual_open_slot(self, case: CaseSpec, t: Fraction, i: int, exact: bool):
        """The open slot's sigma-ratio is pinned to (a band around) t/K."""
        K_lo, K_hi = Fraction(1), Fraction(1)
        hi_attained = True
        k_factors_lo, k_factors_hi = [], []
        for j, s in enumerate(case.slots):
            if j == i:
                continue
            iv = slot_interval(s)
            K_lo *= iv.lo
            K_hi *= iv.hi
            hi_attained = hi_attained and iv.hi_attained
            k_factors_lo.append([s.prime, s.min_exp])
            k_factors_hi.append([s.prime, s.exp_exact])
        r_hi = t / K_lo  # largest ratio the open slot may need
        r_lo = t / K_hi  # infimum (not attained unless K_hi is)
        sl = case.effective_slots()[i]
        final = {"kind": "open-slot-window", "slot": i,
                 "K_lo": frac_str(K_lo), "K_hi": frac_str(K_hi),
                 "K_lo_factors": k_factors_lo, "K_hi_factors": k_factors_hi,
                 "K_hi_attained": hi_attained,
                 "r_lo": frac_str(r_lo), "r_hi": frac_str(r_hi),
                 "target": frac_str(t), "exp_lb": sl.exp_lb,
                 "range": [sl.lo, sl.hi]}
        if r_hi <= 1:
            return "eliminated", {"rule": "R6-residual",
                                  "reason": "forced sigma-ratio <= 1", "final": final}
        if r_lo <= 1:
            return None  # window unbounded; caller must branch exponents
        m_max = int(r_lo / (r_lo - 1))  # m/(m-1) > r_lo required
        m_min = max(sl.lo, int(1 / (r_hi - 1)) - 1)
        if sl.hi is not None:
            m_max = min(m_max, sl.hi)
        if m_max - m_min > 10 * self.budget.candidate_window:
            return None
        checked, candidates = [], []
        for m in range(m_min, m_max + 1):
            verdict = self._window_verdict(m, sl, r_lo, r_hi, hi_attained, exact)
            checked.append([m, verdict])
            if verdict == "candidate":
                candidates.append(m)
        final["window"] = [m_min, m_max]
        final["checked"] = checked
        if not candidates:
            return "eliminated", {"rule": "R6-residual",
                                  "reason": "no prime fits the forced ratio window",
                                  "final": final}
        if len(candidates) > self.budget.candidate_window:
            return None
        children = [
            self.solve_with_d(case.with_slot(i, Slot.fixed(m, lb=case.slots[i].exp_lb)))
            for m in candidates
        ]
        return "branch", {
            "reason": f"slot {i} forced into {{{', '.join(map(str, candidates))}}}",
            "final": final, "children": children,
        }

    def _window_verdict(self, m: int, sl: Slot, r_lo: Fraction, r_hi: Fraction,
                        hi_attained: bool, exact: bool) -> str:
        if m < 2:
            return "out-of-range"
        if Fraction(m, m - 1) <= r_lo or (Fraction(m, m - 1) == r_lo and not hi_attained):
            return "ratio-too-small"
        if ratio(m, sl.min_exp) > r_hi:
            return "ratio-too-large"
        if sl.lo > m or (sl.hi is not None and m > sl.hi):
            return "out-of-range"
        if not is_prime(m):
            return "not-prime"
        if exact:
            # r_lo == r_hi: the required exponent is forced by the denominator
            a = _ratio_exponent(r_hi, m)
            if a is None or a % 2 or a < sl.min_exp:
                return "no-exact-match"
        return "candidate"

    # -- exponent branching ----------------------------------------------------

    def _branch_exponent(self, case: CaseSpec, t: Fraction) -> Optional[dict]:
        free = [i for i, s in enumerate(case.slots)
                if s.prime is not None and s.exp_exact is None]
        if not free:
            return None
        i = free[0]  # slots are prime-ordered; the smallest prime dominates
        s = case.slots[i]
        open_slots = [j for j, sl in enumerate(case.slots) if sl.prime is None]
        values = []
        a = s.exp_lb
        tail_lb = None
        if not open_slots:
            # adaptive: find the even T where the abundancy floor alone kills
            T = s.exp_lb
            killed = None
            while T <= 2000:
                pinned = case.with_slot(i, replace(s, exp_exact=None, exp_lb=T))
                if case_interval(pinned).excludes(t) is not None:
                    killed = T
                    break
                T += 2
            if killed is None:
                return None
            values = list(range(s.exp_lb, killed, 2))
            tail_lb = killed
        else:
            width = 8
            values = list(range(a, min(a + 2 * width, self.budget.exp_lb_ceiling), 2))
            tail_lb = values[-1] + 2 if values else a
            if tail_lb > self.budget.exp_lb_ceiling:
                return None
        children = []
        for a in values:
            children.append(self.solve_with_d(case.with_slot(i, replace(s, exp_exact=a, exp_lb=a))))
        tail_case = case.with_slot(i, replace(s, exp_lb=tail_lb))
        children.append(self.solve_with_d(tail_case))
        return {
            "reason": f"slot {i} exponent in {{{', '.join(map(str, values))}}} or >= {tail_lb}",
            "final": {"kind": "exponent-split", "slot": i, "values": values,
                      "tail_lb": tail_lb, "from_lb": s.exp_lb},
            "children": children,
        }


def _products_up_to(primes: list[int], limit: int) -> list[int]:
    """All products > 1 of the given primes (with repetition) up to limit."""
    out: set[int] = set()

    def grow(d: int, idx: int):
        if d > 1:
            out.add(d)
        for j in range(idx, len(primes)):
            nd = d * primes[j]
            while nd <= limit:
                grow(nd, j + 1)
                nd *= primes[j]

    grow(1, 0)
    return sorted(out)


def _smallest_product_above(primes: list[int], dmax: int) -> Optional[int]:
    if not primes:
        return None
    cap = primes[0] * (dmax + 1)
    for d in _products_up_to(primes, cap):
        if d > dmax:
            return d
    return None


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _smallest_factor_below(n: int, bound: int) -> Optional[int]:
    """Smallest prime factor of n that is < bound, or None."""
    d = 2
    while d < bound and d * d <= n:
        if n % d == 0:
            return d
        d += 1 if d == 2 else 2
    if 1 < n < bound:
        return n
    return None


def _ratio_exponent(r: Fraction, p: int) -> Optional[int]:
    """The a with sigma(p^a)/p^a == r, if any."""
    den = r.denominator
    a = 0
    while den % p == 0:
        den //= p
        a += 1
    if den != 1:
        return None
    if sigma_prime_power(p, a) != r.numerator:
        return None
    return a


# --- public, spec-shaped operations ----------------------------------------


def r1_abundancy_eliminate(case: CaseSpec, d_min: int) -> Optional[ElimStep]:
    """Ceiling elimination: sup sigma(n)/n + 1/d_min <= 2 kills the case."""
    return Engine().r1(case, d_min)


def bound_prime_slot(case: CaseSpec, slot_index: int) -> Optional[int]:
    """Largest admissible prime for the slot before R1 fires; None = unbounded."""
    return Engine().bound_slot(case, slot_index)


def feasible_d_values(case: CaseSpec) -> set[int]:
    """Complements D not excluded by the ceiling test (finite by precondition)."""
    got = Engine().feasible_ds(case)
    if got is None:
        raise ValueError("feasible complement set is not finite for this case")
    return set(got[0])


def g_value(case: CaseSpec, D: int, choose: str = "max") -> Fraction:
    """(2 - 1/D) * prod (p-1)/p, the exact value f must equal on a solution.

    Ranged slots contribute their largest admissible prime for choose="max"
    (factor 1 when unbounded: the supremum) and their smallest for "min".
    """
    if D < 1:
        raise ValueError("D must be >= 1")
    out = target(D)
    for s in case.effective_slots():
        if s.prime is not None:
            p = s.prime
        elif choose == "max":
            p = s.hi  # None = unbounded: supremum factor 1
            if p is None:
                continue
        else:
            p = s.lo
        out *= Fraction(p - 1, p)
    return out


def r3_fg_gap_eliminate(case: CaseSpec, D: int) -> Optional[ElimStep]:
    """Literal f/g gap test: min f > max g eliminates the case under D.

    min f takes every slot at its smallest prime and exponent floor; max g
    takes the largest primes (supremum when a range is unbounded, in which
    case the comparison may be non-strict because the sup is unattained).
    """
    from .arith import f_value

    eff = case.effective_slots()
    primes = [s.prime if s.prime is not None else s.lo for s in eff]
    exps = [s.min_exp for s in eff]
    fmin = f_value(primes, exps)
    gmax = g_value(case, D, choose="max")
    attained = all(s.prime is not None or s.hi is not None for s in eff)
    if fmin > gmax or (fmin == gmax and not attained):
        return ElimStep(
            rule="R3-fg-gap", case=case.with_d(D), verdict="eliminated",
            reason="min f exceeds max g",
            witnesses={"final": {
                "kind": "fg-gap", "D": D,
                "f_assignment": [[p, a] for p, a in zip(primes, exps)],
                "f_min": frac_str(fmin),
                "g_assignment": [[s.prime if s.prime is not None else s.hi] for s in eff],
                "g_max": frac_str(gmax), "g_attained": attained,
            }},
        )
    return None


def q_can_divide_sigma_even_exp(p: int, q: int) -> bool:
    """Is there an even a >= 2 with q | sigma(p^a)?  Iff ord_q(p) is odd."""
    if p == q:
        raise ValueError("p and q must be distinct primes")
    if not (is_prime(p) and is_prime(q)) or q == 2:
        raise ValueError("p and q must be primes with q odd")
    return multiplicative_order(p, q) % 2 == 1


def r4_order_parity_eliminate(case: CaseSpec, D: int, q: int) -> Optional[ElimStep]:
    """Forward order-parity elimination for a specific q (all primes fixed)."""
    if not case.all_fixed():
        raise ValueError("R4 requires every prime slot fixed")
    w = Engine()._r4_forward(case.with_d(D), q)
    if w is None:
        return None
    return ElimStep(rule="R4-order-parity", case=case.with_d(D),
                    verdict="eliminated", reason=w["reason"], witnesses={"final": w})


@dataclass(frozen=True)
class ForcingOutcome:
    outcome: str  # "ExponentExcluded" | "SlotForced" | "Inconclusive"
    detail: dict


def r5_sigma_forcing(case: CaseSpec, D: int, slot_index: int, a: int) -> ForcingOutcome:
    """Factor sigma(p^a) against the forced equation sigma(n)*D = (2D-1)*n."""
    if a % 2:
        raise ValueError("exponent must be even")
    analysis = Engine().forcing_analysis(case.with_d(D), slot_index, a)
    name = {"excluded": "ExponentExcluded", "forced": "SlotForced",
            "inconclusive": "Inconclusive"}[analysis["outcome"]]
    return ForcingOutcome(outcome=name, detail=analysis)


def eliminate(case: CaseSpec, budget: Budget = Budget(),
              skip: Optional[Callable[[CaseSpec], bool]] = None) -> ProofTrace:
    """Run the full deterministic elimination and return the proof trace."""
    eng = Engine(budget=budget, skip=skip)
    root = eng.solve(case)
    return ProofTrace(root_case=case, root=root, meta={"nodes": eng.nodes})


def theorem_1_case() -> CaseSpec:
    return CaseSpec(
        slots=(Slot.ranged(3), Slot.ranged(5), Slot.ranged(7), Slot.ranged(11)),
        label="odd dpn, four distinct prime factors",
    )


def theorem_2_case() -> CaseSpec:
    return CaseSpec(
        slots=(Slot.ranged(3), Slot.ranged(5), Slot.ranged(7), Slot.ranged(11),
               Slot.ranged(13)),
        label="odd dpn, five distinct prime factors",
    )


def prove_theorem_1(budget: Budget = Budget()) -> ProofTrace:
    """p1 = 3 and p2 in {5, 7}: eliminate every other (p1, p2) pair.

    The branches p2 = 5 and p2 = 7 are out of the theorem's scope and are
    recorded as Survived leaves without deep exploration.
    """

    def skip(case: CaseSpec) -> bool:
        return len(case.slots) > 1 and case.slots[1].prime in (5, 7)

    return eliminate(theorem_1_case(), budget=budget, skip=skip)


def prove_theorem_2(budget: Budget = Budget()) -> ProofTrace:
    """k = 5: p1 >= 7 is impossible; p1 in {3, 5} is left open."""

    def skip(case: CaseSpec) -> bool:
        return case.slots[0].prime in (3, 5)

    return eliminate(theorem_2_case(), budget=budget, skip=skip)
