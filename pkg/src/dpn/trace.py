"""Independent re-verification of proof traces.

check_trace re-derives every recorded witness from scratch (exact rational
arithmetic, fresh primality tests, fresh order computations) and confirms
both the arithmetic and the logical force of each step.  It never re-runs
the elimination search, so a trace is an auditable certificate: tampering
with any number in it is detected.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .arith import (
    factorize,
    is_prime,
    multiplicative_order,
    next_prime,
    primes_in,
    sigma_prime_power,
    _perfect_power,
)
from .cases import CaseSpec, ElimStep, EmptyCase, ProofTrace, parse_frac, target
from .eliminator import _smallest_factor_below, _valuation, ratio


class TraceCheckError(Exception):
    """A witness failed re-verification; .path locates the offending node."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def check_trace(trace: ProofTrace) -> int:
    """Re-verify every witness; returns the node count, raises on failure."""
    if trace.root.case.to_obj() != trace.root_case.to_obj():
        raise TraceCheckError("root", "root case does not match the trace header")
    return _check_node(trace.root, "root")


def _check_node(node: ElimStep, path: str) -> int:
    if node.verdict not in ("eliminated", "survived", "branch"):
        raise TraceCheckError(path, f"unknown verdict {node.verdict!r}")
    for i, ref in enumerate(node.witnesses.get("refinements", [])):
        _check_refinement(node.case, ref, f"{path}.refinements[{i}]")
    branch = node.witnesses.get("branch")
    if branch is not None:
        _check_branch_cover(node, branch, path)
    final = node.witnesses.get("final")
    if node.verdict == "eliminated":
        if final is None and not node.children:
            raise TraceCheckError(path, "eliminated leaf carries no witness")
        if final is not None:
            _check_final(node, final, path)
        elif not all(c.verdict == "eliminated" for c in node.children):
            raise TraceCheckError(path, "eliminated branch has a non-eliminated child")
    elif node.verdict == "branch":
        if not node.children:
            raise TraceCheckError(path, "branch node without children")
    count = 1
    for i, c in enumerate(node.children):
        count += _check_node(c, f"{path}.children[{i}]")
    return count


# --- witness checkers --------------------------------------------------------


def _check_final(node: ElimStep, w: dict, path: str) -> None:
    kind = w.get("kind")
    if kind == "interval":
        _check_interval(node.case, w, path,
                        require_exclusion=node.verdict == "eliminated")
    elif kind == "empty":
        _check_empty(node.case, path)
    elif kind == "forcing":
        if node.verdict != "eliminated" or w["analysis"]["outcome"] != "excluded":
            raise TraceCheckError(path, "forcing witness must record an exclusion")
        _check_forcing(w["analysis"], path)
    elif kind == "order-parity":
        _check_order_parity(node.case, w, path)
    elif kind == "point":
        _check_point(node.case, w, path, node.verdict)
    elif kind == "pinned-exponent":
        _check_pinned_exponent(node.case, w, path, node.verdict)
    elif kind == "open-slot-window":
        _check_open_window(node.case, w, path, node.verdict)
    elif kind == "fg-gap":
        _check_fg_gap(node.case, w, path)
    elif kind in ("prime-slot", "complement", "exponent-split"):
        _check_branch_cover(node, w, path)
    else:
        raise TraceCheckError(path, f"unknown witness kind {kind!r}")


def _recompute_factors(factors) -> tuple[Fraction, bool]:
    value = Fraction(1)
    attained = True
    for p, a in factors:
        if p is None:
            attained = False
        elif a is None:
            value *= Fraction(p, p - 1)
            attained = False
        else:
            value *= ratio(p, a)
    return value, attained


def _check_interval(case: CaseSpec, w: dict, path: str, require_exclusion: bool) -> None:
    value, attained = _recompute_factors(w["factors"])
    if parse_frac(w["value"]) != value or bool(w["attained"]) != attained:
        raise TraceCheckError(path, "interval witness arithmetic mismatch")
    _check_factors_match_case(case, w, path)
    if "d_min" in w:
        dmin = w["d_min"]
        if dmin < case.min_primes()[0]:
            raise TraceCheckError(path, f"d_min {dmin} below the smallest slot prime")
        t = 2 - Fraction(1, dmin)
    else:
        t = parse_frac(w["target"])
        if case.D is not None and t != target(case.D):
            raise TraceCheckError(path, "target does not match the case complement")
    if not require_exclusion:
        return
    side = w["side"]
    if side == "above":
        ok = t > value or (t == value and not attained)
    elif side == "below":
        ok = t < value or (t == value and not attained)
    else:
        raise TraceCheckError(path, f"unknown interval side {side!r}")
    if not ok:
        raise TraceCheckError(path, "interval witness does not exclude the target")


def _check_factors_match_case(case: CaseSpec, w: dict, path: str) -> None:
    """The claimed extremal assignment must lie at the case's boundary."""
    try:
        eff = case.effective_slots()
    except EmptyCase:
        raise TraceCheckError(path, "interval witness on an empty case")
    factors = w["factors"]
    if len(factors) != len(eff):
        raise TraceCheckError(path, "factor count does not match slot count")
    side = w["side"]
    for i, ((p, a), s) in enumerate(zip(factors, eff)):
        if s.prime is not None:
            if p != s.prime:
                raise TraceCheckError(path, f"slot {i}: prime {p} != fixed {s.prime}")
            want = s.exp_exact if s.exp_exact is not None else (
                None if side == "above" else s.min_exp)
            if a != want:
                raise TraceCheckError(path, f"slot {i}: exponent {a} not extremal")
        else:
            if side == "above":
                if p != s.lo or a != s.exp_exact:
                    raise TraceCheckError(path, f"slot {i}: sup must sit at lo={s.lo}")
            else:
                if s.hi is None:
                    if p is not None:
                        raise TraceCheckError(path, f"slot {i}: unbounded inf must be 1")
                elif p != s.hi or a != s.min_exp:
                    raise TraceCheckError(path, f"slot {i}: inf must sit at hi={s.hi}")


def _check_empty(case: CaseSpec, path: str) -> None:
    try:
        case.effective_slots()
    except EmptyCase:
        return
    raise TraceCheckError(path, "case claimed empty but admits prime tuples")


def _check_complement_cover(node: ElimStep, w: dict, path: str) -> None:
    from .eliminator import _products_up_to, _smallest_product_above

    case = node.case
    dmax, ds, infeasible = w["Dmax"], w["Ds"], w["infeasible"]
    for s in case.effective_slots():
        if s.prime is None and s.lo <= dmax + 2:
            raise TraceCheckError(path, "a ranged slot could contribute to D")
    fixed = list(case.fixed_primes())
    for D in _products_up_to(fixed, dmax):
        if D not in ds and D not in infeasible:
            raise TraceCheckError(path, f"admissible complement D={D} unaccounted for")
    if w["boundary"] != _smallest_product_above(fixed, dmax):
        raise TraceCheckError(path, "boundary complement is not the smallest above Dmax")
    expect = list(infeasible)
    if w["boundary"] is not None:
        expect.append(w["boundary"])
    r2 = [c for c in node.children if c.rule == "R2-D-bound"]
    if [c.case.D for c in r2] != expect:
        raise TraceCheckError(path, "R2 children do not match the excluded complements")
    solved = [c.case.D for c in node.children if c.rule != "R2-D-bound"]
    if solved != ds:
        raise TraceCheckError(path, f"children cover D={solved}, expected {ds}")


def _check_order_parity(case: CaseSpec, w: dict, path: str) -> None:
    D = w["D"]
    if case.D != D:
        raise TraceCheckError(path, "witness complement differs from case")
    if not case.all_fixed():
        raise TraceCheckError(path, "order-parity requires all primes fixed")
    orders = {p: o for p, o in w["orders"]}
    if w["direction"] == "forward":
        q = w["q"]
        if not is_prime(q) or q == 2:
            raise TraceCheckError(path, f"q={q} is not an odd prime")
        min_aq = 0
        for s in case.slots:
            if s.prime == q:
                min_aq = s.min_exp
            else:
                o = orders.get(s.prime)
                if o is None:
                    raise TraceCheckError(path, f"missing order for slot prime {s.prime}")
                if multiplicative_order(s.prime, q) != o:
                    raise TraceCheckError(path, f"ord_{q}({s.prime}) != {o}")
                if o % 2:
                    raise TraceCheckError(path, f"ord_{q}({s.prime}) is odd: no force")
        if _valuation(D, q) != w["vq_D"] or _valuation(2 * D - 1, q) != w["vq_2D1"]:
            raise TraceCheckError(path, "valuation mismatch")
        if w["min_aq"] != min_aq:
            raise TraceCheckError(path, "min exponent of the q-slot mismatch")
        if w["vq_D"] >= w["vq_2D1"] + min_aq:
            raise TraceCheckError(path, "valuations balance: rule does not apply")
    elif w["direction"] == "reverse":
        P = w["slot_prime"]
        if P not in case.fixed_primes():
            raise TraceCheckError(path, f"{P} is not a slot prime")
        need = set(q for q, _ in factorize(2 * D - 1))
        need |= {s.prime for s in case.slots if s.prime != P}
        if need - set(orders):
            raise TraceCheckError(path, f"allowed primes missing orders: {sorted(need - set(orders))}")
        for r, o in orders.items():
            if multiplicative_order(P, r) != o:
                raise TraceCheckError(path, f"ord_{r}({P}) != {o}")
            if o % 2:
                raise TraceCheckError(path, f"ord_{r}({P}) odd: {r} could divide")
    else:
        raise TraceCheckError(path, f"unknown direction {w['direction']!r}")


def _check_point(case: CaseSpec, w: dict, path: str, verdict: str) -> None:
    value = Fraction(1)
    for (p, a), s in zip(w["factors"], case.slots):
        if s.prime != p or s.exp_exact != a:
            raise TraceCheckError(path, "point witness does not match the case")
        value *= ratio(p, a)
    if parse_frac(w["value"]) != value:
        raise TraceCheckError(path, "point value mismatch")
    t = parse_frac(w["target"])
    if case.D is None or t != target(case.D):
        raise TraceCheckError(path, "point target mismatch")
    if verdict == "eliminated" and value == t:
        raise TraceCheckError(path, "claimed mismatch but abundancy matches")
    if verdict == "survived" and value != t:
        raise TraceCheckError(path, "claimed solution but abundancy differs")


def _check_pinned_exponent(case: CaseSpec, w: dict, path: str, verdict: str) -> None:
    i = w["slot"]
    s = case.slots[i]
    if s.prime != w["p"]:
        raise TraceCheckError(path, "slot prime mismatch")
    K = Fraction(1)
    others = [sl for j, sl in enumerate(case.slots) if j != i]
    if len(w["K_factors"]) != len(others):
        raise TraceCheckError(path, "K factor count mismatch")
    for (p, a), sl in zip(w["K_factors"], others):
        if sl.prime != p or sl.exp_exact != a:
            raise TraceCheckError(path, "K factors do not match the case")
        K *= ratio(p, a)
    if parse_frac(w["K"]) != K:
        raise TraceCheckError(path, "K value mismatch")
    t = parse_frac(w["target"])
    if case.D is None or t != target(case.D):
        raise TraceCheckError(path, "target mismatch")
    r = t / K
    if parse_frac(w["r"]) != r:
        raise TraceCheckError(path, "forced ratio mismatch")
    a = _ratio_exponent_checked(r, s.prime)
    admissible = a is not None and a % 2 == 0 and a >= s.exp_lb
    if verdict == "eliminated" and admissible:
        raise TraceCheckError(path, f"exponent a={a} actually satisfies the ratio")
    if verdict == "survived" and not admissible:
        raise TraceCheckError(path, "claimed solution but no admissible exponent")


def _ratio_exponent_checked(r: Fraction, p: int) -> Optional[int]:
    den = r.denominator
    a = 0
    while den % p == 0:
        den //= p
        a += 1
    if den != 1 or sigma_prime_power(p, a) != r.numerator:
        return None
    return a


def _check_open_window(case: CaseSpec, w: dict, path: str, verdict: str) -> None:
    i = w["slot"]
    if case.slots[i].prime is not None:
        raise TraceCheckError(path, "window slot is not open")
    K_lo, K_hi = Fraction(1), Fraction(1)
    hi_attained = True
    others = [sl for j, sl in enumerate(case.slots) if j != i]
    for (p, a), (ph, ah), sl in zip(w["K_lo_factors"], w["K_hi_factors"], others):
        if sl.prime != p or sl.min_exp != a or ph != p:
            raise TraceCheckError(path, "K bound factors do not match the case")
        K_lo *= ratio(p, a)
        if ah is None:
            K_hi *= Fraction(p, p - 1)
            hi_attained = False
        else:
            if sl.exp_exact != ah:
                raise TraceCheckError(path, "K_hi exponent not the case's exact value")
            K_hi *= ratio(p, ah)
    if parse_frac(w["K_lo"]) != K_lo or parse_frac(w["K_hi"]) != K_hi:
        raise TraceCheckError(path, "K bounds mismatch")
    if bool(w["K_hi_attained"]) != hi_attained:
        raise TraceCheckError(path, "K_hi attainment mismatch")
    t = parse_frac(w["target"])
    if case.D is None or t != target(case.D):
        raise TraceCheckError(path, "target mismatch")
    r_hi, r_lo = t / K_lo, t / K_hi
    if parse_frac(w["r_hi"]) != r_hi or parse_frac(w["r_lo"]) != r_lo:
        raise TraceCheckError(path, "ratio window mismatch")
    if verdict == "eliminated" and "window" not in w:
        if r_hi > 1:
            raise TraceCheckError(path, "claimed ratio <= 1 but it exceeds 1")
        return
    if r_lo <= 1:
        raise TraceCheckError(path, "window witness requires r_lo > 1")
    sl = case.effective_slots()[i]
    m_min = max(sl.lo, int(1 / (r_hi - 1)) - 1) if r_hi > 1 else sl.lo
    m_max = int(r_lo / (r_lo - 1))
    if sl.hi is not None:
        m_max = min(m_max, sl.hi)
    if w["window"] != [m_min, m_max]:
        raise TraceCheckError(path, "window endpoints mismatch")
    checked = {m: v for m, v in w["checked"]}
    exp_lb = w["exp_lb"]
    exact = K_lo == K_hi and hi_attained
    for m in range(m_min, m_max + 1):
        v = checked.get(m)
        if v is None:
            raise TraceCheckError(path, f"window integer {m} unaccounted for")
        _check_window_entry(m, v, sl, r_lo, r_hi, hi_attained, exp_lb, exact, path)
        if v == "candidate" and verdict == "eliminated":
            raise TraceCheckError(path, f"candidate {m} contradicts elimination")


def _check_window_entry(m, v, sl, r_lo, r_hi, hi_attained, exp_lb, exact, path):
    if v == "out-of-range":
        if 2 <= m and sl.lo <= m and (sl.hi is None or m <= sl.hi):
            raise TraceCheckError(path, f"{m} is in range, not out-of-range")
    elif v == "ratio-too-small":
        f = Fraction(m, m - 1)
        if f > r_lo and not (f == r_lo and not hi_attained):
            raise TraceCheckError(path, f"{m}: sup ratio is not too small")
    elif v == "ratio-too-large":
        if ratio(m, max(exp_lb, sl.min_exp)) <= r_hi:
            raise TraceCheckError(path, f"{m}: floor ratio is not too large")
    elif v == "not-prime":
        if is_prime(m):
            raise TraceCheckError(path, f"{m} is prime")
    elif v == "no-exact-match":
        if not exact:
            raise TraceCheckError(path, f"{m}: exact-match exclusion needs a point ratio")
        a = _ratio_exponent_checked(r_hi, m)
        if a is not None and a % 2 == 0 and a >= exp_lb:
            raise TraceCheckError(path, f"{m}: exponent {a} actually matches")
    elif v == "candidate":
        pass
    else:
        raise TraceCheckError(path, f"unknown window verdict {v!r}")


def _check_fg_gap(case: CaseSpec, w: dict, path: str) -> None:
    from .arith import f_value

    D = w["D"]
    eff = case.effective_slots()
    primes = [p for p, _ in w["f_assignment"]]
    exps = [a for _, a in w["f_assignment"]]
    for (p, a), s in zip(zip(primes, exps), eff):
        want_p = s.prime if s.prime is not None else s.lo
        if p != want_p or a != s.min_exp:
            raise TraceCheckError(path, "f assignment is not the case minimum")
    fmin = f_value(primes, exps)
    gmax = target(D)
    attained = True
    for [p], s in zip(w["g_assignment"], eff):
        want = s.prime if s.prime is not None else s.hi
        if p != want:
            raise TraceCheckError(path, "g assignment is not the case maximum")
        if p is None:
            attained = False
            continue
        gmax *= Fraction(p - 1, p)
    if parse_frac(w["f_min"]) != fmin or parse_frac(w["g_max"]) != gmax:
        raise TraceCheckError(path, "f/g values mismatch")
    if not (fmin > gmax or (fmin == gmax and not attained)):
        raise TraceCheckError(path, "f/g gap does not eliminate")


def _check_branch_cover(node: ElimStep, w: dict, path: str) -> None:
    """Branch children must exhaustively cover the parent case.

    Forced side-branches (R5 sub-cases) always precede the covering
    children, so the cover is the tail of the child list.  Children record
    their case *after* in-node refinements, so only the branched slot is
    compared; refinements are themselves checked on each child.
    """
    case = node.case
    kind = w["kind"]
    if kind == "prime-slot":
        main_children = node.children[-len(w["primes"]):]
    elif kind == "exponent-split":
        main_children = node.children[-(len(w["values"]) + 1):]
    else:
        main_children = node.children
    if kind == "prime-slot":
        i, primes = w["slot"], w["primes"]
        eff = case.effective_slots()
        if primes != primes_in(eff[i].lo, primes[-1]):
            raise TraceCheckError(path, "branch primes leave a gap below the bound")
        if next_prime(w["bound"]) != primes[-1]:
            raise TraceCheckError(path, "stored bound inconsistent with the branch")
        got = [c.case.slots[i].prime for c in main_children]
        if got != primes:
            raise TraceCheckError(path, f"children cover {got}, expected {primes}")
        beyond = w["beyond"]
        _check_interval_arith_only(beyond, path)
        # the beyond witness must sit at the next prime past the last branch;
        # larger primes only shrink the sup further (monotonicity)
        if beyond["factors"][i][0] != next_prime(primes[-1]):
            raise TraceCheckError(path, "beyond witness not at the next prime")
        _check_exclusion(beyond, path)
    elif kind == "complement":
        _check_complement_cover(node, w, path)
    elif kind == "exponent-split":
        i, values, tail = w["slot"], w["values"], w["tail_lb"]
        lb = w["from_lb"]
        if values != list(range(lb, tail, 2)):
            raise TraceCheckError(path, "exponent split does not cover all even values")
        got_exact = [c.case.slots[i].exp_exact for c in main_children[:-1]]
        if got_exact != values:
            raise TraceCheckError(path, f"children pin exponents {got_exact}, expected {values}")
        tail_child = main_children[-1]
        if tail_child.case.slots[i].exp_exact is not None or \
                tail_child.case.slots[i].exp_lb < tail:
            raise TraceCheckError(path, "tail child does not resume at the split point")


def _check_interval_arith_only(w: dict, path: str) -> None:
    value, attained = _recompute_factors(w["factors"])
    if parse_frac(w["value"]) != value or bool(w["attained"]) != attained:
        raise TraceCheckError(path, "interval arithmetic mismatch")


def _check_exclusion(w: dict, path: str) -> None:
    t = parse_frac(w["target"])
    value = parse_frac(w["value"])
    side = w["side"]
    attained = bool(w["attained"])
    ok = (t > value or (t == value and not attained)) if side == "above" else \
         (t < value or (t == value and not attained))
    if not ok:
        raise TraceCheckError(path, "witness does not exclude the target")


def _check_refinement(case: CaseSpec, ref: dict, path: str) -> None:
    kind = ref.get("kind")
    if kind == "truncated-interval":
        w = ref["witness"]
        _check_interval_arith_only(w, path)
        _check_exclusion(w, path)
        # the pinned exponent must appear in the witness factors
        i, a = ref["slot"], ref["a"]
        if w["factors"][i][1] != a:
            raise TraceCheckError(path, "pinned exponent missing from the witness")
    elif kind == "forcing":
        _check_forcing(ref["analysis"], path)
    elif kind == "forced-branch":
        _check_forcing(ref["analysis"], path)
    elif kind == "forced-slot":
        if ref["analysis"]["outcome"] != "forced":
            raise TraceCheckError(path, "forced-slot refinement without a forced prime")
        _check_forcing(ref["analysis"], path)
    elif kind == "scan-capped":
        pass
    elif kind == "slot-bound":
        _check_interval_arith_only(ref["beyond"], path)
        _check_exclusion(ref["beyond"], path)
    else:
        raise TraceCheckError(path, f"unknown refinement kind {kind!r}")


def _check_forcing(a: dict, path: str) -> None:
    p, e = a["p"], a["a"]
    sig = sigma_prime_power(p, e)
    if str(sig) != a["sigma"]:
        raise TraceCheckError(path, f"sigma({p}^{e}) != {a['sigma']}")
    rem = sig
    for q in a["slot_primes"]:
        while rem % q == 0:
            rem //= q
    for q, cap in a["coeff_primes"]:
        c = cap
        while c > 0 and rem % q == 0:
            rem //= q
            c -= 1
    if str(rem) != a["remainder"]:
        raise TraceCheckError(path, f"forcing remainder mismatch for {p}^{e}")
    why = a.get("why")
    outcome = a["outcome"]
    if outcome == "excluded":
        if why == "leftover":
            if rem == 1:
                raise TraceCheckError(path, "leftover exclusion with remainder 1")
        elif why == "small-factor":
            f = a["factor"]
            if rem % f != 0 or not is_prime(f):
                raise TraceCheckError(path, f"small factor {f} invalid")
            if f >= a["min_open_lo"]:
                raise TraceCheckError(path, f"factor {f} not below the open ranges")
        elif why == "multiple-outside-primes":
            root, _ = _perfect_power(rem)
            if is_prime(root):
                raise TraceCheckError(path, "remainder is a prime power after all")
        elif why == "forced-prime-out-of-range":
            root, _ = _perfect_power(rem)
            lo, hi = a["range"]
            if root != a["forced"] or not is_prime(root):
                raise TraceCheckError(path, "forced prime mismatch")
            if lo <= root and (hi is None or root <= hi):
                raise TraceCheckError(path, "forced prime is in range")
        else:
            raise TraceCheckError(path, f"unknown exclusion reason {why!r}")
    elif outcome == "forced":
        root, _ = _perfect_power(rem)
        if root != a["forced"] or not is_prime(root):
            raise TraceCheckError(path, "forced prime does not match the remainder")
