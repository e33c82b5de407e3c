"""Unit tests for the individual elimination rules."""

from fractions import Fraction

import pytest
import sympy

from dpn.arith import primes_below
from dpn.cases import CaseSpec, Slot, parse_frac, target
from dpn.eliminator import (
    bound_prime_slot,
    feasible_d_values,
    g_value,
    q_can_divide_sigma_even_exp,
    r1_abundancy_eliminate,
    r3_fg_gap_eliminate,
    r4_order_parity_eliminate,
    r5_sigma_forcing,
)


def case(*specs, D=None):
    slots = []
    for s in specs:
        slots.append(Slot.fixed(s) if isinstance(s, int) else Slot.ranged(*s))
    return CaseSpec(slots=tuple(slots), D=D)


class TestR1:
    def test_p1_at_least_5_impossible(self):
        # sup = (5*7*11*13)/(4*6*10*12) and sup + 1/5 = 5581/2880 < 2
        step = r1_abundancy_eliminate(case((5,), (7,), (11,), (13,)), 5)
        assert step is not None and step.verdict == "eliminated"
        w = step.witnesses["final"]
        assert parse_frac(w["value"]) == Fraction(5 * 7 * 11 * 13, 4 * 6 * 10 * 12)
        assert parse_frac(w["total"]) == Fraction(5581, 2880)
        assert Fraction(5581, 2880) < 2
        assert not w["attained"]  # the sup is a strict bound

    def test_p1_3_not_eliminated(self):
        assert r1_abundancy_eliminate(case(3, (5,), (7,), (11,)), 3) is None


class TestSlotBounds:
    def test_p2_bound(self):
        assert bound_prime_slot(case(3, (5,), (7,), (11,)), 1) == 23

    @pytest.mark.parametrize("p2,expected", [(19, 37), (17, 43), (13, 73),
                                             (11, 197), (23, 29)])
    def test_p3_bound(self, p2, expected):
        c = case(3, p2, (p2 + 2,), (p2 + 4,))
        assert bound_prime_slot(c, 2) == expected

    def test_bound_matches_direct_check(self):
        # the returned prime survives the ceiling test; the next one dies
        c = case(3, 19, (23,), (29,))
        b = bound_prime_slot(c, 2)
        alive = case(3, 19, b, (sympy.nextprime(b),))
        assert r1_abundancy_eliminate(alive, 3) is None
        p = sympy.nextprime(b)
        dead = case(3, 19, p, (sympy.nextprime(p),))
        assert r1_abundancy_eliminate(dead, 3) is not None


class TestR2:
    def test_feasible_complements(self):
        assert feasible_d_values(case(3, 19, (23, 37), (29, 41))) == {3}
        assert feasible_d_values(case(3, 23, 29, (31, 37))) == {3}
        assert feasible_d_values(case(3, 11, 13, (17, 19))) == {3, 9}

    def test_unbounded_raises(self):
        with pytest.raises(ValueError):
            feasible_d_values(case((3,), (5,), (7,), (11,)))


class TestR3:
    def test_g_value_products(self):
        # g = (2 - 1/D) * prod (p-1)/p at the largest admissible primes
        assert g_value(case(3, 19, (23, 37), (29, 41)), 3) == \
            Fraction(2**2 * 5 * 36 * 40, 19 * 37 * 41)
        assert g_value(case(3, 17, (19, 41), (23, 43)), 3) == \
            Fraction(2**5 * 5 * 40 * 42, 3**2 * 17 * 41 * 43)
        # unbounded final slot: the supremum drops the (p-1)/p factor
        assert g_value(case(3, 11, 13, (17,)), 3) == Fraction(2**4 * 5**2, 3 * 11 * 13)

    def test_gap_eliminates(self):
        step = r3_fg_gap_eliminate(case(3, 13, (17, 29), (19, 31)), 3)
        assert step is not None and step.rule == "R3-fg-gap"
        w = step.witnesses["final"]
        assert parse_frac(w["f_min"]) > parse_frac(w["g_max"])

    def test_no_gap_returns_none(self):
        assert r3_fg_gap_eliminate(case(3, (5,), (7,), (11,)), 3) is None


class TestR4:
    def test_q_can_divide_brute_force(self):
        # q | sigma(p^a) for some even a iff ord_q(p) is odd
        for p in primes_below(60):
            for q in primes_below(60):
                if p == q or q == 2:
                    continue
                # sigma(p^a) mod q is periodic in a; scanning one full period
                # of p modulo q (times q, for the p = 1 mod q case) is
                # exhaustive.  sigma(p^(a+2)) = p^2 sigma(p^a) + p + 1.
                bound = 2 * q * sympy.n_order(p, q) + 2
                found = False
                s = (1 + p + p * p) % q
                for a in range(2, bound + 1, 2):
                    if s == 0:
                        found = True
                        break
                    s = (s * p * p + p + 1) % q
                assert q_can_divide_sigma_even_exp(p, q) == found, (p, q)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            q_can_divide_sigma_even_exp(3, 3)
        with pytest.raises(ValueError):
            q_can_divide_sigma_even_exp(3, 2)
        with pytest.raises(ValueError):
            q_can_divide_sigma_even_exp(9, 5)

    def test_forward_elimination_examples(self):
        step = r4_order_parity_eliminate(case(3, 17, 43, 47), 3, 5)
        assert step is not None
        assert step.witnesses["final"]["orders"] == [[3, 4], [17, 4], [43, 4], [47, 4]]

        step = r4_order_parity_eliminate(case(3, 11, 13, 17), 9, 17)
        assert step is not None
        assert step.witnesses["final"]["orders"] == [[3, 16], [11, 16], [13, 4]]

    def test_requires_all_fixed(self):
        with pytest.raises(ValueError):
            r4_order_parity_eliminate(case(3, 17, 43, (47,)), 3, 5)


class TestR5:
    def _pinned_case(self, hi):
        return CaseSpec(slots=(Slot.fixed(3), Slot.fixed(11), Slot.fixed(191),
                               Slot.ranged(193, hi)))

    def test_forced_prime_out_of_range(self):
        # sigma(3^6) = 1093 forces the open slot to 1093, beyond its cap
        out = r5_sigma_forcing(self._pinned_case(197), 3, 0, 6)
        assert out.outcome == "ExponentExcluded"
        assert out.detail["why"] == "forced-prime-out-of-range"
        assert out.detail["forced"] == 1093

    def test_slot_forced_when_unbounded(self):
        out = r5_sigma_forcing(self._pinned_case(None), 3, 0, 6)
        assert out.outcome == "SlotForced"
        assert out.detail["forced"] == 1093

    def test_small_factor_exclusion(self):
        # sigma(3^2) = 13: under D = 3 with slots (3, 19, p3, p4), 13 fits nowhere
        c = CaseSpec(slots=(Slot.fixed(3), Slot.fixed(19),
                            Slot.ranged(23), Slot.ranged(29)))
        out = r5_sigma_forcing(c, 3, 0, 2)
        assert out.outcome == "ExponentExcluded"
        assert out.detail["why"] == "small-factor"
        assert out.detail["factor"] == 13

    def test_inconclusive(self):
        # sigma(3^4) = 121 = 11^2 and 11 is a slot prime here
        c = CaseSpec(slots=(Slot.fixed(3), Slot.fixed(11),
                            Slot.ranged(13), Slot.ranged(17)))
        out = r5_sigma_forcing(c, 3, 0, 4)
        assert out.outcome == "Inconclusive"

    def test_rejects_odd_exponent(self):
        with pytest.raises(ValueError):
            r5_sigma_forcing(self._pinned_case(197), 3, 0, 3)


def test_target_value():
    assert target(3) == Fraction(5, 3)
    assert target(9) == Fraction(17, 9)
