import pytest

from dpn.arith import factorize, sigma_of
from dpn.classify import (
    classify,
    complement_identity_holds,
    has_all_even_exponents,
)


class TestClassify:
    def test_reference_value(self):
        c = classify(9018009)
        assert c.kind == "deficient"
        rec = c.deficient_perfect
        assert rec is not None
        assert rec.d == 819
        assert rec.D == 11011
        assert not rec.degenerate
        assert not c.almost_perfect
        assert complement_identity_holds(rec)

    def test_one_is_degenerate(self):
        c = classify(1)
        rec = c.deficient_perfect
        assert rec is not None and rec.d == 1 and rec.D == 1
        assert rec.degenerate

    def test_powers_of_two_almost_perfect(self):
        for k in range(1, 12):
            c = classify(2**k)
            assert c.deficient_perfect is not None
            assert c.deficient_perfect.d == 1
            assert c.almost_perfect

    def test_perfect_numbers(self):
        for n in (6, 28, 496, 8128):
            c = classify(n)
            assert c.kind == "perfect"
            assert c.deficient_perfect is None
            assert c.near_perfect_divisor is None

    def test_near_perfect(self):
        # sigma(12) = 28 = 2*12 + 4 and 4 | 12
        c = classify(12)
        assert c.kind == "abundant"
        assert c.near_perfect_divisor == 4
        assert classify(20).near_perfect_divisor == 2
        assert classify(18).near_perfect_divisor == 3
        assert classify(10).near_perfect_divisor is None  # deficient side

    def test_small_scan_against_definition(self):
        for n in range(1, 2000):
            c = classify(n)
            s = sigma_of(n)
            is_dpn = (2 * n - s) > 0 and n % (2 * n - s) == 0
            assert (c.deficient_perfect is not None) == is_dpn, n
            if c.deficient_perfect is not None:
                assert complement_identity_holds(c.deficient_perfect)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            classify(0)


def test_even_exponent_helper():
    assert has_all_even_exponents(factorize(9018009))
    assert has_all_even_exponents(factorize(1))
    assert not has_all_even_exponents(factorize(12))
