"""The printed decimal displays of every f/g bound pair, recomputed exactly."""

from fractions import Fraction

from decimal_fixtures import (
    FG_FIXTURES,
    TYPO_DENOMINATOR,
    TYPO_MISSING_PREFIX,
    rendering_mode,
    round_half_up,
)

import pytest

from dpn.arith import decimal_prefix, f_value


@pytest.mark.parametrize("label,fp,fe,f_printed,f_mode,g,g_printed,g_mode",
                         FG_FIXTURES, ids=[t[0] for t in FG_FIXTURES])
def test_fixture_pair(label, fp, fe, f_printed, f_mode, g, g_printed, g_mode):
    f = f_value(fp, fe)
    # the printed digits must match the exact value under some rendering,
    # and under the specific rendering recorded for this entry
    assert rendering_mode(f, f_printed) == f_mode
    assert rendering_mode(g, g_printed) == g_mode
    # the whole point of each display: the f floor strictly exceeds the g cap
    assert f > g


def test_missing_prefix_typo():
    printed, fp, fe = TYPO_MISSING_PREFIX
    f = f_value(fp, fe)
    # printed without "0.": the digits are right, the prefix is missing
    assert "." not in printed
    assert round_half_up(f, 6) == "0." + printed
    assert decimal_prefix(f, 6) == "0.994788"  # rounded, not truncated


def test_denominator_typo():
    p1, p2, p3, p4 = TYPO_DENOMINATOR["primes"]
    correct = (p1 - 1) * (p2 - 1) * (p3 - 1) * (p4 - 1)
    assert correct == TYPO_DENOMINATOR["correct_denominator"]
    assert correct != TYPO_DENOMINATOR["printed_denominator"]
    # the exclusion the display supports still holds with the corrected value:
    # sup sigma(n)/n + 1/9 < 2 for primes (3,13,17,19)
    sup = Fraction(p1 * p2 * p3 * p4, correct)
    assert sup + Fraction(1, 9) < 2
