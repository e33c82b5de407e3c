"""Printed-digit fixtures for the f/g bound computations the eliminator replays.

Each entry records one f lower bound (a product of factors 1 - 1/p^(a+1))
and the matching g upper bound (an explicit rational), together with the
decimal digits printed in the case analysis being replayed.  The printed
decimals are inconsistently rendered: some are truncated at the printed
digit count, others rounded half-up, so each entry records which rendering
the printed string matches ("trunc" or "round").  A genuinely wrong digit
matches neither and fails the suite.
"""

from fractions import Fraction

from dpn.arith import decimal_prefix


def round_half_up(x: Fraction, digits: int) -> str:
    scaled = (x.numerator * 10**digits * 2 + x.denominator) // (2 * x.denominator)
    s = str(scaled).rjust(digits + 1, "0")
    return s[:-digits] + "." + s[-digits:]


def rendering_mode(x: Fraction, printed: str) -> str:
    """'trunc', 'round', or 'neither' for the printed decimal string."""
    digits = len(printed.split(".")[1])
    if printed == decimal_prefix(x, digits):
        return "trunc"
    if printed == round_half_up(x, digits):
        return "round"
    return "neither"


# (label, f primes, f exponents a (factor 1 - 1/p^(a+1)), printed f digits,
#  expected f rendering, exact g value, printed g digits, expected g rendering)
FG_FIXTURES = [
    ("p2=19, 23<=p3<=37", (3, 19, 23, 29), (6, 2, 2, 2), "0.999274", "round",
     Fraction(2**2 * 5 * 36 * 40, 19 * 37 * 41), "0.999202", "trunc"),
    ("p2=17, 19<=p3<=41", (3, 17, 19, 23), (6, 2, 2, 2), "0.999111", "trunc",
     Fraction(2**5 * 5 * 40 * 42, 3**2 * 17 * 41 * 43), "0.996519", "round"),
    ("p2=13, 17<=p3<=29", (3, 13, 17, 19), (2, 2, 2, 2), "0.962188", "trunc",
     Fraction(2**3 * 5 * 28 * 30, 3 * 13 * 29 * 31), "0.95833", "round"),
    ("p2=13, p3>=31", (3, 13, 31, 37), (6, 2, 2, 2), "0.999035", "round",
     Fraction(2**3 * 5 * 72 * 78, 3 * 13 * 73 * 79), "0.998786", "trunc"),
    ("p2=11, p3<=127", (3, 11, 17, 19), (4, 2, 2, 2), "0.994789", "round",
     Fraction(2**2 * 5**2 * 126 * 130, 3**2 * 11 * 127 * 131), "0.994497", "trunc"),
    ("p2=11, 127<=p3<=137", (3, 11, 127, 131), (4, 4, 2, 2), "0.995878", "round",
     Fraction(2**2 * 5**2 * 136 * 138, 3**2 * 11 * 137 * 139), "0.995514", "trunc"),
    ("p2=11, 139<=p3<=181", (3, 11, 139, 149), (6, 4, 2, 2), "0.999536", "round",
     Fraction(2**2 * 5**2 * 180 * 190, 3**2 * 11 * 181 * 191), "0.999261", "trunc"),
    ("p2=11, p3 in {191,193}", (3, 11, 191, 193), (8, 4, 2, 2), "0.999943", "round",
     Fraction(2**2 * 5**2 * 192 * 196, 3**2 * 11 * 193 * 197), "0.999766", "trunc"),
    ("p2=11, p3=13, D=3", (3, 11, 13, 17), (2, 2, 2, 2), "0.961606", "round",
     Fraction(2**4 * 5**2, 3 * 11 * 13), "0.932401", "round"),
]

# The p2=11, p3<=127 f bound is printed as bare digits "994789" with the
# leading "0." dropped; the digits themselves are correct (rounded).
TYPO_MISSING_PREFIX = ("994789", (3, 11, 17, 19), (4, 2, 2, 2))

# The D >= 9 exclusion for primes (3, 13, 17, 19) prints its denominator as
# 2.12.18.18, but the correct product of p-1 factors is 2.12.16.18.
TYPO_DENOMINATOR = {
    "primes": (3, 13, 17, 19),
    "printed_denominator": 2 * 12 * 18 * 18,
    "correct_denominator": 2 * 12 * 16 * 18,
}
