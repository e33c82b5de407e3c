"""Classification of integers into the perfect / deficient-perfect family."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .arith import Factorization, abundancy, factorize, sigma


@dataclass(frozen=True)
class DpnRecord:
    """A verified deficient perfect number n with sigma(n) = 2n - d, d | n."""

    n: int
    factorization: Factorization
    d: int
    D: int  # complement n/d; satisfies sigma(n)/n + 1/D = 2 exactly

    def __post_init__(self):
        if self.n % self.d != 0 or self.D != self.n // self.d:
            raise ValueError("d must divide n with D = n/d")
        if sigma(self.factorization) != 2 * self.n - self.d:
            raise ValueError("sigma(n) != 2n - d")

    @property
    def degenerate(self) -> bool:
        """True only for n = 1 (d = n admitted by the definition)."""
        return self.d == self.n


@dataclass(frozen=True)
class Classification:
    kind: str  # "deficient" | "perfect" | "abundant"
    deficient_perfect: Optional[DpnRecord]
    near_perfect_divisor: Optional[int]
    almost_perfect: bool


def classify(n: int) -> Classification:
    """Classify n by the sign of sigma(n) - 2n and extract witness divisors.

    deficient_perfect is set iff delta = 2n - sigma(n) is a positive divisor
    of n (d = n allowed, occurring only at n = 1); near_perfect_divisor iff
    sigma(n) - 2n is a positive *proper* divisor of n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    f = factorize(n)
    s = sigma(f)
    if s < 2 * n:
        kind = "deficient"
    elif s == 2 * n:
        kind = "perfect"
    else:
        kind = "abundant"

    record = None
    delta = 2 * n - s
    if delta > 0 and n % delta == 0:
        record = DpnRecord(n=n, factorization=f, d=delta, D=n // delta)

    near = None
    excess = s - 2 * n
    if 0 < excess < n and n % excess == 0:
        near = excess

    return Classification(
        kind=kind,
        deficient_perfect=record,
        near_perfect_divisor=near,
        almost_perfect=record is not None and record.d == 1,
    )


def has_all_even_exponents(f: Factorization) -> bool:
    return all(a % 2 == 0 for _, a in f)


def complement_identity_holds(rec: DpnRecord) -> bool:
    """sigma(n)/n + 1/D = 2 exactly (integer form sigma(n)*D = (2D-1)*n)."""
    return abundancy(rec.factorization) + Fraction(1, rec.D) == 2
