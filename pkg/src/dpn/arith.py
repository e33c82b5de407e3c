"""Exact integer and rational arithmetic for divisor-sum problems.

Everything here is deterministic and exact: primality uses a fixed
Miller-Rabin witness schedule, factorization uses trial division plus a
deterministically seeded Brent-rho, and all ratio-valued quantities are
returned as ``fractions.Fraction`` (never floats).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt


# Witnesses proving primality for every n < 3.317e24 (Sorenson-Webster).
# Inputs in this project stay far below that; for larger n the same
# schedule is used and is deterministic, though no longer a proof.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    """Deterministic primality test (Miller-Rabin, fixed witness schedule)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """Find a nontrivial factor of odd composite n (deterministic seeds)."""
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                k += m
                g = gcd(q, n)
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed to split {n}")


def _factor_map(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        # peel perfect powers first; rho then only sees non-power composites
        root, k = _perfect_power(m)
        if k > 1:
            stack.extend([root] * k)
            continue
        d = _brent_rho(m)
        stack.append(d)
        stack.append(m // d)
    return out


def _perfect_power(n: int) -> tuple[int, int]:
    """Return (r, k) with r**k == n and k maximal (k=1 if n is no power)."""
    for k in range(n.bit_length(), 1, -1):
        r = _iroot(n, k)
        if r**k == n:
            return r, k
    return n, 1


def _iroot(n: int, k: int) -> int:
    if n < 2:
        return n
    x = 1 << (-(-n.bit_length() // k))
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


@dataclass(frozen=True)
class Factorization:
    """Canonical prime-power decomposition: strictly increasing primes."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev = 1
        for p, a in self.entries:
            if p <= prev:
                raise ValueError(f"primes not strictly increasing: {self.entries}")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            if a < 1:
                raise ValueError(f"exponent {a} < 1 for prime {p}")
            prev = p

    @property
    def value(self) -> int:
        return reduce(lambda acc, e: acc * e[0] ** e[1], self.entries, 1)

    @property
    def omega(self) -> int:
        return len(self.entries)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(a for _, a in self.entries)

    def __iter__(self):
        return iter(self.entries)


def factorize(n: int) -> Factorization:
    """Canonical factorization of n >= 1 (n=1 gives the empty product)."""
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    return Factorization(tuple(sorted(_factor_map(n).items())))


def sigma_prime_power(p: int, a: int) -> int:
    """sigma(p**a) = 1 + p + ... + p**a, exactly."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if a < 0:
        raise ValueError("exponent must be >= 0")
    return (p ** (a + 1) - 1) // (p - 1)


def sigma(f: Factorization) -> int:
    """Divisor sum, multiplicative over the prime powers of f."""
    out = 1
    for p, a in f:
        out *= sigma_prime_power(p, a)
    return out


def sigma_of(n: int) -> int:
    return sigma(factorize(n))


def multiplicative_order(a: int, m: int) -> int:
    """Least k >= 1 with a**k = 1 (mod m); requires gcd(a, m) = 1."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if gcd(a, m) != 1:
        raise ValueError(f"gcd({a}, {m}) != 1")
    phi = 1
    for p, e in factorize(m):
        phi *= (p - 1) * p ** (e - 1)
    order = phi
    for q in factorize(phi).primes:
        while order % q == 0 and pow(a, order // q, m) == 1:
            order //= q
    return order


def abundancy(f: Factorization) -> Fraction:
    """sigma(n)/n in lowest terms."""
    return Fraction(sigma(f), f.value)


def abundancy_sup(primes) -> Fraction:
    """Strict upper bound prod p/(p-1) for the abundancy of any n on these primes."""
    primes = tuple(primes)
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    out = Fraction(1)
    for p in primes:
        out *= Fraction(p, p - 1)
    return out


def f_value(primes, exponents) -> Fraction:
    """prod (1 - p**-(a+1)): the exact ratio abundancy / abundancy_sup."""
    primes = tuple(primes)
    exponents = tuple(exponents)
    if len(primes) != len(exponents):
        raise ValueError("primes and exponents must have equal length")
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    out = Fraction(1)
    for p, a in zip(primes, exponents):
        out *= 1 - Fraction(1, p ** (a + 1))
    return out


def sigma_ratio(p: int, a: int) -> Fraction:
    """sigma(p**a)/p**a; increasing in a, decreasing in p, sup = p/(p-1)."""
    return Fraction(sigma_prime_power(p, a), p**a)


def decimal_prefix(x: Fraction, digits: int = 6) -> str:
    """Truncated (never rounded) decimal rendering with `digits` fractional digits."""
    if x < 0:
        return "-" + decimal_prefix(-x, digits)
    scaled = (x.numerator * 10**digits) // x.denominator
    whole, frac = divmod(scaled, 10**digits)
    return f"{whole}.{frac:0{digits}d}"


# --- prime iteration -------------------------------------------------------

def primes_below(limit: int) -> list[int]:
    """All primes < limit by a plain sieve (limit is small in practice)."""
    if limit <= 2:
        return []
    sieve = bytearray([1]) * limit
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(limit) if sieve[i]]


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    k = n + 1
    if k <= 2:
        return 2
    if k % 2 == 0:
        k += 1
    while not is_prime(k):
        k += 2
    return k


def primes_in(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi."""
    out = []
    p = lo - 1
    while True:
        p = next_prime(p)
        if p > hi:
            return out
        out.append(p)
