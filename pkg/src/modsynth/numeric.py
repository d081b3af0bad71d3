"""Number-theoretic helpers shared by the synthesis modules.

Everything here works on plain Python ints at desk scale (moduli below
2**15), so primality is settled by trial division and orders by brute
force.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: returns (g, s, t) with g = gcd(a, b) = s*a + t*b, g > 0."""
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def modinv(c: int, m: int) -> int:
    """Inverse of c modulo m; requires gcd(c, m) = 1."""
    g, s, _ = egcd(c, m)
    if g != 1:
        raise ValueError(f"{c} is not invertible modulo {m}")
    return s % m


@dataclass(frozen=True)
class CsdExpansion:
    """Canonical signed digit form: list of (bit position, sign) pairs.

    Positions are strictly increasing and no two adjacent positions are
    both present (the non-adjacency property of CSD/NAF).
    """

    digits: tuple[tuple[int, int], ...]

    def value(self) -> int:
        return sum(sign << pos for pos, sign in self.digits)

    def __len__(self) -> int:
        return len(self.digits)


def csd(c: int) -> CsdExpansion:
    """Canonical signed digit (non-adjacent form) expansion of c >= 1."""
    if c < 1:
        raise ValueError("csd requires a positive integer")
    digits = []
    pos = 0
    while c:
        if c & 1:
            sign = 2 - (c & 3)  # +1 if c % 4 == 1, -1 if c % 4 == 3
            digits.append((pos, sign))
            c -= sign
        c >>= 1
        pos += 1
    return CsdExpansion(tuple(digits))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_up_to(limit: int) -> list[int]:
    if limit < 2:
        return []
    sieve = bytearray([1]) * (limit + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, f in enumerate(sieve) if f]


@dataclass(frozen=True)
class PeriodInfo:
    """Multiplicative order of base modulo M plus Shor usefulness.

    A period is useful when it is even and base**(period/2) is not
    congruent to -1, so that gcd(base**(period/2) +- 1, M) splits M.
    """

    base: int
    modulus: int
    period: int
    useful: bool


def multiplicative_order(b: int, m: int) -> PeriodInfo:
    if not 1 < b < m:
        raise ValueError("base must satisfy 1 < b < M")
    if gcd(b, m) != 1:
        raise ValueError("base must be coprime with the modulus")
    x = b % m
    period = 1
    while x != 1:
        x = x * b % m
        period += 1
    useful = period % 2 == 0 and pow(b, period // 2, m) != m - 1
    return PeriodInfo(base=b, modulus=m, period=period, useful=useful)


def semiprimes(
    n: int,
    factor_bound: int = 5,
    balance: bool = False,
    factor_limit: int = 1 << 13,
) -> list[int]:
    """All n-bit semiprimes M = p*q with distinct odd primes p, q >= factor_bound.

    n-bit means ceil(log2 M) == n, i.e. 2**(n-1) < M <= 2**n.  With
    balance set, factors must satisfy |ceil(log2 p) - ceil(log2 q)| < 2,
    and both factors stay below factor_limit.
    """
    if n < 4:
        raise ValueError("need at least 4 bits")
    lo, hi = (1 << (n - 1)) + 1, 1 << n
    ps = [p for p in primes_up_to(min(hi // factor_bound, factor_limit - 1)) if p >= factor_bound]
    out = set()
    for i, p in enumerate(ps):
        if p * p > hi:
            break
        for q in ps[i + 1 :]:
            m = p * q
            if m > hi:
                break
            if m <= lo - 1:
                continue
            if q >= factor_limit:
                continue
            if balance and abs(p.bit_length() - q.bit_length()) >= 2:
                continue
            out.add(m)
    return sorted(out)


def factor_semiprime(m: int) -> tuple[int, int]:
    """Smallest prime factor first; raises if m is not a semiprime."""
    for p in range(2, isqrt(m) + 1):
        if m % p == 0:
            q = m // p
            if is_prime(p) and is_prime(q):
                return p, q
            break
    raise ValueError(f"{m} is not a semiprime")


def totient(m: int) -> int:
    if m < 2:
        raise ValueError("modulus must be at least 2")
    return sum(1 for c in range(1, m) if gcd(c, m) == 1)


def coprimes(m: int) -> list[int]:
    """All 1 < c < m with gcd(c, m) = 1."""
    return [c for c in range(2, m) if gcd(c, m) == 1]
