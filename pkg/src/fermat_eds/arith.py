"""Exact integer utilities.

Valuations, radicals, perfect-power detection, budgeted factoring and
representations by the form a^2 + 3b^2.  Nothing in here touches floating
point.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import reduce

DEFAULT_TRIAL_BOUND = 10**5
DEFAULT_RHO_ROUNDS = 200_000

# Deterministic Miller-Rabin for n < 3.3e24 (covers 2**64); the same schedule
# is used as a fixed probabilistic test above that.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class ZeroInputError(ValueError):
    """Raised when an operation is undefined at zero."""


class NotPrimeError(ValueError):
    """Raised when an argument that must be prime is not."""


class IncompleteFactorization(ArithmeticError):
    """A factoring budget ran out before the full factorization was found."""

    def __init__(self, n, cofactor):
        super().__init__(f"could not finish factoring {n}; unsplit cofactor {cofactor}")
        self.n = n
        self.cofactor = cofactor


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def ord(p: int, n: int) -> int:  # noqa: A001 - mirrors the ord_p notation
    """p-adic valuation of |n|."""
    if n == 0:
        raise ZeroInputError("ord_p(0) is infinite")
    if not is_probable_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def iroot(n: int, k: int) -> tuple[int, bool]:
    """Floor of the k-th root of n >= 0 and whether it is exact."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n, True
    if k == 2:
        r = math.isqrt(n)
        return r, r * r == n
    # Newton from above, starting at a power of two >= the root.
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x, x**k == n


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, v in enumerate(sieve) if v]


def perfect_power_exponents(n: int) -> set[tuple[int, int]]:
    """All (l, r) with l prime and r**l == n.

    Only prime exponents are tried; a composite exponent k is witnessed by
    every prime factor of k.
    """
    if n < 2:
        raise ValueError("perfect_power_exponents needs n >= 2")
    out = set()
    for l in primes_up_to(n.bit_length()):
        r, exact = iroot(n, l)
        if exact:
            out.add((l, r))
    return out


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]
    cofactor: int = 1

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def value(self) -> int:
        return reduce(lambda acc, pe: acc * pe[0] ** pe[1], self.factors, self.cofactor)

    def divisors(self) -> list[int]:
        """Positive divisors; requires a complete factorization."""
        if not self.complete:
            raise IncompleteFactorization(self.n, self.cofactor)
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)


def _brent(n: int, rng: random.Random, rounds: int) -> int | None:
    """One Pollard-Brent attempt; a nontrivial factor or None."""
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    x = ys = y
    spent = 0
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
            g = math.gcd(q, n)
            k += m
        spent += r
        r *= 2
        if spent > rounds:
            return None
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def factor_with_effort(
    n: int,
    trial_bound: int = DEFAULT_TRIAL_BOUND,
    rho_rounds: int = DEFAULT_RHO_ROUNDS,
    seed: int = 0,
) -> Factorization:
    """Trial division up to `trial_bound`, then Pollard-Brent on what is left.

    Each composite piece gets at most `rho_rounds` iterations per attempt
    (a few attempts with fresh constants).  Whatever cannot be split ends up
    in the cofactor, so the result always multiplies back to n.
    """
    if n < 2:
        raise ValueError("factor_with_effort needs n >= 2")
    rng = random.Random(seed)
    counts: dict[int, int] = {}
    m = n
    for p in (2, 3, 5):
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    # 6k +- 1 wheel
    p, step = 7, 4
    while p <= trial_bound and p * p <= m:
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
        p += step
        step = 6 - step
    if 1 < m and (m <= trial_bound or m < p * p):
        counts[m] = counts.get(m, 0) + 1
        m = 1

    cofactor = 1
    stack = [m] if m > 1 else []
    while stack:
        c = stack.pop()
        if is_probable_prime(c):
            counts[c] = counts.get(c, 0) + 1
            continue
        r, exact = iroot(c, 2)
        if exact:
            stack += [r, r]
            continue
        f = None
        for _ in range(4):
            f = _brent(c, rng, rho_rounds)
            if f:
                break
        if f is None:
            cofactor *= c
        else:
            stack += [f, c // f]
    return Factorization(n, tuple(sorted(counts.items())), cofactor)


def odd_radical(n: int, trial_bound: int = DEFAULT_TRIAL_BOUND, rho_rounds: int = DEFAULT_RHO_ROUNDS) -> int:
    """Product of the distinct odd primes dividing n."""
    if n == 0:
        raise ZeroInputError("radical of 0 is undefined")
    n = abs(n)
    if n == 1:
        return 1
    fac = factor_with_effort(n, trial_bound, rho_rounds)
    if not fac.complete:
        raise IncompleteFactorization(n, fac.cofactor)
    return math.prod(p for p in fac.primes() if p != 2)


def smallest_prime_factor_above(n: int, floor: int, **budget) -> int | None:
    """Smallest prime > floor dividing n, or None when none is found in budget.

    None is returned both when no such prime exists and when the unfactored
    cofactor might hide one; callers that care check the cofactor themselves.
    """
    if abs(n) < 2:
        return None
    fac = factor_with_effort(abs(n), **budget)
    big = [p for p in fac.primes() if p > floor]
    if big:
        best = min(big)
        if fac.complete or best < fac.cofactor:
            return best
    return None


# --- the form a^2 + 3b^2 ----------------------------------------------------
#
# Elements of Z[w], w = (-1 + sqrt(-3))/2, are stored as pairs (x, y) meaning
# (x + y*sqrt(-3))/2 with x = y mod 2; the norm is (x^2 + 3y^2)/4.


def _mul(s: tuple[int, int], t: tuple[int, int]) -> tuple[int, int]:
    (x1, y1), (x2, y2) = s, t
    return (x1 * x2 - 3 * y1 * y2) // 2, (x1 * y2 + x2 * y1) // 2


def _conj(s: tuple[int, int]) -> tuple[int, int]:
    return s[0], -s[1]


_UNITS = ((2, 0), (-2, 0), (-1, 1), (1, -1), (-1, -1), (1, 1))


def _sqrt_mod(a: int, p: int) -> int:
    """Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks)."""
    a %= p
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def _split_prime(p: int) -> tuple[int, int]:
    """An element of norm p for p = 1 mod 3, via Cornacchia on a^2 + 3b^2 = p."""
    r = _sqrt_mod(-3, p)
    if 2 * r > p:
        r = p - r
    a, b = p, r
    bound = math.isqrt(p)
    while b > bound:
        a, b = b, a % b
    rest = p - b * b
    c, exact = iroot(rest // 3, 2)
    if rest % 3 or not exact:
        raise ArithmeticError(f"Cornacchia failed for {p}")  # unreachable for p = 1 mod 3
    return 2 * b, 2 * c


def norm_elements(n: int, **budget) -> list[tuple[int, int]]:
    """All (x, y) with x^2 + 3y^2 = 4n, i.e. every element of Z[w] of norm n."""
    if n < 1:
        return []
    if n == 1:
        return list(_UNITS)
    fac = factor_with_effort(n, **budget)
    if not fac.complete:
        raise IncompleteFactorization(n, fac.cofactor)
    partial = [(2, 0)]
    for p, e in fac.factors:
        if p == 3:
            z = (2, 0)
            for _ in range(e):
                z = _mul(z, (0, 2))  # sqrt(-3)
            options = [z]
        elif p % 3 == 2:
            if e % 2:
                return []
            options = [(2 * p ** (e // 2), 0)]
        else:
            pi = _split_prime(p)
            pibar = _conj(pi)
            options = []
            for i in range(e + 1):
                z = (2, 0)
                for _ in range(i):
                    z = _mul(z, pi)
                for _ in range(e - i):
                    z = _mul(z, pibar)
                options.append(z)
        partial = [_mul(a, b) for a in partial for b in options]
    return sorted({_mul(u, z) for u in _UNITS for z in partial})


def cornacchia_3(n: int, **budget) -> list[tuple[int, int]]:
    """All a, b >= 0 with a^2 + 3b^2 = n (signs are free)."""
    if n < 1:
        return []
    found = {
        (abs(x) // 2, abs(y) // 2)
        for x, y in norm_elements(n, **budget)
        if x % 2 == 0 and y % 2 == 0
    }
    return sorted(found, reverse=True)


def signed_variants(a: int, b: int) -> set[tuple[int, int]]:
    return {(sa * a, sb * b) for sa in (1, -1) for sb in (1, -1)}
