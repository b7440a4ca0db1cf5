"""Elementary integer arithmetic shared by the curve and statistics modules.

Everything here is exact big-integer arithmetic: deterministic primality
(Miller-Rabin with a proven witness set below 3.3 * 10^24, extra rounds
above), Pollard-Brent factorisation with an iteration budget, prime sieves,
quadratic residue tests and integer roots.
"""

from __future__ import annotations

from math import gcd, isqrt

__all__ = [
    "sieve_primes",
    "primes_up_to",
    "is_prime",
    "legendre",
    "sqrt_mod",
    "valuation",
    "is_square",
    "iroot",
    "factorize",
    "FactorBudgetExceeded",
]


class FactorBudgetExceeded(Exception):
    """Raised when an integer resists factorisation within its budget."""


def sieve_primes(limit: int) -> list[int]:
    """All primes <= limit by a plain sieve of Eratosthenes."""
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for n in range(2, isqrt(limit) + 1):
        if flags[n]:
            flags[n * n :: n] = bytearray(len(flags[n * n :: n]))
    return [n for n in range(limit + 1) if flags[n]]


_PRIME_CACHE: dict[int, list[int]] = {}


def primes_up_to(limit: int) -> list[int]:
    """Cached variant of sieve_primes for the bounds used repeatedly."""
    if limit not in _PRIME_CACHE:
        _PRIME_CACHE[limit] = sieve_primes(limit)
    return _PRIME_CACHE[limit]


# Deterministic for n < 3.317e24 (Sorenson-Webster witness set).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
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


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, in {-1, 0, 1}."""
    a %= p
    if a == 0:
        return 0
    t = pow(a, (p - 1) // 2, p)
    return -1 if t == p - 1 else 1


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a modulo prime p, or None if a is a non-residue.

    Tonelli-Shanks for p = 1 mod 8, direct exponentiation otherwise.
    """
    a %= p
    if p == 2 or a == 0:
        return a
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    if p % 8 == 5:
        x = pow(a, (p + 3) // 8, p)
        if x * x % p != a:
            x = x * pow(2, (p - 1) // 4, p) % p
        return x
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, x = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, x = t * c % p, x * b % p
    return x


def valuation(n: int, p: int) -> int:
    """Exponent of p in n.  Raises for n = 0 (infinite valuation)."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def iroot(n: int, k: int) -> tuple[int, bool]:
    """(floor(n^(1/k)), exact?) for n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise ValueError("iroot requires n >= 0, k >= 1")
    if n in (0, 1) or k == 1:
        return n, True
    r = int(round(n ** (1.0 / k)))
    # float seed, then correct by a couple of integer steps
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r, r**k == n


def _pollard_brent(n: int, max_iter: int) -> int | None:
    """A nontrivial factor of composite n, or None if the budget runs out."""
    if n % 2 == 0:
        return 2
    seed = 1
    while True:
        y, c, m = (seed * 2862933555777941757 + 3037000493) % n, seed % n, 128
        if c == 0:
            c = 1
        g = r = q = 1
        x = ys = y
        count = 0
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
                g = gcd(q, n)
                k += m
            r *= 2
            count += r
            if count > max_iter:
                return None
        if g != n:
            return g
        # backtrack when the batched gcd overshot
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = gcd(abs(x - ys), n)
        if g != n:
            return g
        seed += 1
        if seed > 8:
            return None


def factorize(n: int, *, trial_bound: int = 10000, rho_budget: int = 1 << 22) -> dict[int, int]:
    """Full factorisation {prime: exponent} of |n|, n != 0.

    Trial division up to trial_bound, then Pollard-Brent on what is left.
    Raises FactorBudgetExceeded if a composite cofactor survives the rho
    budget; callers that must not fail should catch it and report.
    """
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in primes_up_to(trial_bound):
        if p * p > n:
            break
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
        for k in (2, 3, 5):
            r, exact = iroot(m, k)
            if exact:
                stack.extend([r] * k)
                break
        else:
            d = _pollard_brent(m, rho_budget)
            if d is None:
                raise FactorBudgetExceeded(f"no factor of {m} within budget")
            stack.extend([d, m // d])
    return out
