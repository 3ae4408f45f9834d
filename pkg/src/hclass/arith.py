"""Exact elementary number theory primitives shared by the whole package.

Everything here is pure integer arithmetic: Kronecker symbols, p-adic
splittings, fundamental discriminant factorizations, square detection in
residue rings, and small factorization helpers.  All functions are pure and
safe for unrestricted concurrent use.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

# Factorization here is trial division against a sieve of small primes.
# Inputs across the package stay below 10**8, so a sieve bound of 10**4
# certifies every cofactor; the bound can be raised per call.
_DEFAULT_SIEVE_BOUND = 10_000

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def primes_upto(n: int) -> list[int]:
    """All primes <= n by a basic sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return [i for i, v in enumerate(sieve) if v]


@lru_cache(maxsize=8)
def _sieve_primes(bound: int) -> tuple[int, ...]:
    return tuple(primes_upto(bound))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the 10**8 inputs used here."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int, sieve_bound: int = _DEFAULT_SIEVE_BOUND) -> dict[int, int]:
    """Prime factorization of |n| as {p: exponent}.

    Trial division by sieved primes up to sieve_bound, then a primality
    certificate on the cofactor.  Raises ValueError if the cofactor is a
    composite with no factor below the bound (cannot happen for
    n <= sieve_bound**2).
    """
    n = abs(n)
    if n <= 1:
        return {}
    out: dict[int, int] = {}
    for p in _sieve_primes(sieve_bound):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n <= sieve_bound * sieve_bound or is_prime(n):
            out[n] = out.get(n, 0) + 1
        else:
            raise ValueError(f"cofactor {n} exceeds the factorization bound {sieve_bound}")
    return out


def ord_p(n: int, p: int) -> int:
    """p-adic valuation of n; raises on n = 0 (the valuation is infinite)."""
    if n == 0:
        raise ValueError("ord_p(0) is infinite")
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def kronecker(n: int, m: int) -> int:
    """Kronecker symbol (n/m), the full extension of the Jacobi symbol.

    Multiplicative in both arguments; agrees with the Legendre symbol for odd
    prime m.  (n/2) is 0 for even n and +-1 by n mod 8; (n/-1) is the sign
    of n (with (0/-1) = 1).  m = 0 is a domain error.
    """
    if m == 0:
        raise ValueError("kronecker symbol undefined for m = 0")
    result = 1
    if m < 0:
        m = -m
        if n < 0:
            result = -1
    if m % 2 == 0:
        if n % 2 == 0:
            return 0
        while m % 2 == 0:
            m //= 2
            if n % 8 in (3, 5):
                result = -result
    # Jacobi symbol (n/m) for odd m > 0 by quadratic reciprocity.
    n %= m
    while n != 0:
        while n % 2 == 0:
            n //= 2
            if m % 8 in (3, 5):
                result = -result
        n, m = m, n
        if n % 4 == 3 and m % 4 == 3:
            result = -result
        n %= m
    return result if m == 1 else 0


@dataclass(frozen=True)
class PAdicSplit:
    """Factorization n = n_p * n_p_sharp into a p-power and a p-coprime part.

    For n = 0 the convention is n_p = 1, n_p_sharp = 0.
    """

    p: int
    n_p: int
    n_p_sharp: int

    def __post_init__(self):
        if self.n_p_sharp != 0 and self.n_p_sharp % self.p == 0:
            raise ValueError("n_p_sharp must be coprime to p")


def p_split(n: int, p: int) -> PAdicSplit:
    """Split n into its p-power part and p-coprime cofactor."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n == 0:
        return PAdicSplit(p, 1, 0)
    np_part = 1
    rest = n
    while rest % p == 0:
        rest //= p
        np_part *= p
    return PAdicSplit(p, np_part, rest)


def is_fundamental_discriminant(d: int) -> bool:
    """Whether d < 0 is a fundamental discriminant (of an imaginary quadratic field)."""
    if d >= 0:
        return False
    if d % 4 == 1:
        return _is_squarefree(-d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _is_squarefree(-m)
    return False


def _is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


@dataclass(frozen=True)
class DiscriminantFactorization:
    """-n = -D * f**2 with -D fundamental and f >= 1."""

    D: int
    f: int

    def __post_init__(self):
        if not is_fundamental_discriminant(-self.D):
            raise ValueError(f"-{self.D} is not a fundamental discriminant")
        if self.f < 1:
            raise ValueError("f must be positive")


def fundamental_factorization(n: int) -> DiscriminantFactorization:
    """Write -n (a negative discriminant) as -D * f**2 with -D fundamental.

    Requires n > 0 and n = 0 or 3 mod 4; the decomposition is unique.
    """
    if n <= 0 or n % 4 in (1, 2):
        raise ValueError(f"-{n} is not a negative discriminant")
    s = 1
    f = 1
    for p, e in factorize(n).items():
        f *= p ** (e // 2)
        if e % 2:
            s *= p
    # -s squarefree; promote to 4s when -s = 2, 3 mod 4 (i.e. s = 1, 2 mod 4).
    if s % 4 == 3:
        return DiscriminantFactorization(s, f)
    if f % 2 != 0:
        raise AssertionError("parity invariant violated in fundamental_factorization")
    return DiscriminantFactorization(4 * s, f // 2)


def epsilon4(d: int) -> complex:
    """1 for d = 1 mod 4 and i for d = 3 mod 4, exactly representable."""
    if d % 2 == 0:
        raise ValueError("epsilon4 requires odd d")
    return 1 + 0j if d % 4 == 1 else 1j


def epsilon4_exponent(d: int) -> int:
    """Exponent e in {0, 1} with epsilon4(d) = i**e."""
    if d % 2 == 0:
        raise ValueError("epsilon4 requires odd d")
    return 0 if d % 4 == 1 else 1


# i**k for k mod 4, all coordinates exact in binary floating point.
I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def i_power(k: int) -> complex:
    return I_POWERS[k % 4]


def _square_mod_odd_prime_power(n: int, p: int, e: int) -> bool:
    n %= p**e
    if n == 0:
        return True
    j = ord_p(n, p)
    if j % 2:
        return False
    u = n // p**j
    return kronecker(u, p) == 1


def _square_mod_power_of_two(n: int, e: int) -> bool:
    n %= 2**e
    if n == 0:
        return True
    j = ord_p(n, 2)
    if j >= e:
        return True
    if j % 2:
        return False
    u = (n >> j) % 8
    rem = e - j
    if rem == 1:
        return True
    if rem == 2:
        return u % 4 == 1
    return u == 1


def is_square_mod(n: int, a: int) -> bool:
    """Whether x**2 = n (mod a) has a solution, decided prime-power-wise."""
    if a < 1:
        raise ValueError("modulus must be positive")
    if a == 1:
        return True
    for p, e in factorize(a).items():
        if p == 2:
            if not _square_mod_power_of_two(n, e):
                return False
        elif not _square_mod_odd_prime_power(n, p, e):
            return False
    return True


def modinv(u: int, m: int) -> int:
    """Smallest non-negative inverse of u modulo m."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if gcd(u, m) != 1:
        raise ValueError(f"{u} is not invertible modulo {m}")
    return pow(u, -1, m)
