"""Hurwitz class numbers H(n) and class numbers h(-D), by two routes.

Route one enumerates reduced positive definite binary quadratic forms
(A, B, C) of discriminant -n directly, with weights 1/2 and 1/3 at the two
exceptional shapes.  Route two factors -n = -D f**2 and evaluates

    H(D f**2) = H(D) * sum_{d | f} d * prod_{p | d} (1 - (-D/p)/p),

whose divisor sum is an exact positive integer.  The two routes are checked
against each other exactly; the divisor-sum normalization is the one forced
by form counting (H(75) = 7/3 = H(3) * 7, H(36) = 5/2 = H(4) * 5).

Values are carried as TwelfthInteger, the integer t = 12 * H(n), so all
arithmetic stays exact.  A persistent ClassNumberCache holds h(-D) for
fundamental discriminants, built from a vectorized form sweep.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .arith import (
    factorize,
    fundamental_factorization,
    is_fundamental_discriminant,
    kronecker,
)


class CacheFormatError(ValueError):
    """Raised when a cache file cannot be parsed; the message names the line."""


@dataclass(frozen=True, order=True)
class TwelfthInteger:
    """An exact Hurwitz value stored as the integer t = 12 * H(n)."""

    t: int

    def as_fraction(self) -> Fraction:
        return Fraction(self.t, 12)

    def __str__(self):
        f = self.as_fraction()
        return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def units_omega(disc: int) -> int:
    """Number of units in the quadratic order of discriminant disc < 0."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not a negative discriminant")
    if disc == -3:
        return 6
    if disc == -4:
        return 4
    return 2


def ell_divides_t(t: int, ell: int) -> bool:
    # t/12 must be ell-integral and divisible by ell, i.e. ell**(1+ord_ell(12)) | t.
    if ell == 2:
        return t % 8 == 0
    if ell == 3:
        return t % 9 == 0
    return t % ell == 0


def ell_divides(h: TwelfthInteger, ell: int) -> bool:
    """Whether the rational h = t/12 is ell-integral and divisible by ell.

    For ell >= 5 this is ell | t; the denominator 12 forces 9 | t at ell = 3
    and 8 | t at ell = 2.
    """
    return ell_divides_t(h.t, ell)


def reduced_forms_oracle(n: int) -> TwelfthInteger:
    """Weighted count of reduced forms (A, B, C) with B**2 - 4AC = -n.

    Reduced means |B| <= A <= C with B >= 0 whenever |B| = A or A = C.
    Multiples of x**2 + x*y + y**2 weigh 1/3, multiples of x**2 + y**2 weigh
    1/2, all other classes weigh 1.  Pure integer brute force; this is the
    oracle that pins down every other H computation.
    """
    if n <= 0:
        raise ValueError("reduced_forms_oracle requires n >= 1")
    if n % 4 in (1, 2):
        return TwelfthInteger(0)
    t = 0
    for A in range(1, isqrt(n // 3) + 1):
        fourA = 4 * A
        for B in range(0, A + 1):
            num = n + B * B
            if num % fourA:
                continue
            C = num // fourA
            if C < A:
                continue
            if B == A == C:
                t += 4  # multiple of (1, 1, 1)
            elif B == 0 and A == C:
                t += 6  # multiple of (1, 0, 1)
            elif B == 0 or B == A or A == C:
                t += 12  # -B twin not reduced
            else:
                t += 24  # forms (A, B, C) and (A, -B, C)
    return TwelfthInteger(t)


def reduced_forms_table(n_max: int) -> np.ndarray:
    """t[n] = 12 * H(n) for 0 <= n <= n_max by a strided form sweep.

    Same enumeration as reduced_forms_oracle, vectorized over C: for fixed
    (A, B) the discriminants 4AC - B**2 form an arithmetic progression.  The
    constant term is set to t[0] = -1, the H(0) = -1/12 convention.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    t = np.zeros(n_max + 1, dtype=np.int64)
    a_max = isqrt(n_max // 3) if n_max >= 3 else 0
    for A in range(1, a_max + 1):
        fourA = 4 * A
        # B = 0: forms (A, 0, C), C >= A.
        t[fourA * A :: fourA] += 12
        # B = A: forms (A, A, C), C >= A.
        t[3 * A * A :: fourA] += 12
        for B in range(1, A):
            first = fourA * A - B * B  # C = A, only +B reduced; grows with C
            if first > n_max:
                continue
            t[first] += 12
            t[first + fourA :: fourA] += 24  # C > A, both signs reduced
    # Weight corrections at the exceptional shapes.
    for A in range(1, a_max + 1):
        if 3 * A * A <= n_max:
            t[3 * A * A] -= 8  # (A, A, A) weighs 1/3
        if 4 * A * A <= n_max:
            t[4 * A * A] -= 6  # (A, 0, A) weighs 1/2
    if n_max >= 0:
        t[0] = -1
    return t


def class_number_h(D: int) -> int:
    """Class number h(-D): count of primitive reduced forms of discriminant -D."""
    if not is_fundamental_discriminant(-D):
        raise ValueError(f"-{D} is not a fundamental discriminant")
    h = 0
    for A in range(1, isqrt(D // 3) + 1):
        fourA = 4 * A
        for B in range(0, A + 1):
            num = D + B * B
            if num % fourA:
                continue
            C = num // fourA
            if C < A:
                continue
            if gcd(gcd(A, B), C) != 1:
                continue
            h += 1 if (B == 0 or B == A or A == C) else 2
    return h


def hurwitz_multiplier(D: int, f: int) -> int:
    """The exact integer sum_{d | f} d * prod_{p | d} (1 - (-D/p)/p).

    Each summand is an integer because d * (1 - chi(p)/p) contributes
    p**(e-1) * (p - chi(p)) per prime power; the sum factors over p | f.
    """
    m = 1
    for p, e in factorize(f).items():
        chi = kronecker(-D, p)
        local = 1
        pj = 1
        for _ in range(e):
            local += pj * (p - chi)
            pj *= p
        m *= local
    return m


_H_FUND_MEMO: dict[int, int] = {}


def _h_fundamental(D: int, cache: "ClassNumberCache | None" = None) -> int:
    if cache is not None:
        h = cache.h.get(D)
        if h is not None:
            return h
    h = _H_FUND_MEMO.get(D)
    if h is None:
        h = class_number_h(D)
        _H_FUND_MEMO[D] = h
    return h


def hurwitz_H(n: int, cache: "ClassNumberCache | None" = None) -> TwelfthInteger:
    """H(n) through the fundamental factorization and the divisor-sum formula.

    H(0) = -1/12 and H(n) = 0 for n = 1, 2 mod 4; negative n is a domain
    error.  h(-D) comes from the cache when available, else from primitive
    form counting (memoized).
    """
    if n < 0:
        raise ValueError("hurwitz_H requires n >= 0")
    if n == 0:
        return TwelfthInteger(-1)
    if n % 4 in (1, 2):
        return TwelfthInteger(0)
    fac = fundamental_factorization(n)
    if fac.D == 3:
        t_fund = 4
    elif fac.D == 4:
        t_fund = 6
    else:
        t_fund = 12 * _h_fundamental(fac.D, cache)
    return TwelfthInteger(t_fund * hurwitz_multiplier(fac.D, fac.f))


def _squarefree_mask(n_max: int) -> np.ndarray:
    mask = np.ones(n_max + 1, dtype=bool)
    mask[0] = False
    for p in range(2, isqrt(n_max) + 1):
        if mask[p]:  # p squarefree implies p survived all smaller squares; primes do
            mask[p * p :: p * p] = False
    return mask


def fundamental_mask(d_max: int) -> np.ndarray:
    """Boolean mask over 0..d_max marking D with -D fundamental."""
    mask = np.zeros(d_max + 1, dtype=bool)
    sf = _squarefree_mask(d_max)
    idx = np.arange(d_max + 1)
    mask[(idx % 4 == 3) & sf] = True
    quarter = idx[(idx % 4 == 0) & (idx >= 4)]
    m = quarter // 4
    good = ((m % 4 == 1) | (m % 4 == 2)) & sf[m]
    mask[quarter[good]] = True
    return mask


@dataclass
class ClassNumberCache:
    """h(-D) for every fundamental -D with 3 <= D <= d_max.

    Immutable once built; reads are safe from any number of threads.
    """

    d_max: int
    h: dict[int, int]

    @classmethod
    def from_table(cls, table: np.ndarray, d_max: int) -> "ClassNumberCache":
        """Extract h(-D) = t[D] / 12 for fundamental D > 4 (h = 1 at D = 3, 4)."""
        if d_max < 3:
            raise ValueError("d_max must be at least 3")
        if d_max > len(table) - 1:
            raise ValueError("table too short for requested d_max")
        mask = fundamental_mask(d_max)
        ds = np.nonzero(mask)[0]
        ts = table[ds]
        big = ds > 4
        if not np.all(ts[big] % 12 == 0):
            raise AssertionError("form sweep produced a non-integral class number")
        h = {}
        for D, t in zip(ds.tolist(), ts.tolist()):
            h[D] = 1 if D in (3, 4) else t // 12
        return cls(d_max=d_max, h=h)

    def save(self, path: str | os.PathLike) -> None:
        lines = [f"hurwitz-cache v1 D_max={self.d_max}\n"]
        for D in sorted(self.h):
            lines.append(f"{D},{self.h[D]}\n")
        with open(path, "w") as fh:
            fh.writelines(lines)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ClassNumberCache":
        with open(path) as fh:
            header = fh.readline()
            if not header.startswith("hurwitz-cache v1 D_max="):
                raise CacheFormatError("line 1: missing 'hurwitz-cache v1 D_max=' header")
            try:
                d_max = int(header.split("D_max=", 1)[1])
            except ValueError:
                raise CacheFormatError("line 1: unreadable D_max value") from None
            h: dict[int, int] = {}
            prev = 0
            for lineno, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise CacheFormatError(f"line {lineno}: expected 'D,h', got {line!r}")
                try:
                    D, hval = int(parts[0]), int(parts[1])
                except ValueError:
                    raise CacheFormatError(f"line {lineno}: non-integer field in {line!r}") from None
                if D <= prev:
                    raise CacheFormatError(f"line {lineno}: D values must increase")
                if hval < 1 or not (3 <= D <= d_max):
                    raise CacheFormatError(f"line {lineno}: implausible entry D={D}, h={hval}")
                h[D] = hval
                prev = D
        return cls(d_max=d_max, h=h)


def build_cache(d_max: int, table: np.ndarray | None = None) -> ClassNumberCache:
    """Build the class number cache up to d_max, sweeping forms if needed."""
    if d_max < 3:
        raise ValueError("d_max must be at least 3")
    if table is None:
        table = reduced_forms_table(d_max)
    return ClassNumberCache.from_table(table, d_max)


class HurwitzEvaluator:
    """Fast repeated evaluation of t(n) = 12 * H(n) for congruence scans.

    Consults a dense precomputed table when one covers n, otherwise runs the
    divisor-sum formula against the class number cache, falling back to
    direct primitive form counting for fundamental discriminants beyond the
    cache.  Read-only after construction, so scans may share it across
    workers.
    """

    def __init__(self, cache: ClassNumberCache | None = None,
                 table: np.ndarray | None = None, use_table: bool = True):
        self.cache = cache
        self.table = table if use_table else None
        self._table_len = len(table) if (table is not None and use_table) else 0

    def t(self, n: int) -> int:
        if n < 0:
            raise ValueError("t(n) requires n >= 0")
        if n < self._table_len:
            return int(self.table[n])
        return hurwitz_H(n, self.cache).t

    def H(self, n: int) -> TwelfthInteger:
        return TwelfthInteger(self.t(n))
