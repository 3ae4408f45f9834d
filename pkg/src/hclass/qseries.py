"""Truncated q-series with exact rational or complex coefficients.

A QSeries holds coefficients c(j) for 0 <= j <= trunc at exponents j/denom.
Coefficients beyond the truncation are undefined, never assumed zero, and
arithmetic tracks the valid range conservatively.  The module also provides
the concrete series used across the package: the cube of the theta
constant, the generating series of Hurwitz numbers, the classical
Eisenstein series with exact Bernoulli constants, and Kloosterman sums.
"""

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, isqrt

import numpy as np

from .arith import modinv
from .hurwitz import HurwitzEvaluator, hurwitz_H


@dataclass(frozen=True)
class QSeries:
    """Sparse truncated Fourier expansion; exponent of index j is j/denom."""

    denom: int
    trunc: int
    coeffs: dict = field(default_factory=dict)
    domain: str = "rational"  # "rational" | "complex"

    def __post_init__(self):
        if self.denom < 1 or self.trunc < 0:
            raise ValueError("need denom >= 1 and trunc >= 0")
        if self.domain not in ("rational", "complex"):
            raise ValueError(f"unknown coefficient domain {self.domain!r}")

    def c(self, j: int):
        """Coefficient at exponent j/denom; asking beyond the truncation raises."""
        if j > self.trunc:
            raise ValueError(f"coefficient {j} beyond truncation {self.trunc} is undefined")
        zero = Fraction(0) if self.domain == "rational" else 0j
        return self.coeffs.get(j, zero)

    def _aligned(self, other: "QSeries"):
        denom = self.denom * other.denom // gcd(self.denom, other.denom)
        return denom, denom // self.denom, denom // other.denom

    def __add__(self, other: "QSeries") -> "QSeries":
        denom, u, v = self._aligned(other)
        trunc = min(self.trunc * u, other.trunc * v)
        out: dict = {}
        for j, cj in self.coeffs.items():
            if j * u <= trunc:
                out[j * u] = out.get(j * u, 0) + cj
        for j, cj in other.coeffs.items():
            if j * v <= trunc:
                out[j * v] = out.get(j * v, 0) + cj
        domain = "complex" if "complex" in (self.domain, other.domain) else "rational"
        return QSeries(denom, trunc, {j: c for j, c in out.items() if c != 0}, domain)

    def __mul__(self, other: "QSeries") -> "QSeries":
        denom, u, v = self._aligned(other)
        trunc = min(self.trunc * u, other.trunc * v)
        out: dict = {}
        for j, cj in self.coeffs.items():
            ju = j * u
            if ju > trunc:
                continue
            for k, ck in other.coeffs.items():
                idx = ju + k * v
                if idx > trunc:
                    continue
                out[idx] = out.get(idx, 0) + cj * ck
        domain = "complex" if "complex" in (self.domain, other.domain) else "rational"
        return QSeries(denom, trunc, {j: c for j, c in out.items() if c != 0}, domain)

    def scale(self, factor) -> "QSeries":
        domain = "complex" if isinstance(factor, complex) else self.domain
        return QSeries(self.denom, self.trunc,
                       {j: c * factor for j, c in self.coeffs.items()}, domain)

    def eval_at(self, tau: complex) -> complex:
        """Value of the truncated sum at tau in the upper half plane."""
        total = 0j
        for j, cj in sorted(self.coeffs.items()):
            total += complex(cj) * cmath.exp(2j * cmath.pi * (j / self.denom) * tau)
        return total

    def agrees_with(self, other: "QSeries", tol: float = 0.0) -> bool:
        """Coefficient-wise comparison on the common valid range only."""
        denom, u, v = self._aligned(other)
        trunc = min(self.trunc * u, other.trunc * v)
        for idx in range(trunc + 1):
            a = self.coeffs.get(idx // u, 0) if idx % u == 0 else 0
            b = other.coeffs.get(idx // v, 0) if idx % v == 0 else 0
            if tol == 0.0:
                if a != b:
                    return False
            elif abs(complex(a) - complex(b)) > tol:
                return False
        return True


def apply_U(series: QSeries, a: int, b: int) -> QSeries:
    """Sieve the index lattice to b mod a and divide exponents by a.

    On an integer-exponent series this keeps the coefficients c(n) with
    n = b (mod a) and places them at exponent n/a; on series with exponent
    denominator M the action reads the numerators j of j/M the same way,
    so sieves compose by the Chinese remainder theorem.
    """
    if a < 1:
        raise ValueError("a must be positive")
    b %= a
    return QSeries(series.denom * a, series.trunc,
                   {j: c for j, c in series.coeffs.items() if j % a == b},
                   series.domain)


def theta_cubed(n_max: int) -> QSeries:
    """Sum of three squares counts: coefficient of q**n is r_3(n)."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    theta = np.zeros(n_max + 1, dtype=np.int64)
    for x in range(isqrt(n_max) + 1):
        theta[x * x] = 1 if x == 0 else 2
    sq = np.convolve(theta, theta)[: n_max + 1]
    cube = np.convolve(sq, theta)[: n_max + 1]
    return QSeries(1, n_max, {n: Fraction(int(cube[n])) for n in range(n_max + 1) if cube[n]})


def hurwitz_generating_series(n_max: int, evaluator: HurwitzEvaluator | None = None) -> QSeries:
    """Sum of H(n) q**n up to n_max, with the constant term -1/12.

    Only the holomorphic coefficients are materialized; the non-holomorphic
    completion of the weight 3/2 series is out of scope here.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    coeffs = {}
    for n in range(n_max + 1):
        t = evaluator.t(n) if evaluator is not None else hurwitz_H(n).t
        if t:
            coeffs[n] = Fraction(t, 12)
    return QSeries(1, n_max, coeffs)


@lru_cache(maxsize=64)
def bernoulli_number(k: int) -> Fraction:
    """B_k with B_1 = -1/2, computed by the defining recurrence."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return Fraction(1)
    total = Fraction(0)
    for j in range(k):
        total += comb(k + 1, j) * bernoulli_number(j)
    return -total / (k + 1)


def _sigma_table(k: int, n_max: int) -> list[int]:
    sig = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dk = d**k
        for m in range(d, n_max + 1, d):
            sig[m] += dk
    return sig


def eisenstein_series(k: int, n_max: int) -> QSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q**n with exact coefficients."""
    if k < 2 or k % 2:
        raise ValueError("weight must be even and at least 2")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    factor = -Fraction(2 * k) / bernoulli_number(k)
    sig = _sigma_table(k - 1, n_max)
    coeffs = {0: Fraction(1)}
    for n in range(1, n_max + 1):
        coeffs[n] = factor * sig[n]
    return QSeries(1, n_max, coeffs)


def _int_coeff_array(series: QSeries, n_max: int, mod: int) -> list[int]:
    out = [0] * (n_max + 1)
    for j, c in series.coeffs.items():
        if j > n_max:
            continue
        frac = Fraction(c)
        if frac.denominator != 1:
            raise ValueError("series has non-integer coefficients")
        out[j] = frac.numerator % mod
    return out


def _convolve_mod(a: list[int], b: list[int], mod: int) -> list[int]:
    n = len(a)
    out = [0] * n
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j in range(n - i):
            if b[j]:
                out[i + j] = (out[i + j] + ai * b[j]) % mod
    return out


def _power_mod(base: list[int], e: int, mod: int) -> list[int]:
    out = [0] * len(base)
    out[0] = 1 % mod
    for _ in range(e):
        out = _convolve_mod(out, base, mod)
    return out


def eisenstein_mod3_check(n_max: int) -> bool:
    """Check E_2 = E_4 = E_6 = 1 mod 3 and the power identity between them.

    The identity replaces E_2**n by E_4**a(n) * E_6**b(n) mod 3 with
    a(n) = (1 + 2n + 3(-1)**n)/4 and b(n) = (1 - (-1)**n)/2, for n up to 6,
    coefficient-wise to n_max.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    e2 = _int_coeff_array(eisenstein_series(2, n_max), n_max, 3)
    e4 = _int_coeff_array(eisenstein_series(4, n_max), n_max, 3)
    e6 = _int_coeff_array(eisenstein_series(6, n_max), n_max, 3)
    one = [1] + [0] * n_max
    if e2 != one or e4 != one or e6 != one:
        return False
    for n in range(7):
        a_n = (1 + 2 * n + 3 * (-1) ** n) // 4
        b_n = (1 - (-1) ** n) // 2
        lhs = _power_mod(e2, n, 3)
        rhs = _convolve_mod(_power_mod(e4, a_n, 3), _power_mod(e6, b_n, 3), 3)
        if lhs != rhs:
            return False
    return True


def kloosterman(a: int, b: int, c: int) -> complex:
    """K(a, b, c) = sum over units s mod c of e((a s + b s^-1)/c).

    The value is real; the imaginary part only carries rounding error.
    Phases are reduced mod c before exponentiation to keep full precision.
    """
    if c < 1:
        raise ValueError("modulus must be positive")
    total = 0j
    for s in range(c):
        if gcd(s, c) != 1:
            continue
        sbar = modinv(s, c)
        total += cmath.exp(2j * cmath.pi * ((a * s + b * sbar) % c) / c)
    return total
