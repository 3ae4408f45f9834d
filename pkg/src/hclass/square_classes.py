"""Arithmetic progressions, multiplicative square classes, and their taxonomy.

The square class of b modulo a is the orbit b * (Z/aZ)^x2, i.e. all residues
b * u**2 mod a with gcd(u, a) = 1.  Progressions and orbits carry the
regular / maximal-shape / non-holomorphic classification used by the
congruence engine.  Everything here is pure.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .arith import factorize, is_prime, is_square_mod, ord_p


@dataclass(frozen=True, order=True)
class Progression:
    """The arithmetic progression a*Z + b with 0 <= b < a."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 1:
            raise ValueError("modulus must be positive")
        if not 0 <= self.b < self.a:
            raise ValueError("residue must satisfy 0 <= b < a")


@lru_cache(maxsize=4096)
def _unit_squares(a: int) -> frozenset[int]:
    return frozenset(u * u % a for u in range(1, a + 1) if gcd(u, a) == 1)


@lru_cache(maxsize=65536)
def _orbit(a: int, b: int) -> frozenset[int]:
    b %= a
    return frozenset(b * s % a for s in _unit_squares(a))


def square_class_members(a: int, b: int) -> list[int]:
    """Sorted residues of the orbit {b * u**2 mod a : gcd(u, a) = 1}."""
    if a < 1:
        raise ValueError("modulus must be positive")
    return sorted(_orbit(a, b))


def square_class_contains(a: int, b: int, n: int) -> bool:
    """Whether n lies in the square class of b modulo a."""
    if a < 1:
        raise ValueError("modulus must be positive")
    return n % a in _orbit(a, b)


@dataclass(frozen=True)
class SquareClass:
    """A square-class orbit keyed by its minimum member.

    Two values are equal exactly when their orbits coincide, because the
    canonical representative is the orbit minimum.
    """

    a: int
    rep: int

    @classmethod
    def from_residue(cls, a: int, b: int) -> "SquareClass":
        return cls(a, min(_orbit(a, b)))

    def members(self) -> list[int]:
        return square_class_members(self.a, self.rep)

    def to_json_dict(self) -> dict:
        return {"a": self.a, "rep": self.rep, "members_count": len(_orbit(self.a, self.rep))}


def is_regular(a: int, b: int) -> bool:
    """Whether every member of a*Z + b has the same p-valuation for all p | a.

    Equivalent to ord_p(a) > ord_p(b) for every prime p | a; b = 0 mod a is
    never regular when a > 1.
    """
    if a < 1:
        raise ValueError("modulus must be positive")
    b %= a
    for p, e in factorize(a).items():
        if b == 0 or ord_p(b, p) >= e:
            return False
    return True


def is_maximal_regular_shape(a: int, b: int) -> bool:
    """Valuation pattern of a maximal regular congruence.

    For odd p | a the residue must satisfy ord_p(b) = ord_p(a) - 1; at p = 2
    the window ord_2(a) - 1 >= ord_2(b) >= ord_2(a) - 3 applies.
    """
    if a < 1:
        raise ValueError("modulus must be positive")
    b %= a
    for p, e in factorize(a).items():
        if b == 0:
            return False
        v = ord_p(b, p)
        if p == 2:
            if not (e - 3 <= v <= e - 1):
                return False
        elif v != e - 1:
            return False
    return True


def is_nonholomorphic(a: int, b: int) -> bool:
    """Whether -b is a square modulo a (the mock modular side of the split)."""
    return is_square_mod(-b, a)


def irregular_expansion(a: int, b: int, p: int, M: int) -> list[Progression]:
    """Expand a p-irregular square class into regular classes at higher level.

    Requires the class around b mod a to be irregular at p (the p-valuation
    of members is not constant).  After normalizing b so that the p-part of
    a exactly divides b (replacing b by b + a when needed), the output is
    the deduplicated family of progressions

        (a * p**(m+1),  b * u * p**m)   for 0 <= m <= M,

    with u running over residues mod p**(m+1) * a_p# subject to p not
    dividing u and u * p**m = 1 mod a_p#.  Their union covers exactly the
    members of the original class with bounded extra p-valuation.
    """
    if a < 1:
        raise ValueError("modulus must be positive")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if M < 0:
        raise ValueError("M must be non-negative")
    alpha = ord_p(a, p) if a % p == 0 else 0
    b %= a
    b_val = None if b == 0 else ord_p(b, p)
    if alpha == 0 or (b_val is not None and b_val < alpha):
        raise ValueError(f"class around {b} mod {a} is regular at p={p}")
    if b_val is None or b_val > alpha:
        b = b + a  # forces ord_p(b) = alpha exactly
    a_p = p**alpha
    a_p_sharp = a // a_p
    out: list[Progression] = []
    seen: set[SquareClass] = set()
    for m in range(M + 1):
        modulus = a * p ** (m + 1)
        u_mod = p ** (m + 1) * a_p_sharp
        target = pow(p, m, a_p_sharp) if a_p_sharp > 1 else 0
        for u in range(u_mod):
            if u % p == 0:
                continue
            if a_p_sharp > 1 and u * target % a_p_sharp != 1 % a_p_sharp:
                continue
            residue = b * u * p**m % modulus
            cls = SquareClass.from_residue(modulus, residue)
            if cls not in seen:
                seen.add(cls)
                out.append(Progression(modulus, residue))
    return sorted(out)
