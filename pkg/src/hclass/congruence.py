"""Scan, verify, refute, and classify congruences of Hurwitz class numbers.

A progression congruence asserts H(a*n + b) = 0 mod ell for all n >= 0; the
multiplicative variant asserts H(n) = 0 mod ell for every n in the square
class of b mod a.  Scans certify either a refutation (with the least
witness) or a bounded verification; "verified up to N" is always a bounded
claim, never a proof.

Reports are pure functions of (ell, a, b, N) for a fixed evaluator, so scan
work can be partitioned across workers and merged deterministically.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from .arith import is_prime, kronecker, ord_p
from .hurwitz import HurwitzEvaluator, ell_divides_t
from .square_classes import (
    SquareClass,
    is_maximal_regular_shape,
    is_nonholomorphic,
    is_regular,
    square_class_members,
)


@dataclass(frozen=True)
class VerifiedUpTo:
    bound: int


@dataclass(frozen=True)
class Refuted:
    witness: int
    witness_t: int


@dataclass(frozen=True)
class CongruenceReport:
    ell: int
    a: int
    b: int
    kind: str  # "ramanujan" | "atkin"
    status: VerifiedUpTo | Refuted
    regular: bool
    maximal_regular: bool
    nonholomorphic: bool
    identically_zero: bool = False  # every scanned value is 1, 2 mod 4, H = 0

    @property
    def verified(self) -> bool:
        return isinstance(self.status, VerifiedUpTo)

    def to_json_dict(self) -> dict:
        if isinstance(self.status, VerifiedUpTo):
            status = {"type": "verified_up_to", "bound": self.status.bound}
        else:
            status = {
                "type": "refuted",
                "witness": self.status.witness,
                "witness_t": self.status.witness_t,
            }
        out = {
            "ell": self.ell,
            "a": self.a,
            "b": self.b,
            "kind": self.kind,
            "status": status,
            "flags": {
                "regular": self.regular,
                "maximal_regular": self.maximal_regular,
                "nonholomorphic": self.nonholomorphic,
                "identically_zero": self.identically_zero,
            },
        }
        if self.kind == "atkin":
            out["square_class"] = SquareClass.from_residue(self.a, self.b).to_json_dict()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ScanConfig:
    """Desk-scale scan parameters: n-bound, modulus bound, moduli of interest."""

    bound: int
    a_max: int
    ells: tuple[int, ...]

    def __post_init__(self):
        if not (self.bound >= self.a_max >= 1):
            raise ValueError("need bound >= a_max >= 1")
        for ell in self.ells:
            if not is_prime(ell):
                raise ValueError(f"{ell} is not prime")


_DEFAULT_EVALUATOR = HurwitzEvaluator()


def _modulus_for(ell: int) -> int:
    return 8 if ell == 2 else 9 if ell == 3 else ell


def _flags(ell: int, a: int, b: int, kind: str = "ramanujan") -> dict:
    if kind == "ramanujan":
        trivial = a % 4 == 0 and b % 4 in (1, 2)
    else:
        trivial = a % 4 == 0 and all(r % 4 in (1, 2) for r in square_class_members(a, b))
    return {
        "regular": is_regular(a, b),
        "maximal_regular": is_maximal_regular_shape(a, b),
        "nonholomorphic": is_nonholomorphic(a, b),
        "identically_zero": trivial,
    }


def check_ramanujan(ell: int, a: int, b: int, bound: int,
                    evaluator: HurwitzEvaluator | None = None) -> CongruenceReport:
    """Scan H(a*n + b) mod ell for n = 0..bound; refute with the least witness.

    Values with a*n + b = 1, 2 mod 4 have H = 0 and can never refute.
    """
    if not is_prime(ell) or a < 1 or bound < 1:
        raise ValueError("need prime ell, a >= 1 and bound >= 1")
    ev = evaluator or _DEFAULT_EVALUATOR
    b %= a
    status: VerifiedUpTo | Refuted = VerifiedUpTo(bound)
    top = a * bound + b
    if ev.table is not None and top < ev._table_len:
        vals = np.asarray(ev.table[b : top + 1 : a])
        bad = np.nonzero(vals % _modulus_for(ell))[0]
        if bad.size:
            n = int(bad[0])
            status = Refuted(n, int(vals[n]))
    else:
        for n in range(bound + 1):
            v = a * n + b
            if v % 4 in (1, 2):
                continue
            t = ev.t(v)
            if not ell_divides_t(t, ell):
                status = Refuted(n, t)
                break
    return CongruenceReport(ell=ell, a=a, b=b, kind="ramanujan", status=status,
                            **_flags(ell, a, b, "ramanujan"))


def check_atkin(ell: int, a: int, b: int, bound: int,
                evaluator: HurwitzEvaluator | None = None) -> CongruenceReport:
    """Scan H(n) mod ell over all n <= bound in the square class of b mod a."""
    if not is_prime(ell) or a < 1 or bound < 1:
        raise ValueError("need prime ell, a >= 1 and bound >= 1")
    ev = evaluator or _DEFAULT_EVALUATOR
    b %= a
    members = square_class_members(a, b)
    status: VerifiedUpTo | Refuted = VerifiedUpTo(bound)
    done = False
    for base in range(0, bound + 1, a):
        for r in members:
            n = base + r
            if n > bound:
                break
            if n % 4 in (1, 2):
                continue
            t = ev.t(n)
            if not ell_divides_t(t, ell):
                status = Refuted(n, t)
                done = True
                break
        if done:
            break
    return CongruenceReport(ell=ell, a=a, b=b, kind="atkin", status=status,
                            **_flags(ell, a, b, "atkin"))


def equivalence_check(ell: int, a: int, b: int, bound: int,
                      evaluator: HurwitzEvaluator | None = None) -> bool:
    """Whether the progression scan and the square-class scan reach the same verdict."""
    if ell < 3:
        raise ValueError("equivalence holds for odd primes only")
    r = check_ramanujan(ell, a, b, bound, evaluator)
    s = check_atkin(ell, a, b, bound, evaluator)
    return r.verified == s.verified


def predicted_progression(ell: int, m: int, u: int):
    """The classified progression (ell**(m+1), u * ell**m) for even m >= 2.

    Requires (-u/ell) = +1.  The output satisfies ell**3 | a, a exactly
    divides ell*b, and (-ell*b/a / ell) = +1.
    """
    from .square_classes import Progression

    if not is_prime(ell) or ell < 3:
        raise ValueError("ell must be an odd prime")
    if m < 2 or m % 2:
        raise ValueError("m must be a positive even integer")
    if kronecker(-u, ell) != 1:
        raise ValueError(f"(-{u}/{ell}) must be +1")
    a = ell ** (m + 1)
    b = u * ell**m % a
    return Progression(a, b)


def in_predicted_family(ell: int, a: int, b: int) -> bool:
    """Whether (a, b) is one of the predicted progressions for this ell."""
    e = 0
    aa = a
    while aa % ell == 0:
        aa //= ell
        e += 1
    if aa != 1 or e < 3 or e % 2 == 0:
        return False
    m = e - 1
    step = ell**m
    if b % step:
        return False
    u = b // step
    if u % ell == 0:
        return False
    return kronecker(-u, ell) == 1


@dataclass
class ClassificationReport:
    """Outcome of the exhaustive maximal-shape, non-holomorphic candidate scan.

    confirmed: family members verified at the bound.
    refuted: candidates outside the family, each with its least witness.
    subsumed: verified non-family candidates together with a strictly larger
        verified progression containing them (their congruence is real but
        not maximal, so the classification is not contradicted).
    inconclusive: verified non-family candidates with no verified parent,
        which would genuinely challenge the classification.
    family_refuted: family members refuted at the bound (should be empty;
        a non-empty list is an internal inconsistency).
    """

    ell: int
    a_max: int
    bound: int
    confirmed: list = field(default_factory=list)
    refuted: list = field(default_factory=list)
    subsumed: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)
    family_refuted: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.inconclusive and not self.family_refuted


def classify_maximal_nonholomorphic(ell: int, a_max: int, bound: int,
                                    evaluator: HurwitzEvaluator | None = None) -> ClassificationReport:
    """Scan all candidates with the maximal-regular shape that are non-holomorphic.

    Family members must verify; everything else must either refute or be
    subsumed by a strictly larger verified congruence.  Any other outcome is
    flagged, never dropped.
    """
    if not is_prime(ell) or ell < 3:
        raise ValueError("ell must be an odd prime")
    ev = evaluator or _DEFAULT_EVALUATOR
    report = ClassificationReport(ell=ell, a_max=a_max, bound=bound)
    memo: dict[tuple[int, int], CongruenceReport] = {}

    def checked(a: int, b: int) -> CongruenceReport:
        key = (a, b % a)
        if key not in memo:
            memo[key] = check_ramanujan(ell, a, b, bound, ev)
        return memo[key]

    def verified_parent(a: int, b: int):
        # a strictly larger progression is (a/q)Z + b for a prime q | a
        for q in sorted(set(_prime_divisors(a))):
            pa = a // q
            if pa >= 1 and checked(pa, b % pa).verified:
                return (pa, b % pa)
        return None

    for a in range(1, a_max + 1):
        for b in range(a):
            if not is_maximal_regular_shape(a, b) or not is_nonholomorphic(a, b):
                continue
            rep = checked(a, b)
            family = in_predicted_family(ell, a, b)
            if family and rep.verified:
                report.confirmed.append(rep)
            elif family:
                report.family_refuted.append(rep)
            elif not rep.verified:
                report.refuted.append(rep)
            else:
                parent = verified_parent(a, b)
                if parent is not None:
                    report.subsumed.append((rep, parent))
                else:
                    report.inconclusive.append(rep)
    return report


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def ell_div_ab_check(report: CongruenceReport) -> bool:
    """Necessary condition for verified non-holomorphic reports: ell | a and ell | b."""
    if not report.verified or not report.nonholomorphic:
        raise ValueError("check applies to verified non-holomorphic reports")
    return report.a % report.ell == 0 and report.b % report.ell == 0


def scan_progressions(config: ScanConfig,
                      evaluator: HurwitzEvaluator | None = None,
                      jobs: int = 1, include_trivial: bool = False) -> list[CongruenceReport]:
    """All verified progression congruences with a <= a_max at the given bound.

    Progressions whose values all sit in the 1, 2 mod 4 classes carry H = 0
    identically and are omitted unless include_trivial is set.  Workers
    split the (a, b) candidate list; the merge sorts by (a, b, ell) so the
    output never depends on scheduling.
    """
    ev = evaluator or _DEFAULT_EVALUATOR
    tasks = [(ell, a, b) for a in range(1, config.a_max + 1)
             for b in range(a) for ell in config.ells]

    def run(task):
        ell, a, b = task
        return check_ramanujan(ell, a, b, config.bound, ev)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run, tasks, chunksize=64))
    else:
        reports = [run(t) for t in tasks]
    found = [r for r in reports if r.verified and (include_trivial or not r.identically_zero)]
    found.sort(key=lambda r: (r.a, r.b, r.ell))
    return found


# ---------------------------------------------------------------------------
# Characterization of congruences modulo 2.

def _mod2_normalized(a: int, b: int) -> bool:
    if a < 1:
        return False
    b %= a
    if b == 0 and a > 1:
        return False
    for p, e in _factor_pairs(a):
        if p == 2:
            if e < 3 or ord_p(b, 2) != e - 3:
                return False
        elif ord_p(b, p) != e - 1:
            return False
    return True


def _factor_pairs(n: int):
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            yield d, e
        d += 1
    if n > 1:
        yield n, 1


@lru_cache(maxsize=1024)
def _mod2_witness_residues(a: int) -> frozenset[int]:
    """Residues mod a containing some v with H(v) not divisible by 2.

    Those v are exactly the values 2**e * h**2 with e >= 2 and h odd (the
    discriminants with fundamental part -4 or -8) and the values
    q**(1 + 4k) * g**2 with q = 3 mod 4 prime, g odd, q not dividing g (odd
    part a prime power to an exponent 1 mod 4); their class numbers are odd
    by genus theory while every other H is even in the 12*H normalization.
    Exponent cycles are finite mod a, and which coprime classes contain
    primes q = 3 mod 4 is settled by the infinitude of primes in compatible
    residue classes, so the set is computed exactly.
    """
    odd_squares = sorted({g * g % a for g in range(1, 2 * a, 2)})
    out = set()
    # Powers of two times odd squares: exponents cycle mod a after a preperiod.
    seen_vals = set()
    e = 2
    val = 4 % a
    while val not in seen_vals:
        seen_vals.add(val)
        out.update(val * s % a for s in odd_squares)
        e += 1
        val = val * 2 % a
        if e > 2 * a + 8:  # cannot happen; the orbit has at most a points
            break
    # Odd prime powers q**(1+4k) times coprime odd squares, q = 3 mod 4.
    # Classes coprime to a that contain such primes contribute with q free
    # of extra constraints, so g ranges over all odd residues.
    if a % 2 == 0 and a % 4 != 0:
        admissible = [r for r in range(a) if gcd(r, a) == 1]
    elif a % 4 == 0:
        admissible = [r for r in range(a) if gcd(r, a) == 1 and r % 4 == 3]
    else:
        admissible = [r for r in range(a) if gcd(r, a) == 1]
    sq_set = set(odd_squares)
    for r in admissible:
        orbit = set()
        v = r % a
        step = pow(r, 4, a)
        while v not in orbit:
            orbit.add(v)
            v = v * step % a
        for t in orbit:
            out.update(t * s % a for s in sq_set)
    # Primes q dividing a need their own exponent orbit and g coprime to q.
    for q, _ in _factor_pairs(a):
        if q == 2 or q % 4 != 3:
            continue
        gsq = {g * g % a for g in range(1, 2 * a, 2) if g % q != 0}
        vals = set()
        v = q % a
        step = pow(q, 4, a)
        for _ in range(a + 8):
            if v in vals:
                break
            vals.add(v)
            v = v * step % a
        for t in vals:
            out.update(t * s % a for s in gsq)
    return frozenset(out)


def mod2_congruence_predicted(a: int, b: int) -> bool:
    """Predict H(a*n + b) = 0 mod 2 for all n, on normalized input.

    Normalization: ord_p(b) = ord_p(a) - 1 for odd p | a, and ord_2(b) =
    ord_2(a) - 3 when 2 | a.  The congruence holds exactly when the
    progression avoids every residue class that contains a value whose
    Hurwitz number is not divisible by 2; see _mod2_witness_residues for
    the two witness families.  The prediction never evaluates H.
    """
    if not _mod2_normalized(a, b):
        raise ValueError(f"({a}, {b}) is not normalized for the mod-2 characterization")
    return b % a not in _mod2_witness_residues(a)


def mod2_scan(a: int, b: int, bound: int,
              evaluator: HurwitzEvaluator | None = None) -> int | None:
    """Direct mod-2 scan of H(a*n + b); returns the least witness or None."""
    rep = check_ramanujan(2, a, b, bound, evaluator)
    return None if rep.verified else rep.status.witness


# ---------------------------------------------------------------------------
# Coupled square classes: congruences on a*p**2 Z + b propagate to siblings.

@dataclass
class CouplingReport:
    """Sibling congruence reports for a verified base on (a * p**2) Z + b.

    ell_divides_cofactor records whether ell | a; a verified base with
    ell not dividing a is outside the asserted regime of the coupling
    argument and is flagged as such rather than rejected.
    """

    ell: int
    a: int
    p: int
    b: int
    bound: int
    base: CongruenceReport
    siblings: list[CongruenceReport]
    ell_divides_cofactor: bool
    warning: str | None = None

    @property
    def all_verified(self) -> bool:
        return all(s.verified for s in self.siblings)


def check_sibling_congruences(ell: int, a: int, p: int, b: int, bound: int,
                              evaluator: HurwitzEvaluator | None = None) -> CouplingReport:
    """Verify the coupled family: all b' mod a*p**2 with p || b', b' = b (mod a).

    Requires p prime with p not dividing a, p != ell, p exactly dividing b,
    and a verified base congruence on (a * p**2) Z + b at the given bound.
    """
    if not is_prime(ell) or ell < 3:
        raise ValueError("ell must be an odd prime")
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if p == ell:
        raise ValueError("hypothesis violated: p = ell")
    if a % p == 0:
        raise ValueError("hypothesis violated: p | a")
    if b == 0 or ord_p(b, p) != 1:
        raise ValueError("hypothesis violated: p must exactly divide b")
    ev = evaluator or _DEFAULT_EVALUATOR
    modulus = a * p * p
    base = check_ramanujan(ell, modulus, b, bound, ev)
    if not base.verified:
        raise ValueError(
            f"base congruence refuted at n = {base.status.witness}; coupling needs a verified base")
    siblings = []
    for bp in range(b % a, modulus, a):
        if bp == 0 or ord_p(bp, p) != 1:
            continue
        siblings.append(check_ramanujan(ell, modulus, bp, bound, ev))
    divides = a % ell == 0
    warning = None
    if not divides:
        warning = (f"verified base with ell = {ell} not dividing a = {a}: outside the "
                   f"asserted regime for coupled congruences, result recorded as-is")
    return CouplingReport(ell=ell, a=a, p=p, b=b, bound=bound, base=base,
                          siblings=siblings, ell_divides_cofactor=divides, warning=warning)
