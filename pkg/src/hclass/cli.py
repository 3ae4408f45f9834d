"""Command line surface binding the package into reproducible experiments.

Exit codes: 0 success, 1 refutation or not-found (an expected negative),
2 usage error, 3 internal inconsistency (a violated structural invariant).
Every run prints its own invocation so reports can be reproduced; JSON
output is byte-stable across runs for a fixed cache.
"""

import argparse
import json
import os
import sys

from .congruence import (
    ScanConfig,
    check_atkin,
    check_ramanujan,
    check_sibling_congruences,
    classify_maximal_nonholomorphic,
    scan_progressions,
)
from .fields import (
    SearchExhausted,
    SplittingSpec,
    check_divisibility_family,
    find_field_with_conditions,
    find_indivisible_field,
    progression_from_splitting_spec,
    splitting_spec_from_progression,
)
from .hurwitz import ClassNumberCache, HurwitzEvaluator, build_cache, hurwitz_H
from .qseries import eisenstein_series, hurwitz_generating_series, theta_cubed
from .transform import (
    AccuracyError,
    SlashContext,
    sample_points,
    transformed_expansion,
    verify_transformation,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INCONSISTENT = 3

CACHE_ENV = "HURWITZ_CACHE"


def _emit(args, payload: dict, text_lines) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    elif args.format == "csv":
        rows = payload.get("csv") or []
        for row in rows:
            print(",".join(str(x) for x in row))
    else:
        for line in text_lines:
            print(line)


def _invocation(argv) -> str:
    return "hclass " + " ".join(argv)


def _load_evaluator(args) -> HurwitzEvaluator:
    path = getattr(args, "cache", None) or os.environ.get(CACHE_ENV)
    cache = None
    if path and os.path.exists(path):
        cache = ClassNumberCache.load(path)
    return HurwitzEvaluator(cache=cache)


def _parse_tau(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--cache", help=f"class number cache file (default ${CACHE_ENV})")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="hclass", description=__doc__)
    sub = top.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("hurwitz", help="Hurwitz class number values")
    ps = p.add_subparsers(dest="action", required=True)
    c = ps.add_parser("compute", help="print H(n)")
    c.add_argument("--n", type=int, required=True)
    _add_common(c)

    p = sub.add_parser("cache", help="class number cache maintenance")
    ps = p.add_subparsers(dest="action", required=True)
    c = ps.add_parser("build", help="build h(-D) for fundamental D <= dmax")
    c.add_argument("--dmax", type=int, required=True)
    c.add_argument("--out", required=True)
    _add_common(c)

    p = sub.add_parser("congruence", help="scan and check congruences")
    ps = p.add_subparsers(dest="action", required=True)
    c = ps.add_parser("check", help="check one progression or square class")
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--a", type=int, required=True)
    c.add_argument("--b", type=int, required=True)
    c.add_argument("--bound", type=int, required=True)
    c.add_argument("--atkin", action="store_true", help="scan the square class instead")
    _add_common(c)
    c = ps.add_parser("scan", help="find verified congruences with a <= amax")
    c.add_argument("--ell", type=int, action="append", required=True,
                   help="may be repeated for several moduli")
    c.add_argument("--amax", type=int, required=True)
    c.add_argument("--bound", type=int, required=True)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--include-trivial", action="store_true",
                   help="also report progressions on which H vanishes identically")
    _add_common(c)

    p = sub.add_parser("classify", help="classification experiments")
    ps = p.add_subparsers(dest="action", required=True)
    c = ps.add_parser("verify-theorem-b",
                      help="exhaust maximal-shape non-holomorphic candidates")
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--amax", type=int, required=True)
    c.add_argument("--bound", type=int, required=True)
    _add_common(c)

    p = sub.add_parser("fields", help="quadratic field splitting dictionary")
    ps = p.add_subparsers(dest="action", required=True)
    c = ps.add_parser("find", help="least field witness with h prime to ell")
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--split", default="", help="comma separated odd primes")
    c.add_argument("--inert", default="")
    c.add_argument("--ramified", default="")
    c.add_argument("--dmax", type=int, required=True)
    _add_common(c)
    c = ps.add_parser("map", help="translate progressions to splitting data and back")
    c.add_argument("--a", type=int)
    c.add_argument("--b", type=int)
    c.add_argument("--refine", action="store_true")
    c.add_argument("--split", default="")
    c.add_argument("--inert", default="")
    c.add_argument("--ramified", default="")
    _add_common(c)
    c = ps.add_parser("divisibility", help="assert ell | h over a matching family")
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--a", type=int, required=True)
    c.add_argument("--b", type=int, required=True)
    c.add_argument("--dmax", type=int, required=True)
    _add_common(c)

    p = sub.add_parser("coupling", help="sibling congruences on a p**2 progressions")
    c = p
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--a", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--b", type=int, required=True)
    c.add_argument("--bound", type=int, required=True)
    _add_common(c)

    p = sub.add_parser("lemma41", help="two-sided transformation identity tools")
    ps = p.add_subparsers(dest="action", required=True)
    c = ps.add_parser("verify", help="compare the sieve-slash expansion numerically")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--t", type=int, required=True)
    c.add_argument("--C", type=int, required=True)
    c.add_argument("--B", type=int, default=0)
    c.add_argument("--level", type=int, default=1)
    c.add_argument("--tau", default=None, help="complex like -0.25+0.5i (default: auto)")
    c.add_argument("--tol", type=float, default=1e-6)
    c.add_argument("--trunc", type=int, default=6000)
    _add_common(c)
    c = ps.add_parser("dump", help="dump a series as CSV (exponent_num, exponent_den, coeff)")
    c.add_argument("--series", required=True,
                   choices=("theta3", "hurwitz", "e2", "e4", "e6", "rhs"))
    c.add_argument("--trunc", type=int, default=50)
    c.add_argument("--m", type=int)
    c.add_argument("--t", type=int)
    c.add_argument("--C", type=int)
    c.add_argument("--B", type=int, default=0)
    c.add_argument("--level", type=int, default=1)
    _add_common(c)

    return top


def _cmd_hurwitz(args, argv) -> int:
    h = hurwitz_H(args.n, _load_evaluator(args).cache)
    payload = {"invocation": _invocation(argv), "n": args.n, "H": str(h), "t": h.t}
    _emit(args, payload, [f"H({args.n}) = {h} (t = {h.t})"])
    return EXIT_OK


def _cmd_cache_build(args, argv) -> int:
    cache = build_cache(args.dmax)
    cache.save(args.out)
    payload = {"invocation": _invocation(argv), "d_max": args.dmax,
               "entries": len(cache.h), "out": args.out}
    _emit(args, payload, [f"wrote {len(cache.h)} class numbers up to D = {args.dmax} to {args.out}"])
    return EXIT_OK


def _cmd_congruence_check(args, argv) -> int:
    ev = _load_evaluator(args)
    fn = check_atkin if args.atkin else check_ramanujan
    rep = fn(args.ell, args.a, args.b, args.bound, ev)
    payload = rep.to_json_dict()
    payload["invocation"] = _invocation(argv)
    if rep.verified:
        line = (f"VerifiedUpTo({args.bound}): H values on the scanned set are "
                f"0 mod {args.ell}")
    else:
        line = (f"Refuted at n = {rep.status.witness} "
                f"(t = 12*H = {rep.status.witness_t})")
    _emit(args, payload, [line])
    return EXIT_OK if rep.verified else EXIT_NEGATIVE


def _cmd_congruence_scan(args, argv) -> int:
    ev = _load_evaluator(args)
    config = ScanConfig(bound=args.bound, a_max=args.amax, ells=tuple(args.ell))
    found = scan_progressions(config, ev, jobs=args.jobs,
                              include_trivial=args.include_trivial)
    payload = {"invocation": _invocation(argv),
               "found": [r.to_json_dict() for r in found],
               "csv": [(r.ell, r.a, r.b, "verified_up_to", args.bound) for r in found]}
    lines = [f"{len(found)} verified congruences (a <= {args.amax}, bound {args.bound})"]
    lines += [f"  H({r.a} n + {r.b}) = 0 mod {r.ell}" for r in found]
    _emit(args, payload, lines)
    return EXIT_OK if found else EXIT_NEGATIVE


def _cmd_classify(args, argv) -> int:
    ev = _load_evaluator(args)
    rep = classify_maximal_nonholomorphic(args.ell, args.amax, args.bound, ev)
    payload = {
        "invocation": _invocation(argv),
        "ell": rep.ell,
        "a_max": rep.a_max,
        "bound": rep.bound,
        "confirmed": [[r.a, r.b] for r in rep.confirmed],
        "refuted": [[r.a, r.b, r.status.witness] for r in rep.refuted],
        "subsumed": [[r.a, r.b, list(parent)] for r, parent in rep.subsumed],
        "inconclusive": [[r.a, r.b] for r in rep.inconclusive],
        "family_refuted": [[r.a, r.b] for r in rep.family_refuted],
    }
    lines = [
        f"candidates with the maximal-regular shape, non-holomorphic, a <= {args.amax}:",
        f"  confirmed family members: {[(r.a, r.b) for r in rep.confirmed]}",
        f"  refuted: {len(rep.refuted)} (least witnesses recorded)",
        f"  subsumed by larger verified congruences: {[(r.a, r.b) for r, _ in rep.subsumed]}",
        f"  inconclusive: {[(r.a, r.b) for r in rep.inconclusive]}",
    ]
    _emit(args, payload, lines)
    if rep.family_refuted or rep.inconclusive:
        return EXIT_INCONSISTENT
    return EXIT_OK


def _parse_primes(text: str) -> frozenset:
    if not text:
        return frozenset()
    return frozenset(int(x) for x in text.split(",") if x)


def _cmd_fields_find(args, argv) -> int:
    ev = _load_evaluator(args)
    s_plus = _parse_primes(args.split)
    s_minus = _parse_primes(args.inert)
    s_zero = _parse_primes(args.ramified)
    try:
        if s_minus or s_zero:
            spec = SplittingSpec(s_plus, s_minus, s_zero)
            witness = find_field_with_conditions(args.ell, spec, args.dmax, ev.cache)
        else:
            witness = find_indivisible_field(args.ell, s_plus, args.dmax, ev.cache)
    except SearchExhausted as exc:
        _emit(args, {"invocation": _invocation(argv), "error": str(exc)}, [str(exc)])
        return EXIT_NEGATIVE
    payload = witness.to_json_dict()
    payload["invocation"] = _invocation(argv)
    _emit(args, payload, [f"D = {witness.D}, h = {witness.h}, splitting {witness.splitting}"])
    return EXIT_OK


def _cmd_fields_map(args, argv) -> int:
    if args.a is not None:
        if args.b is None:
            print("fields map --a needs --b", file=sys.stderr)
            return EXIT_USAGE
        spec = splitting_spec_from_progression(args.a, args.b, refine=args.refine)
        payload = spec.to_json_dict()
        payload["invocation"] = _invocation(argv)
        _emit(args, payload, [f"progression ({args.a}, {args.b}) -> {spec.to_json_dict()}"])
        return EXIT_OK
    spec = SplittingSpec(_parse_primes(args.split), _parse_primes(args.inert),
                         _parse_primes(args.ramified))
    a, bs = progression_from_splitting_spec(spec)
    payload = {"invocation": _invocation(argv), "a": a, "b_admissible": bs}
    _emit(args, payload, [f"a = {a}, admissible b: {bs}"])
    return EXIT_OK


def _cmd_fields_divisibility(args, argv) -> int:
    ev = _load_evaluator(args)
    spec = splitting_spec_from_progression(args.a, args.b, refine=True)
    rep = check_divisibility_family(args.ell, spec, args.dmax, ev.cache)
    payload = rep.to_json_dict()
    payload["invocation"] = _invocation(argv)
    lines = [f"matched {rep.matched} fields; violations: {rep.violations}"]
    if rep.inconclusive:
        lines.append("inconclusive: no field matches the spec below the bound")
    _emit(args, payload, lines)
    return EXIT_OK if rep.consistent else EXIT_NEGATIVE


def _cmd_coupling(args, argv) -> int:
    ev = _load_evaluator(args)
    rep = check_sibling_congruences(args.ell, args.a, args.p, args.b, args.bound, ev)
    payload = {
        "invocation": _invocation(argv),
        "ell": rep.ell, "a": rep.a, "p": rep.p, "b": rep.b, "bound": rep.bound,
        "ell_divides_cofactor": rep.ell_divides_cofactor,
        "warning": rep.warning,
        "siblings": [s.to_json_dict() for s in rep.siblings],
    }
    lines = [f"base verified; {len(rep.siblings)} sibling classes"]
    for s in rep.siblings:
        lines.append(f"  b' = {s.b}: {'verified' if s.verified else 'REFUTED at n=%d' % s.status.witness}")
    if rep.warning:
        lines.append(f"warning: {rep.warning}")
    _emit(args, payload, lines)
    return EXIT_OK if rep.all_verified else EXIT_INCONSISTENT


def _cmd_lemma41_verify(args, argv) -> int:
    ctx = SlashContext(weight_num=3, level=args.level, m=args.m, t=args.t,
                       C=args.C, B=args.B)
    series = theta_cubed(args.trunc)
    taus = [_parse_tau(args.tau)] + sample_points(ctx) if args.tau else sample_points(ctx)
    try:
        chk = verify_transformation(ctx, series, taus, tol=args.tol)
    except AccuracyError as exc:
        _emit(args, {"invocation": _invocation(argv), "error": str(exc)}, [str(exc)])
        return EXIT_USAGE
    payload = {
        "invocation": _invocation(argv),
        "m": args.m, "t": args.t, "C": args.C, "B": args.B,
        "phase_re": chk.phase.real, "phase_im": chk.phase.imag,
        "phase_canonical": chk.phase_canonical,
        "max_rel_err": chk.max_rel_err,
        "convergence_shift": chk.convergence_shift,
        "pass": chk.passes(args.tol),
    }
    lines = [
        f"phase = {chk.phase:.8f} ({'canonical' if chk.phase_canonical else 'NOT canonical, flag for review'})",
        f"max relative error after phase lock = {chk.max_rel_err:.3e} (tol {args.tol:g})",
        f"truncation doubling shift = {chk.convergence_shift:.3e}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK if chk.passes(args.tol) else EXIT_INCONSISTENT


def _cmd_lemma41_dump(args, argv) -> int:
    if args.series == "rhs":
        if args.m is None or args.t is None or args.C is None:
            print("rhs dump needs --m --t --C", file=sys.stderr)
            return EXIT_USAGE
        ctx = SlashContext(weight_num=3, level=args.level, m=args.m, t=args.t,
                           C=args.C, B=args.B)
        series = transformed_expansion(ctx, theta_cubed(args.trunc))
    elif args.series == "theta3":
        series = theta_cubed(args.trunc)
    elif args.series == "hurwitz":
        series = hurwitz_generating_series(args.trunc, _load_evaluator(args))
    else:
        series = eisenstein_series(int(args.series[1]), args.trunc)
    rows = [(j, series.denom, str(series.coeffs[j])) for j in sorted(series.coeffs)]
    if args.format == "json":
        payload = {"invocation": _invocation(argv), "coeffs": [list(r) for r in rows]}
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        print("exponent_num,exponent_den,coeff")
        for j, den, c in rows:
            print(f"{j},{den},{c}")
    return EXIT_OK


def _merge_dash_values(argv: list) -> list:
    # argparse mistakes values like "-0.25+0.5i" for flags; fold them into
    # --opt=value form for the options that legitimately take such values
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--tau",) and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _merge_dash_values(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.verb == "hurwitz":
            return _cmd_hurwitz(args, argv)
        if args.verb == "cache":
            return _cmd_cache_build(args, argv)
        if args.verb == "congruence":
            if args.action == "check":
                return _cmd_congruence_check(args, argv)
            return _cmd_congruence_scan(args, argv)
        if args.verb == "classify":
            return _cmd_classify(args, argv)
        if args.verb == "fields":
            if args.action == "find":
                return _cmd_fields_find(args, argv)
            if args.action == "map":
                return _cmd_fields_map(args, argv)
            return _cmd_fields_divisibility(args, argv)
        if args.verb == "coupling":
            return _cmd_coupling(args, argv)
        if args.verb == "lemma41":
            if args.action == "verify":
                return _cmd_lemma41_verify(args, argv)
            return _cmd_lemma41_dump(args, argv)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
