"""Command-line surface: single-curve reports, theory tables, censuses,
empirical runs and the twist / split-Cartan family generators.

Exit codes: 0 success, 1 internal error, 2 invalid input.  All randomness
flows from --seed; --threads (default: env ELLSTAT_THREADS, then 1) only
changes wall time, never output bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .curves import (
    SingularCurveError,
    WeierstrassModel,
    curve_from_j,
    format_rational,
    j_invariant,
    quadratic_twist,
    zywina_j2,
)
from .density import CertifiedValue, density_report, frak_d_p, frak_d_p_prime, sp_doubleprime_density
from .finitefield import census_torsion_classes, d_count
from .harness import SampleSpec, estimate, kodaira_frequency
from .localdata import bad_primes, conductor, tate
from .quadforms import hurwitz_class_number
from .arith import factorize


def _fail(msg: str) -> SystemExit:
    print(f"error: {msg}", file=sys.stderr)
    return SystemExit(2)


def _parse_curve(text: str) -> WeierstrassModel:
    try:
        return WeierstrassModel.from_string(text)
    except ValueError as exc:
        raise _fail(f"bad curve spec: {exc}")


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("ELLSTAT_THREADS", "1")))
    except ValueError:
        return 1


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def cmd_local(args) -> int:
    model = _parse_curve(args.curve)
    try:
        if args.prime is not None:
            data = tate(model, args.prime)
            payload = {"curve": str(model), "local": [data.to_json_dict()]}
            lines = [
                f"curve {model}  at {args.prime}: {data.kodaira.label}  "
                f"c={data.tamagawa} f={data.conductor_exponent} "
                f"v(delta_min)={data.v_min_delta} {data.reduction}"
            ]
        else:
            locs = [tate(model, ell) for ell in bad_primes(model)]
            N = 1
            for d in locs:
                N *= d.prime**d.conductor_exponent
            payload = {
                "curve": str(model),
                "j": format_rational(j_invariant(model)),
                "conductor": N,
                "local": [d.to_json_dict() for d in locs],
            }
            lines = [f"curve {model}", f"j = {payload['j']}", f"conductor = {N}"]
            for d in locs:
                lines.append(
                    f"  ell={d.prime}: {d.kodaira.label}  c={d.tamagawa} "
                    f"f={d.conductor_exponent} {d.reduction}"
                )
    except SingularCurveError as exc:
        raise _fail(f"singular: {exc}")
    _emit(args, payload, lines)
    return 0


def cmd_theory(args) -> int:
    if args.p == 2 or args.p % 2 == 0:
        raise _fail("theory needs an odd prime (p=2 is out of range)")
    try:
        tol = Fraction(args.tol)
    except ValueError:
        raise _fail(f"bad tolerance {args.tol!r}")
    rep = density_report(args.p, tol)
    payload = rep.to_json_dict()
    lines = [
        f"p = {rep.p}",
        f"frak_d_p        in {rep.d_p}",
        f"frak_d_p'       = {format_rational(rep.d_p_prime)} = {float(rep.d_p_prime):.7g}",
        f"d(S_p'')        = {format_rational(rep.sp2_density)} = {float(rep.sp2_density):.7g}",
        f"main bound      in {rep.bound}",
        f"conjecture mass in {rep.conjecture_mass}",
    ]
    _emit(args, payload, lines)
    return 0


def cmd_census(args) -> int:
    if args.p == 2 or args.p % 2 == 0:
        raise _fail("census needs an odd prime")
    res = census_torsion_classes(args.p)
    payload = res.to_json_dict()
    lines = [f"p = {args.p}", f"classes with p | #E = {res.classes}"]
    if args.with_d:
        dres = d_count(args.p)
        payload["d"] = dres.d
        payload["d_over_p5"] = format_rational(dres.d_over_p5)
        lines.append(f"d(p) = {dres.d}  (d/p^5 = {format_rational(dres.d_over_p5)})")
    _emit(args, payload, lines)
    return 0


def cmd_hurwitz(args) -> int:
    try:
        cls = hurwitz_class_number(args.disc)
    except ValueError as exc:
        raise _fail(str(exc))
    payload = cls.to_json_dict()
    lines = [f"H({args.disc}) = {cls.h}"]
    lines += [f"  ({f.a},{f.b},{f.c})" for f in cls.representatives]
    _emit(args, payload, lines)
    return 0


def cmd_empirical(args) -> int:
    try:
        spec = SampleSpec(
            height=args.height,
            p=args.p,
            count=args.samples,
            exhaustive=args.exhaustive,
            seed=args.seed,
            chunk_size=args.chunk_size,
            z=args.z,
            wilson=args.wilson,
        )
    except ValueError as exc:
        raise _fail(str(exc))
    threads = args.threads or _default_threads()
    if args.kodaira_at is not None:
        rep = kodaira_frequency(spec, args.kodaira_at, threads=threads)
        if args.format == "json":
            print(json.dumps(rep.to_json_dict(), indent=2, sort_keys=True))
        else:
            sys.stdout.write(rep.to_csv())
        return 0
    theory = {
        "bad_at_p": CertifiedValue.exact(sp_doubleprime_density(spec.p)),
        "tamagawa_divisible": CertifiedValue(Fraction(0), frak_d_p(spec.p).hi),
        "anomalous_good": CertifiedValue(Fraction(0), frak_d_p_prime(spec.p)),
    }
    rep = estimate(spec, theory, threads=threads)
    if args.format == "json":
        print(rep.to_json())
    else:
        sys.stdout.write(rep.to_csv())
    return 0


def _squarefree_range(lo: int, hi: int):
    for t in range(lo, hi + 1):
        if t == 0:
            continue
        if all(e == 1 for e in factorize(t).values()):
            yield t


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("..")
    try:
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise _fail(f"bad range {text!r}; expected lo..hi")
    if hi_i < lo_i:
        raise _fail(f"empty range {text!r}")
    return lo_i, hi_i


def cmd_families(args) -> int:
    rows = []
    if args.family == "twist":
        if not args.base:
            raise _fail("--family twist needs --base")
        base = _parse_curve(args.base)
        lo, hi = _parse_range(args.range)
        for t in _squarefree_range(lo, hi):
            E = quadratic_twist(base, t)
            rows.append((str(t), E))
    else:
        lo, hi = _parse_range(args.range)
        for t in range(lo, hi + 1):
            if t == 0:
                continue
            j = zywina_j2(Fraction(t))
            E = curve_from_j(
                j,
                minimize_conductor=args.min_search > 0,
                twist_bound=args.min_search,
            )
            rows.append((str(t), E))
    payload = []
    lines = []
    for t, E in rows:
        try:
            N = conductor(E)
            locs = [tate(E, ell).to_json_dict() for ell in bad_primes(E)]
            jstr = format_rational(j_invariant(E))
        except SingularCurveError:
            N, locs, jstr = None, [], None
        payload.append({"t": t, "curve": str(E), "j": jstr, "conductor": N, "local": locs})
        lines.append(f"t={t}  curve={E}  j={jstr}  conductor={N}")
    _emit(args, {"family": args.family, "curves": payload}, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ellstat",
        description="Local invariants and height-ordered statistics of elliptic curves over Q.",
    )
    ap.add_argument("--version", action="version", version=f"ellstat {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("local", help="Tate data and conductor of one curve")
    p.add_argument("--curve", required=True, help='coefficients "a1,a2,a3,a4,a6"')
    p.add_argument("--prime", type=int, default=None)
    add_format(p)
    p.set_defaults(func=cmd_local)

    p = sub.add_parser("theory", help="density formulas and bounds at an odd prime")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--tol", default="1/1000000000")
    add_format(p)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("census", help="F_p isomorphism classes with p-torsion")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--with-d", action="store_true", help="also compute exhaustive d(p)")
    add_format(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("hurwitz", help="class number H(disc) with representatives")
    p.add_argument("--disc", type=int, required=True)
    add_format(p)
    p.set_defaults(func=cmd_hurwitz)

    p = sub.add_parser("empirical", help="seeded sampling run classified at p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chunk-size", type=int, default=65536)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--z", type=float, default=4.0)
    p.add_argument("--wilson", action="store_true")
    p.add_argument("--kodaira-at", type=int, default=None, metavar="ELL",
                   help="report the Kodaira-type distribution at ELL instead")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_empirical)

    p = sub.add_parser("families", help="quadratic twist / split-Cartan families")
    p.add_argument("--family", choices=("twist", "zywina"), required=True)
    p.add_argument("--base", default=None, help="base curve for twists")
    p.add_argument("--range", required=True, help="t range lo..hi")
    p.add_argument("--min-search", type=int, default=0,
                   help="twist bound for the smallest-conductor search (zywina)")
    add_format(p)
    p.set_defaults(func=cmd_families)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except BrokenPipeError:
        return 0
    except Exception as exc:  # internal failure contract: exit 1
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
