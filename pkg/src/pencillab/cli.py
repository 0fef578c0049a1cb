"""``pencillab`` command-line interface.

Subcommands::

    pencillab analyze PENCIL.json
    pencillab reduce PENCIL.json PLANE.json [--at S:T ...]
    pencillab isotopy N [--filter PRED ...]
    pencillab count PENCIL.json --prime P [--ext 2] [--r R] [--ell PLANE.json]
    pencillab verify [--seed S] [--trials T] [--jobs J]

JSON on stdout is the interchange format; ``--format text`` prints a human
summary instead.  Exit codes:

    0  success                       6  internal inconsistency / degenerate input
    2  usage error (argparse)        7  bad reduction at the chosen prime
    3  parse error / malformed input 8  enumeration ceiling exceeded
    4  singular pencil               9  property battery failure
    5  plane not on X / rank defect 10  dimension outside the supported range
"""

from __future__ import annotations

import argparse
import sys
import warnings

from . import fforacle, krasnov, verdict
from .errors import InvalidDimension, ParseError, PencilError, SingularPencil, SubspaceNotOnX
from .exact import format_rat, rat, signature_of
from .pencil import contains_subspace, hyperbolic_reduce, reduced_fiber, to_standard_position, validate_smooth
from .poly import isolate_real_roots
from .serialize import dumps, load_pencil, load_subspace, reduced_to_json, subspace_to_json

EXIT_PROPERTY_FAILURE = 9


# --- analyze ---------------------------------------------------------------


def analyze_report(source) -> dict:
    p, digest = load_pencil(source)
    sm = validate_smooth(p)
    if not sm:
        raise SingularPencil(f"pencil is singular; repeated factor {sm.witness}", sm.witness)
    iso = isolate_real_roots(sm.discriminant)
    rep = krasnov.krasnov_of_pencil(p)
    report = {
        "input": {"sha256": digest, "N": p.N},
        "smooth": True,
        "discriminant": {
            "coefficients": sm.discriminant.to_json(),
            "squarefree": True,
            "real_roots": iso.to_json(),
        },
        "walk": rep.walk.to_json(),
        "invariant": list(rep.invariant.runs),
        "invariant_text": str(rep.invariant),
        "i_min": rep.hf.i_min,
        "h": rep.hf.h,
        "f": rep.hf.f,
    }
    if p.N >= 3:
        report["verdicts"] = verdict.decide(p.N, rep.invariant).to_json()
    else:
        report["verdicts"] = None
    return report


def _analyze_text(rep: dict) -> str:
    lines = [
        f"N = {rep['input']['N']}  (sha256 {rep['input']['sha256'][:16]})",
        f"Delta coefficients: {' '.join(rep['discriminant']['coefficients'])}",
        f"real roots of Delta: {len(rep['discriminant']['real_roots']['intervals']) + int(rep['discriminant']['real_roots']['root_at_infinity'])}",
        f"steps: {rep['walk']['steps'] or '(none)'}",
        f"Krasnov invariant: {rep['invariant_text']}   h = {rep['h']}   f = {rep['f']}",
    ]
    if rep["verdicts"]:
        for row in rep["verdicts"]["rows"]:
            cells = ", ".join(
                f"{k}={row[k]['value']}"
                for k in ("fano_real_point", "q_r_real_connected", "fano_R_rational", "fano_R_unirational")
            )
            lines.append(f"  r={row['r']}: {cells}")
        for k, v in rep["verdicts"]["special"].items():
            lines.append(f"  {k}: {v['value']}  [{v['citation']}]")
    return "\n".join(lines) + "\n"


# --- reduce ----------------------------------------------------------------


def parse_point(text: str):
    """``S:T`` (each a rational) or a single rational u meaning [u:1]."""
    try:
        if ":" in text:
            s, t = text.split(":")
            return rat(s), rat(t)
        return rat(text), rat(1)
    except ValueError as exc:
        raise ParseError(f"bad point {text!r}") from exc


def reduce_report(pencil_source, plane_source, points=()) -> dict:
    p, digest = load_pencil(pencil_source)
    ell = load_subspace(plane_source)
    sp = to_standard_position(p, ell)
    rp = hyperbolic_reduce(p, ell)
    out = {
        "input": {"sha256": digest, "N": p.N},
        "plane": subspace_to_json(ell),
        "change_of_basis": [[format_rat(v) for v in row] for row in sp.change_of_basis],
        "reduced": reduced_to_json(rp),
    }
    if points:
        fibers = []
        delta = p.discriminant()
        for st in points:
            fib = reduced_fiber(p, ell, st)
            full = signature_of(p.fiber(*st))
            red = signature_of(fib.gram)
            fibers.append(
                {
                    "point": [format_rat(st[0]), format_rat(st[1])],
                    "on_discriminant": delta(*st) == 0,
                    "gram": [[format_rat(v) for v in row] for row in fib.gram.entries],
                    "fiber_signature": list(full),
                    "reduced_signature": list(red),
                    "corank": red.corank,
                    "signature_difference": [full.positives - red.positives, full.negatives - red.negatives],
                }
            )
        out["fibers"] = fibers
    return out


# --- isotopy ---------------------------------------------------------------


def _standard_predicates(N: int) -> list[str]:
    names = []
    for r in range(N // 2):
        for kind in ("real-point", "connected", "rational", "unirational"):
            names.append(f"f{r}-{kind}")
    return names


def isotopy_report(N: int, filters=()) -> dict:
    if N < 3:
        raise InvalidDimension("isotopy classification needs N >= 3")
    try:
        tables = verdict.table_for_N(N, list(filters))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    everything = verdict.table_for_N(N)
    lists = {}
    for pred in _standard_predicates(N):
        keep = {str(t.invariant) for t in verdict.table_for_N(N, [pred])}
        lists[pred] = [str(t.invariant) for t in everything if str(t.invariant) in keep]
    return {
        "N": N,
        "filters": list(filters),
        "count": len(tables),
        "invariants": [str(t.invariant) for t in tables],
        "classes": [t.to_json() for t in tables],
        "lists": lists,
    }


# --- count -----------------------------------------------------------------


def count_report(pencil_source, prime: int, ext: int = 1, r: int | None = None, ell_source=None,
                 ceiling: int | None = None, points: bool = False) -> dict:
    p, digest = load_pencil(pencil_source)
    fp = fforacle.reduce_pencil(p, prime, ext)
    ell = load_subspace(ell_source) if ell_source is not None else None
    if r is None:
        r = ell.r if ell is not None else max(p.N // 2 - 1, 0)
    out = {"input": {"sha256": digest, "N": p.N}, "prime": prime, "ext": ext, "q": fp.q}
    ell_mod = None
    if ell is not None:
        ell_mod = fforacle.reduce_subspace(fp.field, ell)
        if not fforacle.is_isotropic(fp, ell_mod):
            raise SubspaceNotOnX(f"reference plane does not lie on X mod {prime}")
    census = fforacle.census_planes(fp, r, ell_mod if ell is not None and ell.r == r else None, ceiling=ceiling)
    out["census"] = census.to_json()
    if points:
        out["points"] = fforacle.count_points(fp, ceiling=ceiling)
    if ell is not None:
        if contains_subspace(p, ell):
            out["bijection"] = fforacle.check_reduction_bijection(fp, ell, ceiling=ceiling).to_json()
            if p.N % 2 == 0 and ell.r == p.N // 2 - 1:
                out["reduced_scheme"] = fforacle.reduced_scheme_length(fp.over(1), ell).to_json()
        else:
            out["note"] = "reference plane lies on X only mod p; bijection and length checks need a rational plane"
    return out


# --- verify ----------------------------------------------------------------


def verify_report(seed: int, trials: int, jobs: int, only=None):
    from .verify import PROPERTIES, run_battery

    unknown = [n for n in (only or []) if n not in PROPERTIES]
    if unknown:
        raise ParseError(f"unknown properties {unknown}; choose from {sorted(PROPERTIES)}")
    return run_battery(seed=seed, trials=trials, jobs=jobs, only=only)


# --- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pencillab",
        description="Real and finite-field analysis of intersections of two quadrics.",
    )
    parser.add_argument("--format", choices=("json", "text"), default="json", help="output format")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS, help="output format")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="discriminant, signature walk, Krasnov invariant, verdicts")
    a.add_argument("pencil", help="pencil JSON file")

    rd = sub.add_parser("reduce", parents=[common], help="hyperbolic reduction along a plane on X")
    rd.add_argument("pencil")
    rd.add_argument("plane", help="subspace JSON file")
    rd.add_argument("--at", action="append", default=[], metavar="S:T", help="also reduce the fiber at [S:T]")

    iso = sub.add_parser("isotopy", parents=[common], help="isotopy classes and verdict tables for P^N")
    iso.add_argument("N", type=int)
    iso.add_argument(
        "--filter",
        action="append",
        default=[],
        metavar="PRED",
        help="keep classes satisfying PRED (repeatable, conjunction), e.g. f2-real-point or h=4,f=1",
    )

    c = sub.add_parser("count", parents=[common], help="brute-force census of r-planes on X over F_q")
    c.add_argument("pencil")
    c.add_argument("--prime", type=int, required=True)
    c.add_argument("--ext", type=int, choices=(1, 2), default=1)
    c.add_argument("--r", type=int, default=None)
    c.add_argument("--ell", default=None, help="reference plane JSON file")
    c.add_argument("--points", action="store_true", help="also count points of X")
    c.add_argument("--ceiling", type=int, default=None, help=f"override {fforacle.CEILING_ENV}")

    v = sub.add_parser("verify", parents=[common], help="run the seeded property batteries")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--only", action="append", default=None, metavar="PROPERTY")
    return parser


def _emit(obj: dict, fmt: str, text_fn=None) -> None:
    if fmt == "text" and text_fn is not None:
        sys.stdout.write(text_fn(obj))
    else:
        sys.stdout.write(dumps(obj))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            _emit(analyze_report(args.pencil), args.format, _analyze_text)
        elif args.command == "reduce":
            pts = [parse_point(x) for x in args.at]
            _emit(reduce_report(args.pencil, args.plane, pts), args.format)
        elif args.command == "isotopy":
            rep = isotopy_report(args.N, args.filter)
            if args.format == "text":
                tables = verdict.table_for_N(args.N, args.filter)
                sys.stdout.write(verdict.format_table_text(tables))
            else:
                _emit(rep, "json")
        elif args.command == "count":
            rep = count_report(args.pencil, args.prime, args.ext, args.r, args.ell, args.ceiling, args.points)
            _emit(rep, args.format)
        elif args.command == "verify":
            if args.trials <= 0:
                print("warning: trials = 0, the battery passes vacuously", file=sys.stderr)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # already reported above
                report = verify_report(args.seed, args.trials, args.jobs, args.only)
            if args.format == "text":
                for name, res in report.results.items():
                    status = "ok" if res.failed == 0 else "FAIL"
                    sys.stdout.write(f"{status:4}  {name}: {res.passed} passed, {res.failed} failed\n")
                    for msg in res.failures[:3]:
                        sys.stdout.write(f"        {msg}\n")
            else:
                _emit(report.to_json(), "json")
            if not report.ok:
                print(f"failed properties: {', '.join(report.failed_properties)}", file=sys.stderr)
                return EXIT_PROPERTY_FAILURE
    except PencilError as exc:
        extra = ""
        if getattr(exc, "estimate", None) is not None:
            extra = f" (estimate {exc.estimate})"
        if getattr(exc, "witness", None) is not None:
            extra = f" (witness {exc.witness})"
        print(f"error: {type(exc).__name__}: {exc}{extra}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
