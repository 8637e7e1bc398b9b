"""Command-line interface.

Exit status: 0 success or positive verdict, 1 negative verdict, 2 unknown,
3 usage error, 4 data error, 5 network or cache error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .arith import QQ, ArithError, FieldDesc, Place, QuaternionAlgebra, find_real_quadratic_split, hasse_invariant
from .construct import ConstructionCertificate, ConstructionError, vanishing_pipeline, verify_certificate
from .data import (
    DataError,
    OfflineError,
    canonical_json,
    load_certificates,
    load_dataset,
    load_fixture,
    lmfdb_fetch,
)
from .goodness import (
    NO,
    UNKNOWN,
    YES,
    check_curve,
    check_triple,
    render_report,
    render_tables,
    render_triple,
    reproduce_tables,
)
from .localglobal import LocalDataError, RootNumberError, TripleLocalVerdict, global_root_number
from .repcore import GroupSpec, RepTableError, trilinear_multiplicity

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA, EXIT_NETWORK = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(args, obj, text: str) -> None:
    if args.json:
        sys.stdout.write(canonical_json(obj))
    else:
        print(text)


def _dataset(args):
    ds = load_dataset(args.data) if args.data else load_fixture()
    if getattr(args, "no_certificates", False):
        ds = ds.without_certificates()
    if args.certificates:
        ds = ds.with_certificates(load_certificates(args.certificates))
    return ds


def _algebra(ramified) -> QuaternionAlgebra:
    return QuaternionAlgebra(QQ, frozenset(Place.parse(v) for v in ramified or ()))


def cmd_check_curve(args) -> int:
    ds = _dataset(args)
    rep = check_curve(ds, args.curve, _algebra(args.ramified))
    _emit(args, rep.to_json(), render_report(rep, verbose=args.verbose))
    return {YES: EXIT_OK, NO: EXIT_NO, UNKNOWN: EXIT_UNKNOWN}[rep.good]


def cmd_check_triple(args) -> int:
    ds = _dataset(args)
    t = check_triple(ds, args.labels, _algebra(args.ramified))
    _emit(args, t.to_json(), render_triple(t))
    return {"Vanishes": EXIT_OK, "FormExists": EXIT_NO, "Unknown": EXIT_UNKNOWN}[t.conclusion]


def cmd_trilinear(args) -> int:
    g = GroupSpec(args.kind.lower(), args.n)
    m = trilinear_multiplicity(g, args.a, args.b, args.c)
    _emit(args, {"group": g.to_json(), "reps": [args.a, args.b, args.c], "multiplicity": m},
          f"multiplicity: {m}")
    return EXIT_OK


def _parse_sign(text: str) -> tuple[Place, int]:
    try:
        place, sign = text.split("=")
        s = int(sign)
    except ValueError:
        raise UsageError(f"expected PLACE=SIGN, got {text!r}") from None
    if s not in (1, -1):
        raise UsageError(f"sign must be +1 or -1 in {text!r}")
    return Place.parse(place), s


def cmd_root_number(args) -> int:
    base = FieldDesc("Q", 1) if args.degree == 1 else FieldDesc(f"F{args.degree}", args.degree)
    verdicts = []
    for item in args.signs:
        v, s = _parse_sign(item)
        verdicts.append(TripleLocalVerdict(v, "FormExists" if s == 1 else "Vanishes", None, s))
    res = global_root_number(base, verdicts)
    lines = [f"{v}: {s:+d}" for v, s in sorted(res.local_signs.items())]
    lines.append(f"global sign: {res.global_sign:+d}")
    if res.l_value_forced_zero:
        lines.append(f"central L-value forced to vanish ({res.citation})")
    _emit(args, res.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_hasse(args) -> int:
    base = QQ if args.degree == 1 else FieldDesc(f"F{args.degree}", args.degree)
    alg = QuaternionAlgebra(base, frozenset(Place.parse(v) for v in args.ramified))
    places = sorted(set(alg.ramified) | set(base.infinite_places()) | {Place.parse(v) for v in args.at})
    inv = {str(v): hasse_invariant(alg, v) for v in places}
    text = [f"ramified: {', '.join(map(str, alg.sorted_ramified())) or '(none)'}"]
    text += [f"  eps({v}) = {s:+d}" for v, s in inv.items()]
    _emit(args, {"algebra": alg.to_json(), "invariants": inv}, "\n".join(text))
    return EXIT_OK


def cmd_find_quadratic(args) -> int:
    d = find_real_quadratic_split(args.primes)
    _emit(args, {"primes": sorted(set(args.primes)), "d": d}, f"Q(sqrt {d})")
    return EXIT_OK


def cmd_construct(args) -> int:
    ds = _dataset(args)
    cert = vanishing_pipeline(ds, args.labels, args.prime)
    out = canonical_json(cert.to_json())
    if args.out:
        Path(args.out).write_text(out, encoding="utf-8")
    if args.json or not args.out:
        sys.stdout.write(out)
    else:
        ok, _ = verify_certificate(cert)
        print(f"n = {cert.n}, m = {cert.tower.m}, ramified: {', '.join(map(str, cert.ramified))}")
        print(f"certificate written to {args.out} ({'verifies' if ok else 'DOES NOT verify'})")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        obj = json.loads(Path(args.certificate).read_text(encoding="utf-8"))
        cert = ConstructionCertificate.from_json(obj)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{args.certificate}: not a construction certificate ({exc})") from exc
    ok, failures = verify_certificate(cert)
    _emit(args, {"valid": ok, "failures": failures},
          "valid" if ok else "invalid:\n" + "\n".join(f"  {f}" for f in failures))
    return EXIT_OK if ok else EXIT_NO


def cmd_fetch_lmfdb(args) -> int:
    res = lmfdb_fetch(args.level, 2, cache_dir=args.cache_dir, offline=args.offline or None)
    rows = [o.to_json() for o in res.orbits]
    lines = [f"{o.label}  dim {o.hecke_degree}  AL {o.atkin_lehner}" for o in res.orbits]
    if res.stale:
        lines.append(res.flag)
    meta = {"source": res.source, "fetched_at": res.fetched_at, "stale": res.stale}
    _emit(args, {"orbits": rows, "meta": meta}, "\n".join(lines))
    return EXIT_OK


def cmd_reproduce_tables(args) -> int:
    ds = _dataset(args)
    s = reproduce_tables(ds)
    _emit(args, s.to_json(), render_tables(s))
    return EXIT_OK if s.ok else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--data", help="dataset JSON (default: the bundled fixture)")
    common.add_argument("--certificates", help="extra certificates to merge into the dataset")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--offline", action="store_true", help="never touch the network")
    common.add_argument("--cache-dir", help="LMFDB cache directory")

    p = _Parser(prog="diagcycle", description="Vanishing of modified diagonal cycles on genus-3 modular curves.")
    p.add_argument("--version", action="version", version=f"diagcycle {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check-curve", parents=[common], help="decide goodness of a curve")
    s.add_argument("curve")
    s.add_argument("--ramified", nargs="*", help="ramified places of the quaternion algebra (default: none)")
    s.add_argument("--no-certificates", action="store_true", help="ignore the dataset's certificates")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_check_curve)

    s = sub.add_parser("check-triple", parents=[common], help="decide one triple of newform orbits")
    s.add_argument("labels", nargs=3)
    s.add_argument("--ramified", nargs="*")
    s.add_argument("--no-certificates", action="store_true")
    s.set_defaults(func=cmd_check_triple)

    s = sub.add_parser("trilinear", parents=[common], help="dim Hom_G(a (x) b (x) c, 1)")
    s.add_argument("kind", choices=["cyclic", "dihedral"])
    s.add_argument("n", type=int)
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("c")
    s.set_defaults(func=cmd_trilinear)

    s = sub.add_parser("root-number", parents=[common], help="global sign from finite local signs")
    s.add_argument("signs", nargs="*", metavar="PLACE=SIGN")
    s.add_argument("--degree", type=int, default=1, help="degree of the totally real base field")
    s.set_defaults(func=cmd_root_number)

    s = sub.add_parser("hasse", parents=[common], help="quaternion algebra from its ramification")
    s.add_argument("--ramified", nargs="*", default=[])
    s.add_argument("--at", nargs="*", default=[], help="extra places to report")
    s.add_argument("--degree", type=int, default=1)
    s.set_defaults(func=cmd_hasse)

    s = sub.add_parser("find-quadratic", parents=[common], help="real quadratic field split at given primes")
    s.add_argument("primes", nargs="+", type=int)
    s.set_defaults(func=cmd_find_quadratic)

    s = sub.add_parser("construct", parents=[common], help="run the tower and quaternion construction")
    s.add_argument("labels", nargs=3)
    s.add_argument("--prime", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("verify", parents=[common], help="re-check a construction certificate")
    s.add_argument("certificate")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("fetch-lmfdb", parents=[common], help="newform orbits and Atkin-Lehner signs")
    s.add_argument("level", type=int)
    s.set_defaults(func=cmd_fetch_lmfdb)

    s = sub.add_parser("reproduce-tables", parents=[common], help="good curves in the dataset versus the published lists")
    s.set_defaults(func=cmd_reproduce_tables)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, ValueError) as exc:
        if isinstance(exc, (DataError, ArithError, LocalDataError, RootNumberError, ConstructionError)):
            print(f"data error: {exc}", file=sys.stderr)
            return EXIT_DATA
        if isinstance(exc, KeyError):
            print(f"usage error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RepTableError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OfflineError as exc:
        print(f"network/cache error: {exc}", file=sys.stderr)
        return EXIT_NETWORK


def main() -> None:
    sys.exit(run())
