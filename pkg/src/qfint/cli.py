"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 budget exceeded or timeout (partial output is still printed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time
from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError, version

from . import clique, constructions, counting, symmetry
from .counting import BudgetExceeded
from .ffield import GF, as_field
from .geometry import Point, format_point_set, norm_class, parse_point, read_point_set, write_point_set
from .known import EXAMPLES, KNOWN_I

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return version("qfint")
    except PackageNotFoundError:  # pragma: no cover
        return "0+unknown"


@dataclass
class RunRecord:
    command: str
    parameters: dict
    field: str | None
    result: object
    wall_time: float | None
    artifact_version: str

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


# -- argument helpers ---------------------------------------------------------

def parse_int_list(text: str) -> list[int]:
    """``3,5,7`` or ``3-7`` (odd numbers only for ranges of q are not assumed)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if re.fullmatch(r"\d+-\d+", part):
            a, b = map(int, part.split("-"))
            out.extend(range(a, b + 1))
        elif part.isdigit():
            out.append(int(part))
        else:
            raise UsageError(f"cannot parse {part!r} as an integer list")
    return out


def parse_duration(text: str | None) -> float | None:
    if text is None:
        return None
    mt = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([smh]?)\s*", text)
    if not mt:
        raise UsageError(f"cannot parse duration {text!r}")
    return float(mt.group(1)) * {"": 1, "s": 1, "m": 60, "h": 3600}[mt.group(2)]


def _field(text: str) -> GF:
    try:
        return as_field(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _point(f: GF, text: str) -> Point:
    try:
        return parse_point(f, text)
    except ValueError as exc:
        raise UsageError(f"bad point {text!r}: {exc}") from exc


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _aligned(header, rows) -> str:
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


class Outcome:
    def __init__(self, text: str, payload, code: int = EXIT_OK, field: str | None = None):
        self.text, self.payload, self.code, self.field = text, payload, code, field


# -- commands -----------------------------------------------------------------

def cmd_field(args) -> Outcome:
    f = _field(args.q)
    squares = [x for x in range(1, f.q) if f.is_square(x)]
    payload = {
        "descriptor": f.descriptor, "p": f.p, "r": f.r, "q": f.q,
        "modulus": list(f.modulus), "primitive_element": f.primitive_element(),
        "omega": f.omega() if f.q % 4 == 1 else None,
        "nonzero_squares": len(squares), "nonsquare": f.nonsquare(),
    }
    text = "\n".join(f"{k}: {v}" for k, v in payload.items()) + "\n"
    return Outcome(text, payload, field=f.descriptor)


def count_rows(ms, qs, method: str, cross_check: bool):
    fns = {"closed": counting.counts_closed, "recursive": counting.counts_recursive,
           "brute": counting.counts_brute}
    rows, ok = [], True
    for q in qs:
        for m in ms:
            rec = fns[method](m, q)
            if cross_check:
                vals = {fn(m, q).values() for fn in fns.values()}
                ok &= len(vals) == 1
            rows.append(rec)
    return rows, ok


def cmd_counts(args) -> Outcome:
    rows, ok = count_rows(parse_int_list(args.m), parse_int_list(args.q), args.method, args.cross_check)
    header = ["m", "q", "S", "Z", "N", "D", "method"]
    data = [[r.m, r.q, r.S, r.Z, r.N, r.D, r.method] for r in rows]
    text = _csv(header, data)
    if args.cross_check:
        text += "cross-check: " + ("PASS" if ok else "FAIL") + "\n"
    payload = {"rows": [dict(zip(header, r)) for r in data], "cross_check": ok if args.cross_check else None}
    return Outcome(text, payload, EXIT_OK if ok else EXIT_FAIL)


def cmd_srg(args) -> Outcome:
    header = ["m", "q", "v", "k", "lambda", "mu_num", "mu_den", "mu_integral", "is_srg"]
    data, ok = [], True
    for q in parse_int_list(args.q):
        for m in parse_int_list(args.m):
            r = counting.srg_report(m, q)
            if args.brute:
                ok &= counting.srg_brute(m, q) == r.is_srg
            data.append([r.m, r.q, r.v, r.k, r.lam, r.mu.numerator, r.mu.denominator,
                         str(r.is_integral_mu).lower(), str(r.is_srg).lower()])
    text = _csv(header, data)
    if args.brute:
        text += "brute-force check: " + ("PASS" if ok else "FAIL") + "\n"
    payload = {"rows": [dict(zip(header, r)) for r in data], "brute_ok": ok if args.brute else None}
    return Outcome(text, payload, EXIT_OK if ok else EXIT_FAIL)


def cmd_neighbors(args) -> Outcome:
    f = _field(args.q)
    m = args.m
    u = _point(f, args.u) if args.u else Point.zero(f, m)
    v = _point(f, args.v) if args.v else Point.unit(f, m, 0)
    if u.m != m or v.m != m:
        raise UsageError("points must have m coordinates")
    if u == v:
        raise UsageError("u and v must differ")
    observed = counting.common_neighbors_brute(u, v)
    cls = norm_class(v - u).value
    formula, label = None, "formula"
    if cls == "P+":
        formula = counting.common_adjacent_closed(m, f.q)
    elif cls == "P0" and f.r == 1:
        formula, label = counting.conjectured_B(m, f.q), "conjectured"
    elif cls == "P-" and m % 2 == 0:
        formula = counting.mu_even_closed(m, f.q)
    ok = formula is None or formula == observed
    payload = {"u": str(u), "v": str(v), "class": cls, "observed": observed, "formula": formula, "agrees": ok}
    text = f"common neighbours of {u} and {v} ({cls}): {observed}"
    text += "\n" if formula is None else f", {label} {formula}: {'PASS' if ok else 'FAIL'}\n"
    return Outcome(text, payload, EXIT_OK if ok else EXIT_FAIL, f.descriptor)


def cmd_witness(args) -> Outcome:
    f = _field(args.q)
    u, v = _point(f, args.u), _point(f, args.v)
    if u.m != args.m or v.m != args.m:
        raise UsageError("points must have m coordinates")
    try:
        a = symmetry.transitivity_witness(u, v)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    ok = symmetry.is_orthogonal(a) and a @ u == v
    text = f"{a}\n{'VERIFIED' if ok else 'FAILED'}\n"
    return Outcome(text, {"matrix": str(a), "verified": ok}, EXIT_OK if ok else EXIT_FAIL, f.descriptor)


def _timed(name, fn):
    t = time.monotonic()
    try:
        ok, detail = fn()
    except BudgetExceeded as exc:
        ok, detail = False, f"budget: {exc}"
    return {"check": name, "ok": bool(ok), "detail": detail, "seconds": round(time.monotonic() - t, 3)}


def verify_groups():
    checks = []
    for m, q in [(2, 3), (2, 5), (2, 7), (2, 9), (3, 3)]:
        def one(m=m, q=q):
            got, want = symmetry.enumerate_O_brute(m, q), symmetry.order_O(m, q)
            return got == want, f"|O| brute {got}, formula {want}"
        checks.append(_timed(f"O({m},{q})", one))
    for m, q, ratio in [(2, 3, 1), (2, 5, 2), (2, 7, 1), (2, 9, 3), (3, 3, 1)]:
        def one(m=m, q=q, ratio=ratio):
            got, want = symmetry.enumerate_aut_linear(m, q), ratio * symmetry.order_OZ(m, q)
            return got == want, f"|Aut cap GL| {got}, expected {want}"
        checks.append(_timed(f"Aut({m},{q})", one))
    return checks


def verify_conjecture_checks(m: int, pmax: int):
    def run():
        rep = counting.verify_conjecture(m, pmax)
        bad = rep.counterexample
        return rep.agrees, "agree" if bad is None else f"p={bad.p} {bad.norm_class}: {bad.observed} vs {bad.expected}"
    return [_timed(f"conjecture m={m} p<={pmax}", run)]


def verify_construction_checks(qmax: int):
    qs = [q for q in range(3, qmax + 1, 2) if _is_prime_power(q)]
    checks = []

    def run(fn, q):
        c = fn(q)
        return True, f"{len(c)} points"

    for q in qs:
        if q % 4 == 1:
            checks.append(_timed(f"hyperplane_q1mod4 q={q}", lambda q=q: run(constructions.hyperplane_q1mod4, q)))
        else:
            checks.append(_timed(f"circle_plus_line q={q}", lambda q=q: run(constructions.circle_plus_line, q)))
            checks.append(_timed(f"nonintegral_plane q={q}", lambda q=q: run(constructions.nonintegral_plane, q)))
        if q <= 11:
            checks.append(_timed(f"isotropic_plane_4d q={q}", lambda q=q: run(constructions.isotropic_plane_4d, q)))
    for name, fn in EXAMPLES.items():
        def one(fn=fn):
            pts = fn()
            res = clique.verify_point_set(pts)
            detail = f"{len(pts)} points" if res.ok else f"bad pair {res.pair[0]} {res.pair[1]}"
            return res.ok, detail
        if name == "f27" and qmax < 27:
            continue
        checks.append(_timed(f"example {name}", one))
    return checks


def _is_prime_power(q: int) -> bool:
    from .ffield import prime_power
    try:
        prime_power(q)
        return True
    except ValueError:
        return False


def cmd_verify(args) -> Outcome:
    checks = []
    if args.what in ("groups", "all"):
        checks += verify_groups()
    if args.what in ("conjecture", "all"):
        ms = [args.m] if args.m else [3, 4]
        for m in ms:
            pmax = args.pmax or (101 if m == 3 else 13)
            checks += verify_conjecture_checks(m, pmax)
    if args.what in ("constructions", "all"):
        checks += verify_construction_checks(args.qmax)
    timing = not args.deterministic
    lines = []
    for c in checks:
        tail = f" ({c['seconds']:.2f}s)" if timing else ""
        lines.append(f"{'PASS' if c['ok'] else 'FAIL'} {c['check']}: {c['detail']}{tail}")
        if not timing:
            c.pop("seconds")
    ok = all(c["ok"] for c in checks)
    budget = any(c["detail"].startswith("budget") for c in checks)
    code = EXIT_OK if ok else (EXIT_BUDGET if budget else EXIT_FAIL)
    return Outcome("\n".join(lines) + "\n", {"checks": checks, "ok": ok}, code)


def _config(args, prescribed=()) -> clique.SearchConfig:
    return clique.SearchConfig(prescribed=tuple(prescribed), time_limit=parse_duration(args.time_limit),
                               deterministic=args.deterministic, workers=args.workers,
                               symmetry=not getattr(args, "no_symmetry", False))


def _cache(args):
    if args.cache_dir:
        return clique.ResultCache(args.cache_dir)
    return clique.ResultCache.from_env()


def _result_payload(r: clique.CliqueResult, timing: bool) -> dict:
    return {"m": r.m, "q": r.field.descriptor, "size": r.size, "status": r.status,
            "reduction": r.reduction, "elapsed": round(r.elapsed, 3) if timing else None,
            "witness": [str(p) for p in r.witness]}


def cmd_clique(args) -> Outcome:
    f = _field(args.q)
    prescribed = [_point(f, t) for t in args.prescribe.split(";")] if args.prescribe else []
    try:
        config = _config(args, prescribed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.export_dimacs:
        clique.export_dimacs(clique.build_graph(args.m, f), args.export_dimacs)
    if prescribed or args.no_symmetry:
        r = clique.max_clique(args.m, f, config)
    else:
        r = clique.compute_I(args.m, f if f.p != 2 else f.q, config, cache=_cache(args))
    timing = not args.deterministic
    code = EXIT_BUDGET if r.status == "lower_bound" else EXIT_OK
    return Outcome(r.record(timing) + "\n", _result_payload(r, timing), code, f.descriptor)


def parse_itable_spec(specs) -> list[tuple[int, int]]:
    """Entries like ``3:3,5,7`` (m:q-list) or ``4,3`` (m,q)."""
    out = []
    for spec in specs:
        for item in spec.split():
            if ":" in item:
                m, qs = item.split(":", 1)
                out += [(int(m), q) for q in parse_int_list(qs)]
            else:
                m, q = parse_int_list(item)
                out.append((m, q))
    return out


def cmd_itable(args) -> Outcome:
    entries = parse_itable_spec(args.spec or ["3:3,5,7,11,13"])
    config = _config(args)
    cache = _cache(args)
    timing = not args.deterministic
    rows, code = [], EXIT_OK
    for m, q in entries:
        r = clique.compute_I(m, q, config, cache=cache)
        known = KNOWN_I.get((m, q))
        agree = "" if known is None else str(known == r.size).lower()
        rows.append([m, q, r.size, r.status, known if known is not None else "", agree]
                    + ([f"{r.elapsed:.3f}"] if timing else []))
        if r.status == "lower_bound":
            code = EXIT_BUDGET
        elif known is not None and known != r.size and code == EXIT_OK:
            code = EXIT_FAIL
    header = ["m", "q", "I", "status", "published", "agrees"] + (["elapsed"] if timing else [])
    text = _csv(header, rows) if args.csv else _aligned(header, rows)
    return Outcome(text, {"rows": [dict(zip(header, r)) for r in rows]}, code)


def cmd_construct(args) -> Outcome:
    f = _field(args.q)
    try:
        c = constructions.build(args.name, f if f.p != 2 else f.q, args.m)
    except constructions.ConstructionError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        write_point_set(args.out, c.points)
    payload = {"name": c.name, "size": len(c), "params": c.params, "points": [str(p) for p in c.points]}
    text = f"{c.name}: {len(c)} points" + (f" written to {args.out}" if args.out else "") + "\n"
    if not args.out:
        text = format_point_set(c.points)
    return Outcome(text, payload, field=f.descriptor)


def cmd_export_dimacs(args) -> Outcome:
    f = _field(args.q)
    g = clique.build_graph(args.m, f)
    edges = clique.export_dimacs(g, args.out)
    payload = {"vertices": g.n, "edges": edges, "path": args.out}
    return Outcome(f"wrote {g.n} vertices and {edges} edges to {args.out}\n", payload, field=f.descriptor)


def cmd_verify_pointset(args) -> Outcome:
    try:
        f, m, pts = read_point_set(args.file)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    res = clique.verify_point_set(pts)
    distinct = len({p.coords for p in pts}) == len(pts)
    ok = res.ok and distinct
    if res.ok and not distinct:
        text = "FAIL: repeated points\n"
    elif res.ok:
        text = f"PASS: {len(pts)} points in F_{f.q}^{m} are pairwise integral\n"
    else:
        a, b = res.pair
        text = f"FAIL: {a} and {b} are not at integral distance\n"
    payload = {"size": len(pts), "ok": ok,
               "pair": None if res.pair is None else [str(res.pair[0]), str(res.pair[1])]}
    return Outcome(text, payload, EXIT_OK if ok else EXIT_FAIL, f.descriptor)


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON run record")
    common.add_argument("--deterministic", action="store_true", help="omit timings; byte-identical output")
    common.add_argument("--workers", type=int, default=1, help="worker processes for clique search")
    common.add_argument("--cache-dir", help="result cache directory (default: $QFINT_CACHE_DIR)")

    parser = argparse.ArgumentParser(prog="qfint", description="Integral point sets over F_q^m.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", parents=[common], help="describe a finite field")
    p.add_argument("--q", required=True, help="order or descriptor such as 3^3:2,1,1,1")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("counts", parents=[common], help="S, Z, N, D as CSV")
    p.add_argument("--m", required=True, help="dimension list, e.g. 1-5")
    p.add_argument("--q", required=True, help="field orders, e.g. 3,5,7")
    p.add_argument("--method", choices=["closed", "recursive", "brute"], default="closed")
    p.add_argument("--cross-check", action="store_true")
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("srg", parents=[common], help="strong-regularity analysis as CSV")
    p.add_argument("--m", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--brute", action="store_true", help="also confirm by enumeration")
    p.set_defaults(func=cmd_srg)

    p = sub.add_parser("neighbors", parents=[common], help="common neighbours by enumeration")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--u")
    p.add_argument("--v")
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("witness", parents=[common], help="orthogonal matrix mapping u to v")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("what", choices=["all", "conjecture", "groups", "constructions"])
    p.add_argument("--m", type=int)
    p.add_argument("--pmax", type=int)
    p.add_argument("--qmax", type=int, default=27)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("clique", parents=[common], help="maximum integral point set search")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--prescribe", help='points that must be included, e.g. "(0,0,0);(1,0,0)"')
    p.add_argument("--time-limit", help="e.g. 600s, 10m, 2h")
    p.add_argument("--no-symmetry", action="store_true", help="plain search without orbit reduction")
    p.add_argument("--export-dimacs", metavar="PATH")
    p.set_defaults(func=cmd_clique)

    p = sub.add_parser("itable", parents=[common], help="table of I(m,q)")
    p.add_argument("spec", nargs="*", help='entries such as "3:3,5,7" or "4,3"')
    p.add_argument("--time-limit")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_itable)

    p = sub.add_parser("construct", parents=[common], help="emit a construction as a point-set file")
    p.add_argument("name", choices=constructions.NAMES)
    p.add_argument("--q", required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("export-dimacs", parents=[common], help="write the graph in DIMACS format")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_dimacs)

    p = sub.add_parser("verify-pointset", parents=[common], help="check a point-set file")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify_pointset)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    start = time.monotonic()
    try:
        out = args.func(args)
    except UsageError as exc:
        print(f"qfint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"qfint: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.json:
        # execution-only settings never change the payload, so they stay out of the record
        params = {k: v for k, v in vars(args).items() if k not in ("func", "json", "workers", "cache_dir")}
        rec = RunRecord(args.command, params, out.field, out.payload,
                        None if args.deterministic else round(time.monotonic() - start, 3), _version())
        print(rec.to_json())
    else:
        sys.stdout.write(out.text)
    return out.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
