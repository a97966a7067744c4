"""``cstarfix`` command line.

Exit codes: 0 when every certificate, expectation or solve in the run
passed; 1 on a certified violation or a solve that did not reach a fixed
point; 2 on usage, parse or precondition errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, replace
from typing import Sequence

from . import expr, gallery
from .algebra import Tolerance
from .certificate import Certificate, to_jsonable
from .contraction import (MappingScenario, certify_ciric1, certify_ciric2, certify_common, certify_eq1,
                          certify_kannan)
from .errors import CStarError
from .scenario import Matrix, ScenarioParseError, parse_scenario
from .solver import (DEFAULT_MAX_ITER, IterationTrace, check_orbital_continuity, common_solve,
                     composed_common_solve, picard_solve)
from .space import MetricSpace, check_metric_axioms

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMS = ("eq1", "type1", "type2", "kannan", "common")


class UsageError(Exception):
    pass


@dataclass
class Loaded:
    space: MetricSpace
    scenario: MappingScenario | None
    starts: tuple[float, ...]
    max_iter: int
    constant_q: object = None  # q as a constant element when it does not depend on (x, y)


def _parse_starts(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise UsageError(f"--starts expects comma-separated numbers, got {text!r}") from None


def _load(args) -> Loaded:
    if bool(args.scenario) == bool(args.gallery):
        raise UsageError("give exactly one of --scenario PATH or --gallery ID")
    if args.gallery:
        entry = gallery.get_entry(args.gallery)
        scn = entry.scenario
        q = entry.eq1_gauge
        if q is None and scn is not None:
            q = scn.q(0.0, 0.0)
        loaded = Loaded(entry.space, scn, entry.starts, DEFAULT_MAX_ITER, q)
    else:
        try:
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read scenario file: {exc}") from None
        sf = parse_scenario(text)
        q = None
        if isinstance(sf.q, Matrix):
            if not any(expr.variables(e) for row in sf.q.rows for e in row):
                q = sf.scenario().q(0.0, 0.0)
        elif not expr.variables(sf.q):
            q = sf.scenario().q(0.0, 0.0)
        loaded = Loaded(sf.space(), sf.scenario(), sf.run_starts(), sf.max_iter, q)
    return _override(loaded, args)


def _override(ld: Loaded, args) -> Loaded:
    space = ld.space
    if getattr(args, "tol", None) is not None:
        if not 0 <= args.tol < 1e-3:
            raise UsageError("--tol must lie in [0, 1e-3)")
        space = replace(space, algebra=replace(space.algebra, tol=Tolerance(args.tol, args.tol)))
    if getattr(args, "sample_step", None) is not None:
        if not args.sample_step > 0:
            raise UsageError("--sample-step must be positive")
        space = replace(space, domain=space.domain.with_step(args.sample_step))
    scn = ld.scenario
    if scn is not None:
        scn = replace(scn, space=space)
        if getattr(args, "max_power", None) is not None:
            if args.max_power < 1:
                raise UsageError("--max-power must be >= 1")
            scn = replace(scn, max_power=args.max_power)
    starts = _parse_starts(args.starts) if getattr(args, "starts", None) else ld.starts
    max_iter = ld.max_iter
    if getattr(args, "max_iter", None) is not None:
        if args.max_iter < 1:
            raise UsageError("--max-iter must be >= 1")
        max_iter = args.max_iter
    return Loaded(space, scn, starts, max_iter, ld.constant_q)


def _need_scenario(ld: Loaded) -> MappingScenario:
    if ld.scenario is None:
        raise UsageError("this entry defines a metric space only, with no maps to run")
    return ld.scenario


# -- report writers --------------------------------------------------------

def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


_CERT_HEADER = ("condition", "passed", "worst_margin", "witness", "sample_size", "max_power")


def _cert_row(c: Certificate):
    wit = "" if c.witness is None else " ".join("None" if w is None else repr(float(w)) for w in c.witness)
    return (c.condition, str(c.passed).lower(), c.worst_margin, wit, c.sample_size, c.max_power)


def _certs_report(certs: list[Certificate], fmt: str) -> str:
    if fmt == "json":
        return _json({"certificates": [c.to_dict() for c in certs]})
    return _csv(_CERT_HEADER, [_cert_row(c) for c in certs])


def _trace_report(trace: IterationTrace, fmt: str) -> str:
    if fmt == "json":
        return _json(trace.to_dict())
    return _csv(("n", "x_n", "residual_norm", "apriori_bound"), trace.rows())


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands --------------------------------------------------------------

def cmd_certify(args) -> int:
    ld = _load(args)
    scn = _need_scenario(ld)
    form = args.form or scn.form
    if form in ("eq1", "kannan") and ld.constant_q is None:
        raise UsageError(f"--form {form} needs a constant gauge q")
    if form == "eq1":
        cert = certify_eq1(scn, ld.constant_q)
    elif form == "kannan":
        cert = certify_kannan(scn.space, scn.T, ld.constant_q)
    elif form == "type1":
        cert = certify_ciric1(scn)
    elif form == "type2":
        cert = certify_ciric2(scn)
    else:
        cert = certify_common(scn, form=scn.form)
    _emit(_certs_report([cert], args.format), args)
    return EXIT_OK if cert.passed else EXIT_FAIL


def _finish_trace(trace: IterationTrace, args) -> int:
    _emit(_trace_report(trace, args.format), args)
    print(f"verdict: {trace.verdict}", file=sys.stderr)
    return EXIT_OK if trace.verdict == "converged-fixed-point" else EXIT_FAIL


def _first_start(ld: Loaded) -> float:
    if not ld.starts:
        raise UsageError("no start point; pass --starts")
    return ld.starts[0]


def cmd_solve(args) -> int:
    ld = _load(args)
    scn = _need_scenario(ld)
    return _finish_trace(picard_solve(scn, _first_start(ld), ld.max_iter), args)


def cmd_common_solve(args) -> int:
    ld = _load(args)
    scn = _need_scenario(ld)
    if scn.S is None:
        raise UsageError("common-solve needs a scenario with a second map S")
    solve = composed_common_solve if args.composed else common_solve
    return _finish_trace(solve(scn, _first_start(ld), ld.max_iter), args)


def cmd_orbital(args) -> int:
    ld = _load(args)
    scn = _need_scenario(ld)
    maps = ["T"] + (["S"] if scn.S is not None else [])
    if args.map:
        if args.map == "S" and scn.S is None:
            raise UsageError("scenario has no map S")
        maps = [args.map]
    certs = [check_orbital_continuity(scn, m, ld.starts, min(ld.max_iter, 200 if args.max_iter is None else ld.max_iter))
             for m in maps]
    _emit(_certs_report(certs, args.format), args)
    return EXIT_OK if all(c.passed for c in certs) else EXIT_FAIL


def cmd_axioms(args) -> int:
    ld = _load(args)
    cert = check_metric_axioms(ld.space)
    _emit(_certs_report([cert], args.format), args)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_gallery(args) -> int:
    if args.list:
        entries = gallery.list_entries()
        if args.format == "json":
            text = _json([{"id": i, "description": d, "location": loc} for i, d, loc in entries])
        else:
            text = _csv(("id", "description", "location"), entries)
        _emit(text, args)
        return EXIT_OK
    ids = gallery.entry_ids() if args.all else [args.id or args.gallery] if (args.id or args.gallery) else []
    if not ids:
        raise UsageError("gallery needs an entry id, --all or --list")
    reports = [gallery.run_entry(i) for i in ids]
    if args.format == "json":
        text = _json({"entries": [r.to_dict() for r in reports], "ok": all(r.ok for r in reports)})
    else:
        text = _csv(("id", "check", "expected", "actual", "ok"),
                    [(r.id, row.check, row.expected, row.actual, str(row.ok).lower()) for r in reports for row in r.rows])
    _emit(text, args)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


# -- parser ----------------------------------------------------------------

def _common_flags(p: argparse.ArgumentParser, source: bool = True) -> None:
    if source:
        p.add_argument("--scenario", metavar="PATH", help="scenario file")
    p.add_argument("--gallery", metavar="ID", help="gallery entry id")
    p.add_argument("--max-power", type=int, help="iterate depth N for certificates")
    p.add_argument("--max-iter", type=int, help="iteration budget for solves")
    p.add_argument("--tol", type=float, help="eps_pos and eps_eq")
    p.add_argument("--sample-step", type=float, help="grid step for interval domains")
    p.add_argument("--starts", metavar="LIST", help="comma-separated start points")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cstarfix", description="Contractive-condition certificates and "
                                     "fixed-point solves over C*-algebra valued metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="certify a contractive condition")
    _common_flags(p)
    p.add_argument("--form", choices=FORMS, help="condition to certify (default: the scenario's gauge form)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("solve", help="Picard iteration from the first start")
    _common_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("common-solve", help="alternating common-fixed-point iteration")
    _common_flags(p)
    p.add_argument("--composed", action="store_true", help="solve the pair (T, S o T) instead")
    p.set_defaults(func=cmd_common_solve)

    p = sub.add_parser("orbital", help="orbital continuity of T (and S)")
    _common_flags(p)
    p.add_argument("--map", choices=("T", "S"), help="check only this map")
    p.set_defaults(func=cmd_orbital)

    p = sub.add_parser("axioms", help="metric axioms on the domain sample")
    _common_flags(p)
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("gallery", help="run pinned example scenarios")
    p.add_argument("id", nargs="?", help="entry id")
    p.add_argument("--gallery", metavar="ID", help="entry id (same as the positional)")
    p.add_argument("--all", action="store_true", help="run every entry")
    p.add_argument("--list", action="store_true", help="list entries")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ScenarioParseError as exc:
        for d in exc.diagnostics:
            print(f"{args.scenario}:{d}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, CStarError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
