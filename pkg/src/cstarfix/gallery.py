"""Pinned scenarios for the worked examples, with their expected outcomes.

``run_entry(id)`` executes every check an entry declares and reports
expected against actual; ``run_all`` is the regression run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import builtins
from .algebra import Algebra
from .contraction import (MappingScenario, certify_ciric1, certify_ciric2, certify_common, certify_eq1,
                          constant, squared_gauge)
from .errors import ContractionError, UnknownEntryError
from .solver import check_orbital_continuity, common_solve, picard_solve, uniqueness_probe
from .space import MetricSpace, PointDomain, check_metric_axioms, probe_continuity

DYADIC_DEPTH = 40
INTERVAL_STEP = 0.05
INTERVAL_STARTS = (0.0, 0.25, 0.5, 0.75, 1.0)
DYADIC_STARTS = (0.0, 0.5, 0.25)
EXAMPLE_2_2_ALPHA = 2.0


@dataclass(frozen=True)
class Expected:
    """Expected outcomes; ``None`` means the check is not part of the entry.

    ``fixed_point``/``common_fixed_point`` hold the limit every start must
    reach, or ``NO_FIXED_POINT``.
    """

    metric_axioms: str = "pass"
    eq1: str | None = None
    ciric1: str | None = None
    ciric2: str | None = None
    common: str | None = None
    fixed_point: object = None
    common_fixed_point: object = None
    orbital: tuple[tuple[str, str], ...] = ()
    continuity: tuple[tuple[float, str], ...] = ()
    uniqueness: str | None = None
    complete: bool = True


NO_FIXED_POINT = "none"


@dataclass(frozen=True)
class GalleryEntry:
    id: str
    description: str
    location: str
    space: MetricSpace
    expected: Expected
    scenario: MappingScenario | None = None
    eq1_gauge: object = None
    starts: tuple[float, ...] = ()
    probes: dict = field(default_factory=dict)
    axiom_sample: tuple[float, ...] | None = None


def _real_line(domain: PointDomain, complete: bool = True) -> MetricSpace:
    return MetricSpace(domain, builtins.usual(1), Algebra(), complete)


def _interval(lo=0.0, hi=1.0, closed=True) -> PointDomain:
    return PointDomain.interval(lo, hi, lo_closed=closed, hi_closed=closed, step=INTERVAL_STEP)


def _clipped(domain: PointDomain) -> tuple[float, ...]:
    return tuple(p for p in INTERVAL_STARTS if domain.contains(p, 0.0))


def _const(c):
    return lambda x, y: c


def _example_2_2() -> GalleryEntry:
    # X = R, sampled on a window around 0
    alg = Algebra(2, norm_mode="max-entry", order_mode="entrywise")
    dom = PointDomain.interval(-2.0, 2.0, step=0.25)
    space = MetricSpace(dom, builtins.weighted_diagonal(EXAMPLE_2_2_ALPHA), alg)
    return GalleryEntry("example_2_2", "M₂ diagonal metric with α", "Example 2.2", space, Expected())


def _example_3_4() -> GalleryEntry:
    alg = Algebra(2, norm_mode="max-entry", order_mode="entrywise")
    dom = _interval()
    space = MetricSpace(dom, builtins.usual(2), alg)
    q = np.eye(2) / math.sqrt(5.0)
    scn = MappingScenario(space, lambda x: x / 5.0, _const(q), lambda x, y: (x + y) * np.eye(2), name="example_3_4")
    exp = Expected(eq1="pass", ciric1="pass", ciric2="pass", fixed_point=0.0,
                   orbital=(("T", "pass"),), continuity=((0.5, "pass"),), uniqueness="pass")
    return GalleryEntry("example_3_4", "T = x/5 on [0,1] with a diagonal M₂ metric", "Example 3.4",
                        space, exp, scn, eq1_gauge=q, starts=_clipped(dom),
                        probes={0.5: dom.members()})


def _example_3_5() -> GalleryEntry:
    dom = _interval()
    space = _real_line(dom)
    scn = MappingScenario(space, builtins.jump_at_one, _const(1 / math.sqrt(2.0)), lambda x, y: x + y,
                          name="example_3_5")
    near_one = tuple(1.0 - 10.0**-k for k in range(1, 9)) + (1.0,)
    exp = Expected(eq1="fail", ciric1="pass", ciric2="pass", fixed_point=0.0,
                   orbital=(("T", "pass"),), continuity=((1.0, "violation"),))
    return GalleryEntry("example_3_5", "piecewise T, orbitally continuous but jumping at 1", "Example 3.5",
                        space, exp, scn, eq1_gauge=0.99, starts=(1.0, 0.9, 0.0), probes={1.0: near_one})


def _example_3_10() -> GalleryEntry:
    dom = _interval()
    space = _real_line(dom)
    scn = MappingScenario(space, lambda x: x / 3.0, _const(1 / math.sqrt(3.0)), lambda x, y: 1 + x + y,
                          name="example_3_10")
    exp = Expected(eq1="pass", ciric1="pass", ciric2="pass", fixed_point=0.0,
                   orbital=(("T", "pass"),), uniqueness="pass")
    return GalleryEntry("example_3_10", "T = x/3 on [0,1], unique fixed point 0", "Example 3.10",
                        space, exp, scn, eq1_gauge=1 / math.sqrt(3.0), starts=_clipped(dom))


def _example_3_11() -> GalleryEntry:
    space = _real_line(PointDomain.dyadic(DYADIC_DEPTH))
    scn = MappingScenario(space, builtins.halve_or_kick, _const(1 / math.sqrt(2.0)), lambda x, y: 1 + x + y,
                          name="example_3_11")
    exp = Expected(eq1="fail", ciric1="pass", ciric2="pass", fixed_point=NO_FIXED_POINT,
                   orbital=(("T", "violation"),))
    return GalleryEntry("example_3_11", "dyadic set, orbit tends to 0 but T(0) = 1/2", "Example 3.11",
                        space, exp, scn, eq1_gauge=0.99, starts=DYADIC_STARTS)


def _example_3_12() -> GalleryEntry:
    dom = _interval(-1.0, 1.0, closed=False)
    space = _real_line(dom, complete=False)
    scn = MappingScenario(space, lambda x: x / 2.0, _const(1 / math.sqrt(2.0)), lambda x, y: 4 + x + y,
                          name="example_3_12")
    exp = Expected(eq1="pass", ciric1="pass", ciric2="pass", fixed_point=0.0,
                   orbital=(("T", "pass"),), uniqueness="pass", complete=False)
    return GalleryEntry("example_3_12", "T = x/2 on (-1,1), incomplete but with fixed point 0", "Example 3.12",
                        space, exp, scn, eq1_gauge=1 / math.sqrt(2.0), starts=(-0.9,) + _clipped(dom) + (0.9,))


def _example_3_17() -> GalleryEntry:
    dom = _interval()
    space = _real_line(dom)
    scn = MappingScenario(space, lambda x: x / 2.0, _const(1 / math.sqrt(2.0)), lambda x, y: 1 + x + y,
                          S=lambda x: x / 4.0, name="example_3_17")
    exp = Expected(common="pass", common_fixed_point=0.0, orbital=(("T", "pass"), ("S", "pass")),
                   uniqueness="pass")
    return GalleryEntry("example_3_17", "T = x/2, S = x/4 on [0,1], common fixed point 0", "Example 3.17",
                        space, exp, scn, starts=_clipped(dom))


def _example_3_18() -> GalleryEntry:
    dom = _interval(-1.0, 1.0, closed=False)
    space = _real_line(dom, complete=False)
    scn = MappingScenario(space, lambda x: x / 3.0, _const(1 / math.sqrt(3.0)), lambda x, y: 4 + x + y,
                          S=lambda x: x / 6.0, name="example_3_18")
    exp = Expected(common="pass", common_fixed_point=0.0, orbital=(("T", "pass"), ("S", "pass")),
                   uniqueness="pass", complete=False)
    return GalleryEntry("example_3_18", "T = x/3, S = x/6 on (-1,1), incomplete", "Example 3.18",
                        space, exp, scn, starts=(-0.9,) + _clipped(dom) + (0.9,))


def _example_3_19() -> GalleryEntry:
    space = _real_line(PointDomain.dyadic(DYADIC_DEPTH))
    scn = MappingScenario(space, builtins.halve_fixing_zero, _const(1 / math.sqrt(2.0)), lambda x, y: 1 + x + y,
                          S=builtins.halve_or_kick, name="example_3_19")
    exp = Expected(common="pass", common_fixed_point=NO_FIXED_POINT,
                   orbital=(("T", "pass"), ("S", "violation")))
    return GalleryEntry("example_3_19", "dyadic pair, S kicks 0 to 1/2: no common fixed point", "Example 3.19",
                        space, exp, scn, starts=DYADIC_STARTS)


_BUILDERS: dict[str, Callable[[], GalleryEntry]] = {
    "example_2_2": _example_2_2,
    "example_3_4": _example_3_4,
    "example_3_5": _example_3_5,
    "example_3_10": _example_3_10,
    "example_3_11": _example_3_11,
    "example_3_12": _example_3_12,
    "example_3_17": _example_3_17,
    "example_3_18": _example_3_18,
    "example_3_19": _example_3_19,
}


def entry_ids() -> list[str]:
    return list(_BUILDERS)


def get_entry(entry_id: str) -> GalleryEntry:
    try:
        return _BUILDERS[entry_id]()
    except KeyError:
        raise UnknownEntryError(f"unknown gallery entry {entry_id!r}; available: {', '.join(_BUILDERS)}") from None


def list_entries() -> list[tuple[str, str, str]]:
    """``(id, description, location)`` in the order the examples appear."""
    out = []
    for eid in _BUILDERS:
        e = get_entry(eid)
        out.append((e.id, e.description, e.location))
    return out


@dataclass(frozen=True)
class CheckRow:
    check: str
    expected: str
    actual: str
    ok: bool


@dataclass(frozen=True)
class EntryReport:
    id: str
    rows: tuple[CheckRow, ...]
    certificates: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "ok": self.ok,
            "rows": [{"check": r.check, "expected": r.expected, "actual": r.actual, "ok": r.ok} for r in self.rows],
            "certificates": {k: c.to_dict() for k, c in self.certificates.items()},
        }


def _pf(passed: bool) -> str:
    return "pass" if passed else "fail"


def _same_point(got, want, eps) -> bool:
    if want == NO_FIXED_POINT or got == NO_FIXED_POINT:
        return got == want
    return abs(got - want) <= eps


def _fmt_point(v) -> str:
    return v if isinstance(v, str) else repr(float(v))


def run_entry(entry_id: str) -> EntryReport:
    entry = get_entry(entry_id)
    exp = entry.expected
    eps = entry.space.tol.eps_eq
    rows: list[CheckRow] = []
    certs = {}

    def add(check, want, got):
        rows.append(CheckRow(check, want, got, want == got))

    c = check_metric_axioms(entry.space, entry.axiom_sample)
    certs["metric_axioms"] = c
    add("metric_axioms", exp.metric_axioms, _pf(c.passed))
    add("complete", str(exp.complete).lower(), str(entry.space.complete).lower())

    scn = entry.scenario
    if scn is None:
        return EntryReport(entry.id, tuple(rows), certs)

    if exp.eq1 is not None:
        c = certify_eq1(scn, entry.eq1_gauge)
        certs["eq1"] = c
        add("eq1", exp.eq1, _pf(c.passed))
    for name, want, run in (("ciric1", exp.ciric1, lambda: certify_ciric1(scn)),
                            ("ciric2", exp.ciric2, lambda: certify_ciric2(squared_gauge(scn)))):
        if want is None:
            continue
        try:
            c = run()
        except ContractionError:
            add(name, want, "error")
            continue
        certs[name] = c
        add(name, want, _pf(c.passed))
    if exp.common is not None:
        c = certify_common(scn)
        certs["common"] = c
        add("common", exp.common, _pf(c.passed))

    for label, want, solve in (("fixed_point", exp.fixed_point, picard_solve),
                               ("common_fixed_point", exp.common_fixed_point, common_solve)):
        if want is None:
            continue
        results = []
        for x0 in entry.starts:
            trace = solve(scn, x0)
            results.append(NO_FIXED_POINT if trace.fixed_point is None else trace.fixed_point)
        ok = all(_same_point(r, want, eps) for r in results)
        got = _fmt_point(want) if ok else ", ".join(_fmt_point(r) for r in results)
        rows.append(CheckRow(label, _fmt_point(want), got, ok))

    for which, want in exp.orbital:
        c = check_orbital_continuity(scn, which, entry.starts)
        certs[f"orbital_{which}"] = c
        add(f"orbital_{which}", want, "pass" if c.passed else "violation")
    for at, want in exp.continuity:
        c = probe_continuity(entry.space, scn.T, at, entry.probes[at])
        certs[f"continuity_{at!r}"] = c
        add(f"continuity_at_{at!r}", want, "pass" if c.passed else "violation")
    if exp.uniqueness is not None:
        c = uniqueness_probe(scn, entry.starts)
        certs["uniqueness"] = c
        add("uniqueness", exp.uniqueness, _pf(c.passed))
    return EntryReport(entry.id, tuple(rows), certs)


def run_all() -> list[EntryReport]:
    return [run_entry(eid) for eid in _BUILDERS]


# kept for callers that want a constant gauge without importing contraction
constant_gauge = constant
