"""Line-oriented scenario files.

One ``key = value`` per line, ``#`` starts a comment, dotted keys give one
level of nesting. Expression values may be wrapped in double quotes. Matrix
values are written ``[a, b; c, d]``; a scalar expression ``e`` in a
``dim``-dimensional algebra stands for ``e * I``. ``builtin:<id>`` refers to
:mod:`cstarfix.builtins`.

Example::

    name = example_3_10
    domain.kind = interval
    domain.lo = 0
    domain.hi = 1
    maps.T = "x/3"
    gauges.q = "0.577"
    gauges.delta = "1+x+y"
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace
from typing import Union

import numpy as np

from . import builtins, expr
from .algebra import NORM_MODES, ORDER_MODES, SCALARS, Algebra, Tolerance
from .contraction import FORMS, MappingScenario
from .errors import CStarError, DomainError, ExpressionError
from .space import DOMAIN_KINDS, MetricSpace, PointDomain

E_SYNTAX = "E100"
E_EXPR = "E101"
E_UNKNOWN_FIELD = "E102"
E_MISSING = "E103"
E_BUILTIN = "E104"
E_VALUE = "E105"
E_DUPLICATE = "E106"
E_INVARIANT = "E107"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.code} {self.message}"


class ScenarioParseError(CStarError, ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Builtin:
    name: str


@dataclass(frozen=True)
class Matrix:
    rows: tuple[tuple[expr.Expr, ...], ...]


Value = Union[Builtin, Matrix, expr.Num, expr.Var, expr.Neg, expr.BinOp, expr.Call, expr.Cond]


@dataclass(frozen=True)
class ScenarioFile:
    domain_kind: str
    T: Value
    q: Value
    delta: Value
    name: str = "scenario"
    scalar: str = "real"
    dim: int = 1
    norm_mode: str = "operator"
    order_mode: str = "positivity"
    lo: float | None = None
    hi: float | None = None
    lo_closed: bool = True
    hi_closed: bool = True
    points: tuple[float, ...] = ()
    depth: int | None = None
    complete: bool = True
    metric: Value = Builtin("usual")
    S: Value | None = None
    form: str = "type1"
    max_power: int = 10
    max_iter: int = 10_000
    tol: float = 1e-10
    sample_step: float = 0.05
    starts: tuple[float, ...] = ()

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(eps_pos=self.tol, eps_eq=self.tol)

    def algebra(self) -> Algebra:
        return Algebra(self.dim, self.scalar, self.norm_mode, self.order_mode, self.tolerance)

    def domain(self) -> PointDomain:
        if self.domain_kind == "interval":
            return PointDomain.interval(self.lo, self.hi, lo_closed=self.lo_closed,
                                        hi_closed=self.hi_closed, step=self.sample_step)
        if self.domain_kind == "finite":
            return PointDomain.finite(self.points)
        return PointDomain.dyadic(self.depth)

    def space(self) -> MetricSpace:
        return MetricSpace(self.domain(), _metric(self.metric, self.dim, self.tol), self.algebra(), self.complete)

    def scenario(self) -> MappingScenario:
        eps = self.tol
        return MappingScenario(
            self.space(),
            _map(self.T, eps),
            _pair_fn(self.q, self.dim, eps),
            _pair_fn(self.delta, self.dim, eps),
            S=None if self.S is None else _map(self.S, eps),
            max_power=self.max_power,
            form=self.form,
            name=self.name,
        )

    def run_starts(self) -> tuple[float, ...]:
        return self.starts or default_starts(self.domain())


def default_starts(domain: PointDomain) -> tuple[float, ...]:
    """``{0, 1/4, 1/2, 3/4, 1}`` kept inside intervals; a few members otherwise."""
    if domain.kind == "interval":
        picks = tuple(p for p in (0.0, 0.25, 0.5, 0.75, 1.0) if domain.contains(p, 0.0))
        return picks or (domain.members()[len(domain.members()) // 2],)
    if domain.kind == "dyadic":
        return (0.0, 0.5, 0.25)
    return domain.points[:5]


def _map(value: Value, eps: float):
    if isinstance(value, Builtin):
        return builtins.MAPS[value.name]
    if isinstance(value, Matrix):
        raise CStarError("maps take scalar values")
    return lambda x: expr.evaluate(value, {"x": x}, eps)


def _pair_fn(value: Value, dim: int, eps: float):
    if isinstance(value, Matrix):
        rows = value.rows
        return lambda x, y: np.array([[expr.evaluate(e, {"x": x, "y": y}, eps) for e in row] for row in rows])
    if isinstance(value, Builtin):
        raise CStarError(f"builtin {value.name!r} is not a gauge")
    if dim == 1:
        return lambda x, y: expr.evaluate(value, {"x": x, "y": y}, eps)
    eye = np.eye(dim)
    return lambda x, y: expr.evaluate(value, {"x": x, "y": y}, eps) * eye


def _metric(value: Value, dim: int, eps: float):
    if isinstance(value, Builtin):
        return builtins.METRICS[value.name](dim)
    return _pair_fn(value, dim, eps)


# -- parsing ---------------------------------------------------------------

_LINE = re.compile(r"^\s*(?P<key>[A-Za-z_][A-Za-z0-9_.]*)\s*(?P<sep>[=:])\s*")

# key -> (attribute, kind); kinds drive value conversion and serialization
_FIELDS = {
    "name": ("name", "str"),
    "algebra.scalar": ("scalar", SCALARS),
    "algebra.dim": ("dim", "int"),
    "algebra.norm_mode": ("norm_mode", NORM_MODES),
    "algebra.order_mode": ("order_mode", ORDER_MODES),
    "domain.kind": ("domain_kind", DOMAIN_KINDS),
    "domain.lo": ("lo", "float"),
    "domain.hi": ("hi", "float"),
    "domain.lo_closed": ("lo_closed", "bool"),
    "domain.hi_closed": ("hi_closed", "bool"),
    "domain.points": ("points", "floats"),
    "domain.depth": ("depth", "int"),
    "domain.complete": ("complete", "bool"),
    "metric": ("metric", "pair"),
    "maps.T": ("T", "map"),
    "maps.S": ("S", "map"),
    "gauges.q": ("q", "pair"),
    "gauges.delta": ("delta", "pair"),
    "gauges.form": ("form", FORMS),
    "run.max_power": ("max_power", "int"),
    "run.max_iter": ("max_iter", "int"),
    "run.tol": ("tol", "float"),
    "run.sample_step": ("sample_step", "float"),
    "run.starts": ("starts", "floats"),
}
_REQUIRED = ("domain.kind", "maps.T", "gauges.q", "gauges.delta")
_DOMAIN_REQUIRED = {"interval": ("domain.lo", "domain.hi"), "finite": ("domain.points",), "dyadic": ("domain.depth",)}


class _Bad(Exception):
    def __init__(self, code, offset, message):
        self.code, self.offset, self.message = code, offset, message


def _strip_comment(line: str) -> str:
    in_quote = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i]
    return line


def _unquote(raw: str) -> tuple[str, int]:
    """Drop one pair of surrounding double quotes; return text and offset shift."""
    s = raw.rstrip()
    if len(s) >= 2 and s[0] == '"' and s[-1] == '"':
        return s[1:-1], 1
    if s.startswith('"'):
        raise _Bad(E_SYNTAX, 0, "unterminated string")
    return s, 0


def _parse_expr(text: str, offset: int) -> expr.Expr:
    try:
        return expr.parse(text)
    except ExpressionError as exc:
        raise _Bad(E_EXPR, offset + (exc.position or 0), exc.message) from None


def _split_top(text: str, sep: str) -> list[tuple[str, int]]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append((text[start:i], start))
            start = i + 1
    parts.append((text[start:], start))
    return parts


def _parse_value(kind, raw: str):
    text, shift = _unquote(raw)
    if kind == "str":
        if not text:
            raise _Bad(E_VALUE, 0, "empty value")
        return text
    if isinstance(kind, tuple):
        if text not in kind:
            raise _Bad(E_VALUE, shift, f"expected one of {', '.join(kind)}, got {text!r}")
        return text
    if kind == "int":
        try:
            return int(text)
        except ValueError:
            raise _Bad(E_VALUE, shift, f"expected an integer, got {text!r}") from None
    if kind == "float":
        try:
            v = float(text)
        except ValueError:
            raise _Bad(E_VALUE, shift, f"expected a number, got {text!r}") from None
        if not math.isfinite(v):
            raise _Bad(E_VALUE, shift, "numbers must be finite")
        return v
    if kind == "bool":
        if text.lower() not in ("true", "false"):
            raise _Bad(E_VALUE, shift, f"expected true or false, got {text!r}")
        return text.lower() == "true"
    if kind == "floats":
        out = []
        for part, off in _split_top(text, ","):
            try:
                v = float(part)
            except ValueError:
                raise _Bad(E_VALUE, shift + off, f"expected a number, got {part.strip()!r}") from None
            if not math.isfinite(v):
                raise _Bad(E_VALUE, shift + off, "numbers must be finite")
            out.append(v)
        return tuple(out)
    if text.startswith("builtin:"):
        name = text[len("builtin:"):].strip()
        table = builtins.MAPS if kind == "map" else builtins.METRICS
        if name not in table:
            raise _Bad(E_BUILTIN, shift, f"unknown builtin {name!r}; available: {', '.join(sorted(table))}")
        return Builtin(name)
    stripped = text.strip()
    if stripped.startswith("["):
        if kind == "map":
            raise _Bad(E_VALUE, shift, "maps take scalar expressions")
        if not stripped.endswith("]"):
            raise _Bad(E_SYNTAX, shift + len(text), "unterminated matrix literal")
        lead = text.index("[") + 1
        body = text[lead:text.rindex("]")]
        rows = []
        for row, roff in _split_top(body, ";"):
            entries = []
            for ent, eoff in _split_top(row, ","):
                lead_ws = len(ent) - len(ent.lstrip())
                body_ent, q = _unquote(ent.strip())
                entries.append(_parse_expr(body_ent, shift + lead + roff + eoff + lead_ws + q))
            rows.append(tuple(entries))
        if len({len(r) for r in rows}) != 1 or len(rows) != len(rows[0]):
            raise _Bad(E_INVARIANT, shift, "matrix literal must be square")
        return Matrix(tuple(rows))
    e = _parse_expr(text, shift)
    if kind == "map" and "y" in expr.variables(e):
        raise _Bad(E_INVARIANT, shift, "maps may only use the variable x")
    return e


def parse_scenario(text: str) -> ScenarioFile:
    """Parse and validate a scenario file; raise :class:`ScenarioParseError`."""
    diags: list[Diagnostic] = []
    seen: dict[str, int] = {}
    values: dict[str, object] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line)
        if not line.strip():
            continue
        m = _LINE.match(line)
        if m is None:
            col = len(line) - len(line.lstrip()) + 1
            diags.append(Diagnostic(E_SYNTAX, lineno, col, "expected 'key = value'"))
            continue
        key = m.group("key")
        key_col = m.start("key") + 1
        if key not in _FIELDS:
            diags.append(Diagnostic(E_UNKNOWN_FIELD, lineno, key_col, f"unknown field {key!r}"))
            continue
        if key in seen:
            diags.append(Diagnostic(E_DUPLICATE, lineno, key_col, f"duplicate field {key!r} (first on line {seen[key]})"))
            continue
        seen[key] = lineno
        raw = line[m.end():]
        if not raw.strip():
            diags.append(Diagnostic(E_VALUE, lineno, m.end() + 1, f"field {key!r} has no value"))
            continue
        try:
            values[key] = _parse_value(_FIELDS[key][1], raw)
        except _Bad as bad:
            diags.append(Diagnostic(bad.code, lineno, m.end() + bad.offset + 1, bad.message))
    last = len(text.splitlines()) or 1
    for key in _REQUIRED:
        if key not in seen:
            diags.append(Diagnostic(E_MISSING, last, 1, f"missing required field {key!r}"))
    kind = values.get("domain.kind")
    for key in _DOMAIN_REQUIRED.get(kind, ()):
        if key not in seen:
            diags.append(Diagnostic(E_MISSING, last, 1, f"domain kind {kind!r} requires {key!r}"))
    if diags:
        raise ScenarioParseError(diags)
    sf = ScenarioFile(**{_FIELDS[k][0]: v for k, v in values.items()})
    problems = _invariants(sf)
    if problems:
        raise ScenarioParseError([Diagnostic(E_INVARIANT, seen.get(k, last), 1, msg) for k, msg in problems])
    return sf


def _invariants(sf: ScenarioFile) -> list[tuple[str, str]]:
    out = []
    if sf.dim < 1:
        out.append(("algebra.dim", "algebra.dim must be >= 1"))
    for key, val in (("gauges.q", sf.q), ("gauges.delta", sf.delta), ("metric", sf.metric)):
        if isinstance(val, Matrix) and len(val.rows) != sf.dim:
            out.append((key, f"{key} is {len(val.rows)}x{len(val.rows)} but algebra.dim = {sf.dim}"))
    if isinstance(sf.metric, Builtin) and builtins.METRIC_DIMS.get(sf.metric.name, sf.dim) != sf.dim:
        out.append(("metric", f"builtin {sf.metric.name!r} needs algebra.dim = {builtins.METRIC_DIMS[sf.metric.name]}"))
    for key, val in (("run.max_power", sf.max_power), ("run.max_iter", sf.max_iter)):
        if val < 1:
            out.append((key, f"{key} must be >= 1"))
    if not (0 <= sf.tol < 1e-3):
        out.append(("run.tol", "run.tol must lie in [0, 1e-3)"))
    if not out:
        try:
            domain = sf.domain()
        except DomainError as exc:
            return [("domain.kind", str(exc))]
        for s in sf.starts:
            if not domain.contains(s, sf.tol):
                out.append(("run.starts", f"start {s!r} lies outside the domain"))
    return out


# -- serialization ---------------------------------------------------------

def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(p)) for p in v)
    if isinstance(v, Builtin):
        return f"builtin:{v.name}"
    if isinstance(v, Matrix):
        return "[" + "; ".join(", ".join(expr.to_source(e) for e in row) for row in v.rows) + "]"
    if isinstance(v, str):
        return v
    return '"' + expr.to_source(v) + '"'


def serialize_scenario(sf: ScenarioFile) -> str:
    """Normalized text form; ``parse_scenario`` inverts it exactly."""
    skip = {
        "interval": ("domain.points", "domain.depth"),
        "finite": ("domain.lo", "domain.hi", "domain.lo_closed", "domain.hi_closed", "domain.depth"),
        "dyadic": ("domain.lo", "domain.hi", "domain.lo_closed", "domain.hi_closed", "domain.points"),
    }[sf.domain_kind]
    lines = []
    for key, (attr, _) in _FIELDS.items():
        if key in skip:
            continue
        v = getattr(sf, attr)
        if v is None or (key == "run.starts" and not v):
            continue
        lines.append(f"{key} = {_fmt_value(v)}")
    return "\n".join(lines) + "\n"


def with_overrides(sf: ScenarioFile, **changes) -> ScenarioFile:
    changes = {k: v for k, v in changes.items() if v is not None}
    return replace(sf, **changes) if changes else sf


def field_names() -> list[str]:
    return [f.name for f in fields(ScenarioFile)]


__all__ = [
    "Builtin", "Diagnostic", "Matrix", "ScenarioFile", "ScenarioParseError",
    "default_starts", "parse_scenario", "serialize_scenario", "with_overrides",
]
