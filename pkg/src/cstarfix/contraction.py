"""Certifiers for contractive conditions over sampled pairs.

Every certifier walks the checks in lexicographic ``(n, x, y)`` order, keeps
the minimum normalized margin (see :func:`cstarfix.algebra.order_margin`) and
reports the first violation as the witness ``(x, y, n)``.

Gauge conventions:

* type1: ``d(T^n x, T^n y) <= (q*)^n delta q^n`` with ``||q(x, y)|| < 1``;
* type2: ``d(T^n x, T^n y) <= q^n delta`` with ``q(x, y)`` central positive;
* the common-map variants replace ``T^n y`` with ``S^n y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import algebra as alg
from .certificate import Certificate
from .errors import ContractionError, ScenarioError
from .space import MetricSpace, cartesian_pairs

Map = Callable[[float], float]
Gauge = Callable[[float, float], object]
FORMS = ("type1", "type2")


@dataclass(frozen=True)
class MappingScenario:
    """Self-map(s) on a metric space together with the gauges ``q`` and ``delta``."""

    space: MetricSpace
    T: Map
    q: Gauge
    delta: Gauge
    S: Map | None = None
    max_power: int = 10
    form: str = "type1"
    name: str = ""

    def __post_init__(self):
        if self.max_power < 1:
            raise ScenarioError("max_power must be a positive integer")
        if self.form not in FORMS:
            raise ScenarioError(f"unknown gauge form {self.form!r}")

    @property
    def algebra(self) -> alg.Algebra:
        return self.space.algebra

    def gauge(self, x: float, y: float) -> np.ndarray:
        return self.algebra.element(self.q(x, y))

    def bound(self, x: float, y: float) -> np.ndarray:
        return self.algebra.element(self.delta(x, y))

    def sample_pairs(self) -> list[tuple[float, float]]:
        return cartesian_pairs(self.space.domain.members())


def constant(value) -> Gauge:
    return lambda x, y: value


def _pairs(scn: MappingScenario, sample) -> list[tuple[float, float]]:
    pairs = scn.sample_pairs() if sample is None else [(float(x), float(y)) for x, y in sample]
    if not pairs:
        raise ValueError("sample must contain at least one pair")
    return pairs


def _orbits(space: MetricSpace, fn: Map, points, depth: int) -> dict[float, list[float]]:
    """``orbit[x][n] = fn^n(x)`` for ``n = 0..depth``; images must stay in the domain."""
    orbits = {}
    for x in points:
        seq = [x]
        for _ in range(depth):
            nxt = fn(seq[-1])
            if not space.domain.contains(nxt, space.tol.eps_eq):
                raise ScenarioError(f"map sends {seq[-1]!r} to {nxt!r}, outside the domain")
            seq.append(nxt)
        orbits[x] = seq
    return orbits


def _check_delta(scn: MappingScenario, pairs) -> list[np.ndarray]:
    deltas = []
    for x, y in pairs:
        dl = scn.bound(x, y)
        if not scn.algebra.is_positive(dl):
            raise ScenarioError(f"delta({x!r}, {y!r}) is not positive")
        deltas.append(dl)
    return deltas


def _check_type1_gauges(scn: MappingScenario, pairs) -> list[np.ndarray]:
    gauges = []
    for x, y in pairs:
        g = scn.gauge(x, y)
        if scn.algebra.norm(g) >= 1.0:
            raise ContractionError(f"||q({x!r}, {y!r})|| >= 1: not a type1 gauge")
        gauges.append(g)
    return gauges


def _check_type2_gauges(scn: MappingScenario, pairs) -> list[np.ndarray]:
    gauges = []
    for x, y in pairs:
        g = scn.gauge(x, y)
        if not scn.algebra.is_positive(g):
            raise ContractionError(f"q({x!r}, {y!r}) is not positive")
        if not scn.algebra.is_central(g):
            raise ContractionError(f"q({x!r}, {y!r}) is not central")
        if scn.algebra.norm(g) >= 1.0:
            raise ContractionError(f"||q({x!r}, {y!r})|| >= 1: not a type2 gauge")
        gauges.append(g)
    return gauges


def _iterate_checks(condition: str, scn: MappingScenario, pairs, left: Map, right: Map,
                    gauges, deltas, form: str) -> Certificate:
    space = scn.space
    algebra = scn.algebra
    eps = algebra.tol.eps_pos
    N = scn.max_power
    xs = sorted({x for x, _ in pairs})
    ys = sorted({y for _, y in pairs})
    left_orbits = _orbits(space, left, xs, N)
    right_orbits = left_orbits if right is left and xs == ys else _orbits(space, right, ys, N)
    powers = [np.eye(algebra.dim, dtype=np.result_type(g.dtype, float)) for g in gauges]
    worst = math.inf
    witness = None
    for n in range(1, N + 1):
        for idx, (x, y) in enumerate(pairs):
            powers[idx] = powers[idx] @ gauges[idx]
            qn = powers[idx]
            if form == "type1":
                rhs = qn.conj().T @ deltas[idx] @ qn
            else:
                rhs = qn @ deltas[idx]
            lhs = space.d(left_orbits[x][n], right_orbits[y][n])
            m = algebra.margin(lhs, rhs)
            if m < worst:
                worst = m
            if witness is None and m < -eps:
                witness = (x, y, n)
    return Certificate(condition, witness is None, float(worst), witness,
                       sample_size=len(pairs), max_power=N)


def certify_eq1(scn: MappingScenario, a, sample: Sequence[tuple[float, float]] | None = None) -> Certificate:
    """Check ``d(Tx, Ty) <= a* d(x, y) a`` for every sampled pair."""
    algebra = scn.algebra
    a = algebra.element(a)
    if algebra.norm(a) >= 1.0:
        raise ContractionError(f"eq1 gauge must have norm < 1, got {algebra.norm(a)!r}")
    pairs = _pairs(scn, sample)
    space = scn.space
    ah = a.conj().T
    worst = math.inf
    witness = None
    images = {}
    for x, y in pairs:
        for p in (x, y):
            if p not in images:
                images[p] = scn.T(p)
        m = algebra.margin(space.d(images[x], images[y]), ah @ space.d(x, y) @ a)
        worst = min(worst, m)
        if witness is None and m < -algebra.tol.eps_pos:
            witness = (x, y, 1)
    return Certificate("eq1-contractive", witness is None, float(worst), witness,
                       sample_size=len(pairs), max_power=1)


def certify_ciric1(scn: MappingScenario, sample: Sequence[tuple[float, float]] | None = None) -> Certificate:
    pairs = _pairs(scn, sample)
    gauges = _check_type1_gauges(scn, pairs)
    deltas = _check_delta(scn, pairs)
    return _iterate_checks("ciric-type1", scn, pairs, scn.T, scn.T, gauges, deltas, "type1")


def certify_ciric2(scn: MappingScenario, sample: Sequence[tuple[float, float]] | None = None) -> Certificate:
    pairs = _pairs(scn, sample)
    gauges = _check_type2_gauges(scn, pairs)
    deltas = _check_delta(scn, pairs)
    return _iterate_checks("ciric-type2", scn, pairs, scn.T, scn.T, gauges, deltas, "type2")


def certify_common(scn: MappingScenario, sample: Sequence[tuple[float, float]] | None = None,
                   form: str = "type1") -> Certificate:
    """Check the mixed-orbit inequality ``d(T^n x, S^n y) <= bound``."""
    if scn.S is None:
        raise ScenarioError("certify_common needs a second map S")
    if form not in FORMS:
        raise ScenarioError(f"unknown form {form!r}")
    pairs = _pairs(scn, sample)
    gauges = _check_type1_gauges(scn, pairs) if form == "type1" else _check_type2_gauges(scn, pairs)
    deltas = _check_delta(scn, pairs)
    return _iterate_checks(f"common-{form}", scn, pairs, scn.T, scn.S, gauges, deltas, form)


def certify_kannan(space: MetricSpace, T: Map, A, sample: Sequence[tuple[float, float]] | None = None) -> Certificate:
    """Check ``d(Tx, Ty) <= A (d(x, Tx) + d(y, Ty))`` for central positive ``A``.

    On success the certificate carries ``B = A (I - A)^-1`` as
    ``derived_gauge``; ``T`` then satisfies the type2 bound with gauge ``B``
    and ``delta(x, y) = d(x, Tx) + d(y, Ty)``.
    """
    algebra = space.algebra
    A = algebra.element(A)
    if not algebra.is_central(A):
        raise ContractionError("Kannan gauge A must be central")
    B = alg.inv_residual_transform(A, algebra.tol)
    if sample is None:
        pairs = cartesian_pairs(space.domain.members())
    else:
        pairs = [(float(x), float(y)) for x, y in sample]
    images = {}
    for x, y in pairs:
        for p in (x, y):
            if p not in images:
                images[p] = T(p)
    worst = math.inf
    witness = None
    for x, y in pairs:
        rhs = A @ (space.d(x, images[x]) + space.d(y, images[y]))
        m = algebra.margin(space.d(images[x], images[y]), rhs)
        worst = min(worst, m)
        if witness is None and m < -algebra.tol.eps_pos:
            witness = (x, y, 1)
    passed = witness is None
    return Certificate("kannan", passed, float(worst), witness, sample_size=len(pairs), max_power=1,
                       derived_gauge=B if passed else None)


# Translations between conditions, following the implication chain
# eq1 => type1 and Kannan => type2.

def eq1_as_ciric1(scn: MappingScenario, a) -> MappingScenario:
    """Type1 scenario with ``q = a`` and ``delta = d``."""
    a = scn.algebra.element(a)
    return replace(scn, q=constant(a), delta=scn.space.d, form="type1")


def kannan_as_ciric2(space: MetricSpace, T: Map, B, max_power: int = 10) -> MappingScenario:
    """Type2 scenario with ``q = B`` and ``delta(x, y) = d(x, Tx) + d(y, Ty)``."""
    B = space.algebra.element(B)

    def delta(x, y):
        return space.d(x, T(x)) + space.d(y, T(y))

    return MappingScenario(space, T, constant(B), delta, max_power=max_power, form="type2")


def squared_gauge(scn: MappingScenario) -> MappingScenario:
    """Type2 scenario with gauge ``q* q``.

    In a commutative algebra ``(q*)^n delta q^n = (q* q)^n delta``, so this is
    the type2 twin of a type1 scenario.
    """
    def q2(x, y):
        g = scn.gauge(x, y)
        return g.conj().T @ g

    return replace(scn, q=q2, form="type2")
