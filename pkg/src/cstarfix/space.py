"""C*-algebra valued metric spaces over subsets of the real line.

A :class:`MetricSpace` pairs a :class:`PointDomain` (a sampled interval, a
finite list, or the truncated dyadic set ``{0} U {2**-i}``) with a metric
``d(x, y)`` taking values in the positive cone of an :class:`Algebra`.

All universally quantified properties are checked on finite samples; a passing
certificate means "no violation on this sample", nothing more.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .algebra import Algebra, Tolerance
from .certificate import Certificate, threshold_margin
from .errors import DomainError

DOMAIN_KINDS = ("interval", "finite", "dyadic")

# Cauchy-tail window: consecutive step distances that must fall below eps_eq.
CAUCHY_WINDOW = 5


@dataclass(frozen=True)
class PointDomain:
    kind: str
    lo: float = 0.0
    hi: float = 1.0
    lo_closed: bool = True
    hi_closed: bool = True
    points: tuple[float, ...] = ()
    depth: int = 0
    step: float = 0.05

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.kind == "interval":
            if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
                raise DomainError("interval endpoints must be finite with lo < hi")
            if not self.step > 0:
                raise DomainError("sample step must be positive")
        elif self.kind == "finite":
            if not self.points:
                raise DomainError("finite domain needs at least one point")
            if not all(math.isfinite(p) for p in self.points):
                raise DomainError("finite domain points must be finite reals")
            if len(set(self.points)) != len(self.points):
                raise DomainError("finite domain points must be distinct")
            object.__setattr__(self, "points", tuple(sorted(float(p) for p in self.points)))
        elif self.depth < 1:
            raise DomainError("dyadic depth must be >= 1")

    @classmethod
    def interval(cls, lo, hi, *, lo_closed=True, hi_closed=True, step=0.05):
        return cls("interval", lo=float(lo), hi=float(hi), lo_closed=lo_closed, hi_closed=hi_closed, step=float(step))

    @classmethod
    def finite(cls, points: Sequence[float]):
        return cls("finite", points=tuple(float(p) for p in points))

    @classmethod
    def dyadic(cls, depth: int):
        return cls("dyadic", depth=int(depth))

    def with_step(self, step: float) -> "PointDomain":
        if self.kind != "interval":
            return self
        return PointDomain.interval(self.lo, self.hi, lo_closed=self.lo_closed, hi_closed=self.hi_closed, step=step)

    def members(self) -> tuple[float, ...]:
        """Sample points in ascending order (the whole set for discrete kinds)."""
        if self.kind == "finite":
            return self.points
        if self.kind == "dyadic":
            return (0.0,) + tuple(2.0**-i for i in range(self.depth, 0, -1))
        n = max(1, int(math.ceil((self.hi - self.lo) / self.step - 1e-9)))
        grid = np.round(np.linspace(self.lo, self.hi, n + 1), 12)
        pts = [float(v) for v in grid]
        if not self.lo_closed:
            pts = pts[1:]
        if not self.hi_closed:
            pts = pts[:-1]
        return tuple(pts)

    def contains(self, x: float, eps: float = 1e-10) -> bool:
        if not math.isfinite(x):
            return False
        if self.kind == "interval":
            above = x >= self.lo - eps if self.lo_closed else x > self.lo
            below = x <= self.hi + eps if self.hi_closed else x < self.hi
            return above and below
        return abs(self.snap(x) - x) <= eps

    def snap(self, x: float) -> float:
        """Nearest member for discrete kinds; identity on intervals."""
        if self.kind == "interval":
            return x
        pts = self.members()
        return min(pts, key=lambda p: (abs(p - x), p))

    def snap_limit(self, tail: Sequence[float]) -> float:
        """Candidate limit of a numerically Cauchy tail.

        Intervals return the final iterate. On discrete domains a tail that
        snaps to a single member converges to that member; a tail that keeps
        moving between members can only converge to an accumulation point of
        the domain (``0`` for the dyadic set).
        """
        if self.kind == "interval":
            return tail[-1]
        snapped = [self.snap(t) for t in tail]
        if all(s == snapped[-1] for s in snapped):
            return snapped[-1]
        if self.kind == "dyadic":
            return 0.0
        return snapped[-1]


@dataclass(frozen=True)
class MetricSpace:
    domain: PointDomain
    metric: Callable[[float, float], object]
    algebra: Algebra = field(default_factory=Algebra)
    complete: bool = True

    @property
    def tol(self) -> Tolerance:
        return self.algebra.tol

    def d(self, x: float, y: float) -> np.ndarray:
        return self.algebra.element(self.metric(x, y))

    def dnorm(self, x: float, y: float) -> float:
        return self.algebra.norm(self.d(x, y))

    def require(self, x: float) -> None:
        if not self.domain.contains(x, self.tol.eps_eq):
            raise DomainError(f"point {x!r} lies outside the {self.domain.kind} domain")


def check_metric_axioms(space: MetricSpace, sample: Sequence[float] | None = None,
                        tol: Tolerance | None = None) -> Certificate:
    """Check positivity, d(x,x) = 0, symmetry and the order triangle inequality.

    Triples are scanned in lexicographic ``(x, y, z)`` order over ``sample``;
    the first violation becomes the witness ``(x, y, z)`` (``z`` is ``None``
    for pairwise failures) and its kind is recorded in ``details``.
    """
    tol = tol or space.tol
    alg = space.algebra
    pts = list(space.domain.members() if sample is None else sample)
    if not pts:
        raise ValueError("sample must be nonempty")
    for p in pts:
        space.require(p)
    n = len(pts)
    dist = [[space.d(x, y) for y in pts] for x in pts]
    if alg.dim == 1:
        worst, witness, reason = _axioms_scalar(np.array([[v[0, 0] for v in row] for row in dist]), pts, tol)
    else:
        worst, witness, reason = _axioms_matrix(alg, dist, pts, tol)
    passed = witness is None
    details = {"sample": pts}
    if reason:
        details["violation"] = reason
    return Certificate("metric-axioms", passed, float(worst), witness, sample_size=n, details=details)


def _axioms_matrix(alg, dist, pts, tol):
    n = len(pts)
    zero = alg.zero
    worst = math.inf
    witness = None
    reason = None

    def record(margin, wit, why):
        nonlocal worst, witness, reason
        worst = min(worst, margin)
        if witness is None and margin < -tol.eps_pos:
            witness, reason = wit, why

    for i in range(n):
        for j in range(n):
            dij = dist[i][j]
            x, y = pts[i], pts[j]
            record(alg.margin(zero, dij), (x, y, None), "positivity")
            if i == j:
                record(threshold_margin(alg.norm(dij), tol.eps_eq, tol.eps_pos), (x, y, None), "identity")
            elif not np.any(dij):
                record(-1.0, (x, y, None), "indiscernibles")
            scale = max(1.0, alg.norm(dij))
            asym = float(np.max(np.abs(dij - dist[j][i])))
            record(threshold_margin(asym, tol.eps_eq * scale, tol.eps_pos), (x, y, None), "symmetry")
            for k in range(n):
                record(alg.margin(dij, dist[i][k] + dist[k][j]), (x, y, pts[k]), "triangle")
    return worst, witness, reason


def _axioms_scalar(D, pts, tol):
    """Vectorised twin of :func:`_axioms_matrix` for one-dimensional algebras.

    Produces the same margins and the same first witness in scan order.
    """
    n = len(pts)
    absd = np.abs(D)
    safe = np.where(absd > 0, absd, 1.0)
    pos = np.where(absd > 0, D.real / safe, 0.0)
    margin = np.vectorize(lambda v, t: threshold_margin(v, t, tol.eps_pos), otypes=[float])
    eye = np.eye(n, dtype=bool)
    ident = np.where(eye, margin(absd, tol.eps_eq), np.where(absd == 0, -1.0, np.inf))
    sym = margin(np.abs(D - D.T), tol.eps_eq * np.maximum(1.0, absd))
    # tri[i, j, k] checks d(x_i, x_j) <= d(x_i, x_k) + d(x_k, x_j)
    rhs = D[:, None, :] + D.T[None, :, :]
    lhs = np.broadcast_to(D[:, :, None], rhs.shape)
    tscale = np.maximum(np.abs(lhs), np.abs(rhs))
    tri = np.where(tscale > 0, (rhs - lhs).real / np.where(tscale > 0, tscale, 1.0), 0.0)
    stages = np.stack([pos, ident, sym])
    worst = float(min(stages.min(), tri.min()))
    bad_pairs = stages < -tol.eps_pos
    bad_tri = tri < -tol.eps_pos
    for i in range(n):
        for j in range(n):
            for stage, why in enumerate(("positivity", "identity", "symmetry")):
                if bad_pairs[stage, i, j]:
                    if stage == 1 and i != j:
                        why = "indiscernibles"
                    return worst, (pts[i], pts[j], None), why
            ks = np.flatnonzero(bad_tri[i, j])
            if ks.size:
                return worst, (pts[i], pts[j], pts[int(ks[0])]), "triangle"
    return worst, None, None


def sequence_limit(space: MetricSpace, seq: Sequence[float], tol: Tolerance | None = None,
                   window: int = CAUCHY_WINDOW) -> float | None:
    """Candidate limit of ``seq`` if its tail is numerically Cauchy, else ``None``.

    The tail is Cauchy when the last ``window`` consecutive step distances all
    have norm at most ``eps_eq``.
    """
    tol = tol or space.tol
    if len(seq) < 2:
        raise ValueError("sequence_limit needs at least two terms")
    k = min(window, len(seq) - 1)
    tail = list(seq[-(k + 1):])
    for a, b in zip(tail, tail[1:]):
        if space.dnorm(a, b) > tol.eps_eq:
            return None
    return space.domain.snap_limit(tail)


def probe_continuity(space: MetricSpace, fn: Callable[[float], float], at: float,
                     probes: Sequence[float], tol: Tolerance | None = None) -> Certificate:
    """Semi-decide continuity of ``fn`` at ``at`` from a finite probe set.

    The probes are bucketed on a ladder of radii shrinking by a factor of 10.
    For each radius ``r`` the largest image distance among probes closer than
    ``r`` is recorded. A map is flagged discontinuous when, over at least
    three rungs, that image distance fails to halve and stays above
    ``eps_eq``; the witness is ``(probe, at, ||d(fn(probe), fn(at))||)``.
    ``details["modulus"]`` is the largest ratio of image to source distance.
    """
    tol = tol or space.tol
    fa = fn(at)
    near = []
    for p in probes:
        r = space.dnorm(p, at)
        if r > 0:
            near.append((r, space.dnorm(fn(p), fa), p))
    if not near:
        return Certificate("continuity", True, 0.0, None, sample_size=0,
                           details={"rungs": [], "modulus": 0.0})
    near.sort()
    radius = near[-1][0] * (1 + 1e-12)
    rungs = []
    while True:
        inside = [t for t in near if t[0] < radius]
        if not inside:
            break
        worst = max(inside, key=lambda t: (t[1], -t[0]))
        rungs.append((radius, worst[1], worst[2]))
        radius /= 10.0
    modulus = max(t[1] / t[0] for t in near)
    first_eps, last_eps = rungs[0][1], rungs[-1][1]
    threshold = max(tol.eps_eq, 0.5 * first_eps)
    violated = len(rungs) >= 3 and last_eps > threshold
    details = {"rungs": [[r, e] for r, e, _ in rungs], "modulus": modulus}
    if violated:
        witness = (rungs[-1][2], at, last_eps)
        margin = threshold_margin(last_eps, threshold, tol.eps_pos)
        return Certificate("continuity", False, margin, witness, sample_size=len(near), details=details)
    return Certificate("continuity", True, 0.0, None, sample_size=len(near), details=details)


def cartesian_pairs(points: Sequence[float]) -> list[tuple[float, float]]:
    return list(product(points, points))
