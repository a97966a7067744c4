"""Fixed-point and common-fixed-point iteration with a-priori tail bounds.

Stopping is two-staged. An orbit is declared numerically Cauchy once
``CAUCHY_WINDOW`` consecutive step distances have norm at most ``eps_eq`` (or
immediately when a Picard step is exactly stationary). The candidate limit is
then snapped to the domain and checked for fixedness by evaluating
``||d(T z, z)||``; a Cauchy orbit whose limit is not fixed gets the verdict
``converged-not-fixed``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .algebra import Tolerance
from .certificate import Certificate, threshold_margin, to_jsonable
from .contraction import Map, MappingScenario
from .errors import DomainError, ScenarioError
from .space import CAUCHY_WINDOW, MetricSpace, sequence_limit

VERDICTS = ("converged-fixed-point", "converged-not-fixed", "max-iter", "diverged")
DEFAULT_MAX_ITER = 10_000
DIVERGENCE_SPAN = 10
DIVERGENCE_FACTOR = 10.0


@dataclass(frozen=True)
class IterationTrace:
    iterates: list[float]
    step_distances: list[np.ndarray]
    residual_norms: list[float]
    apriori_bounds: list[float]
    verdict: str
    fixed_point: float | None
    bound_constants: tuple[float, float]
    limit: float | None = None
    limit_residuals: dict[str, float] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.verdict == "converged-fixed-point"

    def to_dict(self) -> dict:
        return {
            "iterates": list(self.iterates),
            "step_distances": to_jsonable(self.step_distances),
            "residual_norms": list(self.residual_norms),
            "apriori_bounds": list(self.apriori_bounds),
            "verdict": self.verdict,
            "fixed_point": self.fixed_point,
            "bound_constants": {"q_norm": self.bound_constants[0], "delta_norm": self.bound_constants[1]},
            "limit": self.limit,
            "limit_residuals": dict(self.limit_residuals),
        }

    def rows(self) -> list[tuple]:
        """``(n, x_n, residual_norm, apriori_bound)``; the last iterate has no residual."""
        out = []
        for n, x in enumerate(self.iterates):
            res = self.residual_norms[n] if n < len(self.residual_norms) else None
            out.append((n, x, res, self.apriori_bounds[n]))
        return out


def apriori_bound(q_norm: float, delta_norm: float, n: int, form: str = "type1") -> float:
    """Geometric tail bound on ``||d(x_n, x_m)||`` for every ``m > n``.

    type1: ``q^(2n) / (1 - q^2) * delta``; type2: ``q^n / (1 - q) * delta``.
    """
    if q_norm >= 1.0:
        return math.inf
    if form == "type1":
        return q_norm ** (2 * n) / (1.0 - q_norm**2) * delta_norm
    return q_norm**n / (1.0 - q_norm) * delta_norm


def _diverging(residuals: list[float]) -> bool:
    if len(residuals) <= DIVERGENCE_SPAN:
        return False
    now, then = residuals[-1], residuals[-1 - DIVERGENCE_SPAN]
    if not math.isfinite(now):
        return True
    return then > 0 and now > DIVERGENCE_FACTOR * then


def _cauchy(residuals: list[float], eps: float, window: int) -> bool:
    return len(residuals) >= window and all(r <= eps for r in residuals[-window:])


def _limit_check(space: MetricSpace, tail: Sequence[float], maps: dict[str, Map], tol: Tolerance):
    z = space.domain.snap_limit(list(tail))
    if not space.domain.contains(z, tol.eps_eq):
        return z, {name: math.nan for name in maps}, False
    residuals = {name: space.dnorm(fn(z), z) for name, fn in maps.items()}
    fixed = all(r <= tol.eps_eq for r in residuals.values())
    return z, residuals, fixed


def picard_solve(scn: MappingScenario, x0: float, max_iter: int = DEFAULT_MAX_ITER,
                 tol: Tolerance | None = None, window: int = CAUCHY_WINDOW) -> IterationTrace:
    """Iterate ``x_{n+1} = T(x_n)`` from ``x0``.

    ``apriori_bounds[n]`` uses ``||q(x0, T x0)||`` and ``||delta(x0, T x0)||``
    with the scenario's gauge form.
    """
    space = scn.space
    tol = tol or space.tol
    if not space.domain.contains(x0, tol.eps_eq):
        raise DomainError(f"start {x0!r} lies outside the domain")
    T = scn.T
    x1 = T(x0)
    q_norm = scn.algebra.norm(scn.gauge(x0, x1))
    delta_norm = scn.algebra.norm(scn.bound(x0, x1))

    iterates = [x0]
    steps: list[np.ndarray] = []
    residuals: list[float] = []
    verdict = "max-iter"
    stationary = False
    x = x0
    for _ in range(max_iter):
        nxt = T(x)
        if not math.isfinite(nxt):
            verdict = "diverged"
            break
        step = space.d(x, nxt)
        r = scn.algebra.norm(step)
        iterates.append(nxt)
        steps.append(step)
        residuals.append(r)
        if nxt == x:
            stationary = True
            break
        if _cauchy(residuals, tol.eps_eq, window):
            break
        if _diverging(residuals):
            verdict = "diverged"
            break
        x = nxt

    limit = None
    limit_residuals: dict[str, float] = {}
    fixed_point = None
    if verdict != "diverged" and (stationary or _cauchy(residuals, tol.eps_eq, window)):
        tail = iterates[-(min(window, len(iterates) - 1) + 1):]
        limit, limit_residuals, fixed = _limit_check(space, tail, {"T": T}, tol)
        verdict = "converged-fixed-point" if fixed else "converged-not-fixed"
        fixed_point = limit if fixed else None

    bounds = [apriori_bound(q_norm, delta_norm, n, scn.form) for n in range(len(iterates))]
    return IterationTrace(iterates, steps, residuals, bounds, verdict, fixed_point,
                          (q_norm, delta_norm), limit, limit_residuals)


def common_solve(scn: MappingScenario, x0: float, max_iter: int = DEFAULT_MAX_ITER,
                 tol: Tolerance | None = None, window: int = CAUCHY_WINDOW) -> IterationTrace:
    """Alternating sequence ``x_n = T^n x0`` (n even), ``S^n x0`` (n odd).

    Each term is a power of a single map applied to ``x0``, not an interleaved
    orbit. The limit must be fixed by both maps.
    """
    if scn.S is None:
        raise ScenarioError("common_solve needs a second map S")
    space = scn.space
    tol = tol or space.tol
    if not space.domain.contains(x0, tol.eps_eq):
        raise DomainError(f"start {x0!r} lies outside the domain")
    T, S = scn.T, scn.S
    algebra = scn.algebra
    Sx0, Tx0 = S(x0), T(x0)
    q1 = algebra.norm(scn.gauge(x0, Sx0))
    d1 = algebra.norm(scn.bound(x0, Sx0))
    q2 = algebra.norm(scn.gauge(Tx0, x0))
    d2 = algebra.norm(scn.bound(Tx0, x0))
    q_norm, delta_norm = max(q1, q2), d1 + d2

    t_pow, s_pow = x0, x0  # T^n x0 and S^n x0
    iterates = [x0]
    steps: list[np.ndarray] = []
    residuals: list[float] = []
    verdict = "max-iter"
    for n in range(1, max_iter + 1):
        t_pow, s_pow = T(t_pow), S(s_pow)
        nxt = t_pow if n % 2 == 0 else s_pow
        if not math.isfinite(nxt):
            verdict = "diverged"
            break
        step = space.d(iterates[-1], nxt)
        iterates.append(nxt)
        steps.append(step)
        residuals.append(algebra.norm(step))
        if _cauchy(residuals, tol.eps_eq, window):
            break
        if _diverging(residuals):
            verdict = "diverged"
            break

    limit = None
    limit_residuals: dict[str, float] = {}
    fixed_point = None
    if verdict != "diverged" and _cauchy(residuals, tol.eps_eq, window):
        tail = iterates[-(window + 1):]
        limit, limit_residuals, fixed = _limit_check(space, tail, {"T": T, "S": S}, tol)
        verdict = "converged-fixed-point" if fixed else "converged-not-fixed"
        fixed_point = limit if fixed else None

    bounds = [apriori_bound(q_norm, delta_norm, n, scn.form) for n in range(len(iterates))]
    return IterationTrace(iterates, steps, residuals, bounds, verdict, fixed_point,
                          (q_norm, delta_norm), limit, limit_residuals)


def composed_common_solve(scn: MappingScenario, x0: float, max_iter: int = DEFAULT_MAX_ITER,
                          tol: Tolerance | None = None, window: int = CAUCHY_WINDOW) -> IterationTrace:
    """Solve the pair ``(T, S o T)``, then confirm ``Tz = z`` and ``Sz = z`` separately."""
    if scn.S is None:
        raise ScenarioError("composed_common_solve needs a second map S")
    T, S = scn.T, scn.S
    tol = tol or scn.space.tol

    def ST(x):
        return S(T(x))

    trace = common_solve(replace(scn, S=ST), x0, max_iter, tol, window)
    if trace.limit is None or not trace.limit_residuals or any(math.isnan(v) for v in trace.limit_residuals.values()):
        return trace
    z = trace.limit
    space = scn.space
    residuals = {"T": space.dnorm(T(z), z), "ST": space.dnorm(ST(z), z), "S": space.dnorm(S(z), z)}
    fixed = residuals["T"] <= tol.eps_eq and residuals["S"] <= tol.eps_eq
    return replace(trace, limit_residuals=residuals,
                   verdict="converged-fixed-point" if fixed else "converged-not-fixed",
                   fixed_point=z if fixed else None)


def _orbit(space: MetricSpace, fn: Map, x: float, length: int) -> list[float]:
    seq = [x]
    for _ in range(length):
        nxt = fn(seq[-1])
        if nxt == seq[-1]:
            seq.extend([nxt] * (length + 1 - len(seq)))
            break
        seq.append(nxt)
    return seq


def _subsequence_families(length: int) -> dict[str, list[int]]:
    """Index families used in place of "every subsequence": all, evens, odds, squares."""
    return {
        "all": list(range(length)),
        "evens": list(range(0, length, 2)),
        "odds": list(range(1, length, 2)),
        "squares": [k * k for k in range(int(math.isqrt(length - 1)) + 1)],
    }


def check_orbital_continuity(scn: MappingScenario, which: str = "T", starts: Sequence[float] = (),
                             max_iter: int = 200, tol: Tolerance | None = None) -> Certificate:
    """Semi-decide orbital continuity of ``T`` (or ``S``) from the given starts.

    For each start and each index family ``n_i`` whose subsequence
    ``f^{n_i} x`` has a (snapped) limit ``u``, the image subsequence
    ``f^{n_i + 1} x`` must converge to ``f(u)``. The witness is
    ``(x, u, image_limit, f(u))``; ``image_limit`` is ``None`` when the images
    do not settle.
    """
    fn = scn.T if which == "T" else scn.S
    if fn is None:
        raise ScenarioError(f"scenario has no map {which}")
    space = scn.space
    tol = tol or space.tol
    worst = 0.0
    witness = None
    details: dict = {"map": which, "checked": []}
    for x in starts:
        space.require(x)
        orbit = _orbit(space, fn, x, max_iter)
        for family, idx in _subsequence_families(len(orbit) - 1).items():
            if len(idx) < 2:
                continue
            u = sequence_limit(space, [orbit[i] for i in idx], tol)
            if u is None:
                continue
            fu = fn(u)
            w = sequence_limit(space, [orbit[i + 1] for i in idx], tol)
            gap = space.dnorm(w, fu) if w is not None else math.inf
            details["checked"].append([x, family, u])
            if gap > tol.eps_eq:
                m = threshold_margin(gap, tol.eps_eq, tol.eps_pos) if math.isfinite(gap) else -1.0
                worst = min(worst, m)
                if witness is None:
                    witness = (x, u, w, fu)
                    details["family"] = family
    return Certificate("orbital-continuity", witness is None, worst, witness,
                       sample_size=len(starts), max_power=max_iter, details=details)


def uniqueness_probe(scn: MappingScenario, starts: Sequence[float], max_iter: int = DEFAULT_MAX_ITER,
                     tol: Tolerance | None = None) -> Certificate:
    """Solve from every start (common solve when ``S`` is present) and compare limits.

    Passes iff at least one start reaches a fixed point and all fixed points
    found agree within ``eps_eq``. The witness is a pair of starts whose
    fixed points differ.
    """
    if len(starts) < 2:
        raise ValueError("uniqueness_probe needs at least two starts")
    space = scn.space
    tol = tol or space.tol
    solve = common_solve if scn.S is not None else picard_solve
    found = []
    verdicts = {}
    for x in starts:
        trace = solve(scn, x, max_iter, tol)
        verdicts[repr(x)] = trace.verdict
        if trace.fixed_point is not None:
            found.append((x, trace.fixed_point))
    details = {"verdicts": verdicts, "fixed_points": [[x, z] for x, z in found]}
    if not found:
        return Certificate("uniqueness", False, -1.0, (starts[0], None), sample_size=len(starts),
                           max_power=max_iter, details=details)
    worst = 0.0
    witness = None
    x_ref, z_ref = found[0]
    for x, z in found[1:]:
        gap = space.dnorm(z, z_ref)
        m = threshold_margin(gap, tol.eps_eq, tol.eps_pos)
        worst = min(worst, m)
        if witness is None and gap > tol.eps_eq:
            witness = (x_ref, x)
    details["limit"] = z_ref
    return Certificate("uniqueness", witness is None, worst, witness, sample_size=len(starts),
                       max_power=max_iter, details=details)
