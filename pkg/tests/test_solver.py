import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cstarfix import builtins
from cstarfix.algebra import Algebra
from cstarfix.contraction import MappingScenario, certify_ciric1, certify_eq1, certify_kannan, constant, kannan_as_ciric2
from cstarfix.errors import DomainError, ScenarioError
from cstarfix.solver import (apriori_bound, check_orbital_continuity, common_solve, composed_common_solve,
                             picard_solve, uniqueness_probe)
from cstarfix.space import MetricSpace, PointDomain


def scn(T, q=0.5, delta=lambda x, y: 1 + x + y, S=None, domain=None, form="type1"):
    space = MetricSpace(domain or PointDomain.interval(0, 1), builtins.usual(1), Algebra())
    return MappingScenario(space, T, constant(q), delta, S=S, form=form)


EX310 = dict(T=lambda x: x / 3, q=1 / math.sqrt(3))
DYADIC = PointDomain.dyadic(40)


def test_apriori_bound_forms():
    assert apriori_bound(0.5, 2.0, 3, "type1") == pytest.approx(0.5**6 / 0.75 * 2)
    assert apriori_bound(0.5, 2.0, 3, "type2") == pytest.approx(0.5**3 / 0.5 * 2)
    assert apriori_bound(1.0, 2.0, 3) == math.inf


# -- picard ----------------------------------------------------------------

def test_picard_example_3_10():
    t = picard_solve(scn(**EX310), 1.0)
    assert t.verdict == "converged-fixed-point"
    assert abs(t.fixed_point) <= 1e-10
    assert t.bound_constants == pytest.approx((1 / math.sqrt(3), 7 / 3))


def test_picard_example_3_11():
    t = picard_solve(scn(builtins.halve_or_kick, 1 / math.sqrt(2), domain=DYADIC), 0.0)
    assert t.verdict == "converged-not-fixed"
    assert t.fixed_point is None and t.limit == 0.0
    assert t.limit_residuals["T"] == pytest.approx(0.5, abs=1e-12)


def test_picard_constant_map_one_step():
    t = picard_solve(scn(lambda x: 0.7), 0.2)
    assert t.verdict == "converged-fixed-point" and t.fixed_point == 0.7
    assert t.iterates == [0.2, 0.7, 0.7]


def test_picard_rejects_start_outside():
    with pytest.raises(DomainError):
        picard_solve(scn(lambda x: x / 2), 3.0)


def test_picard_max_iter_and_divergence():
    slow = picard_solve(scn(lambda x: 0.999 * x), 1.0, max_iter=20)
    assert slow.verdict == "max-iter"
    space = MetricSpace(PointDomain.interval(-1e300, 1e300), builtins.usual(1))
    grow = picard_solve(MappingScenario(space, lambda x: 3 * x + 1, constant(0.5), lambda x, y: 1.0), 0.0)
    assert grow.verdict == "diverged"


def test_trace_shapes_and_rows():
    t = picard_solve(scn(**EX310), 1.0)
    assert len(t.residual_norms) == len(t.step_distances) == len(t.iterates) - 1
    for d, r in zip(t.step_distances, t.residual_norms):
        assert r == pytest.approx(abs(d[0, 0]))
    assert all(a >= b for a, b in zip(t.apriori_bounds, t.apriori_bounds[1:]))
    rows = t.rows()
    assert rows[0][0] == 0 and rows[-1][2] is None
    d = t.to_dict()
    assert d["verdict"] == t.verdict and d["bound_constants"]["q_norm"] == t.bound_constants[0]


def test_rerun_from_fixed_point_is_immediate():
    t = picard_solve(scn(**EX310), 1.0)
    again = picard_solve(scn(**EX310), t.fixed_point)
    assert again.verdict == "converged-fixed-point"
    assert again.fixed_point == pytest.approx(t.fixed_point, abs=1e-10)


def test_bound_validity_example_3_10():
    s = scn(**EX310)
    assert certify_ciric1(s).passed
    t = picard_solve(s, 1.0)
    xs = t.iterates
    for n in range(len(xs)):
        for m in range(n + 1, len(xs)):
            assert abs(xs[n] - xs[m]) <= t.apriori_bounds[n] + 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(-1, 1))
def test_property_eq1_residuals_non_increasing(c, x0):
    s = scn(lambda x: c * x, domain=PointDomain.interval(-1, 1, step=0.25))
    a = math.sqrt(abs(c)) if abs(c) > 0 else 0.0
    if certify_eq1(s, a).passed:
        r = picard_solve(s, x0).residual_norms
        assert all(r2 <= r1 + 1e-10 for r1, r2 in zip(r, r[1:]))


def test_kannan_pipeline_bounds_dominate():
    space = MetricSpace(PointDomain.interval(0, 1), builtins.usual(1))
    T = lambda x: x / 4  # noqa: E731
    c = certify_kannan(space, T, 1 / 3)
    s2 = kannan_as_ciric2(space, T, c.derived_gauge)
    t = picard_solve(s2, 1.0)
    assert t.verdict == "converged-fixed-point"
    xs = t.iterates
    for n in range(len(xs)):
        assert max(abs(xs[n] - xs[m]) for m in range(n, len(xs))) <= t.apriori_bounds[n] + 1e-10


# -- common ----------------------------------------------------------------

def test_common_example_3_17():
    t = common_solve(scn(lambda x: x / 2, 1 / math.sqrt(2), S=lambda x: x / 4), 1.0)
    assert t.verdict == "converged-fixed-point" and abs(t.fixed_point) <= 1e-10
    assert all(v <= 1e-10 for v in t.limit_residuals.values())


def test_common_sequence_uses_single_map_powers():
    t = common_solve(scn(lambda x: x / 2, S=lambda x: x / 4), 1.0, max_iter=4)
    assert t.iterates == [1.0, 0.25, 0.25, 1 / 64, 1 / 16]


def test_common_example_3_19():
    t = common_solve(scn(builtins.halve_fixing_zero, 1 / math.sqrt(2), S=builtins.halve_or_kick, domain=DYADIC), 0.0)
    assert t.verdict == "converged-not-fixed"
    assert t.limit == 0.0
    assert t.limit_residuals["S"] == pytest.approx(0.5, abs=1e-12)
    assert t.limit_residuals["T"] == 0.0


def test_common_same_map_matches_picard():
    s = scn(lambda x: x / 3, S=lambda x: x / 3)
    assert common_solve(s, 1.0).fixed_point == pytest.approx(picard_solve(s, 1.0).fixed_point, abs=1e-10)


def test_common_requires_S():
    with pytest.raises(ScenarioError):
        common_solve(scn(lambda x: x), 0.0)


def test_composed_linear_pair():
    t = composed_common_solve(scn(lambda x: x / 2, S=lambda x: x / 3), 1.0)
    assert t.verdict == "converged-fixed-point" and abs(t.fixed_point) <= 1e-10
    assert set(t.limit_residuals) == {"T", "ST", "S"}


def test_composed_constant_pair():
    t = composed_common_solve(scn(lambda x: 0.3, S=lambda x: 0.3), 1.0)
    assert t.fixed_point == pytest.approx(0.3)


def test_composed_identity_pair_not_unique():
    two = PointDomain.finite([0.0, 1.0])
    s = scn(lambda x: x, S=lambda x: x, domain=two)
    assert composed_common_solve(s, 1.0).fixed_point == 1.0
    assert not uniqueness_probe(s, [0.0, 1.0]).passed


# -- orbital continuity ----------------------------------------------------

def test_orbital_example_3_10():
    assert check_orbital_continuity(scn(**EX310), "T", [1.0, 0.5, 0.25]).passed


def test_orbital_example_3_11():
    c = check_orbital_continuity(scn(builtins.halve_or_kick, domain=DYADIC), "T", [0.0])
    assert not c.passed
    x, u, images, tu = c.witness
    assert (x, u, images, tu) == (0.0, 0.0, 0.0, 0.5)


def test_orbital_example_3_5():
    assert check_orbital_continuity(scn(builtins.jump_at_one), "T", [1.0, 0.9, 0.0]).passed


def test_orbital_missing_map():
    with pytest.raises(ScenarioError):
        check_orbital_continuity(scn(lambda x: x), "S", [0.0])


# -- uniqueness ------------------------------------------------------------

def test_uniqueness_examples():
    c = uniqueness_probe(scn(**EX310), [0.0, 0.3, 1.0])
    assert c.passed and c.details["limit"] == pytest.approx(0.0, abs=1e-10)
    open_iv = PointDomain.interval(-1, 1, lo_closed=False, hi_closed=False)
    assert uniqueness_probe(scn(lambda x: x / 2, domain=open_iv, delta=lambda x, y: 4 + x + y), [-0.9, 0.9]).passed
    ident = uniqueness_probe(scn(lambda x: x, domain=PointDomain.finite([0.0, 1.0])), [0.0, 1.0])
    assert not ident.passed and ident.witness == (0.0, 1.0)


def test_uniqueness_without_fixed_point_fails():
    c = uniqueness_probe(scn(builtins.halve_or_kick, domain=DYADIC), [0.0, 0.5])
    assert not c.passed and c.witness == (0.0, None)


def test_uniqueness_needs_two_starts():
    with pytest.raises(ValueError):
        uniqueness_probe(scn(lambda x: x), [0.0])
