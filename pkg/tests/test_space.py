import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cstarfix import builtins
from cstarfix.algebra import Algebra
from cstarfix.errors import DomainError
from cstarfix.space import (MetricSpace, PointDomain, cartesian_pairs, check_metric_axioms, probe_continuity,
                            sequence_limit)


def line(domain, dim=1, **kw):
    return MetricSpace(domain, builtins.usual(dim), Algebra(dim, **kw))


# -- domains ---------------------------------------------------------------

def test_interval_members_grid():
    pts = PointDomain.interval(0, 1, step=0.05).members()
    assert len(pts) == 21 and pts[0] == 0.0 and pts[-1] == 1.0
    assert pts[10] == 0.5


def test_open_interval_drops_ends():
    pts = PointDomain.interval(-1, 1, lo_closed=False, hi_closed=False, step=0.5).members()
    assert pts == (-0.5, 0.0, 0.5)


def test_dyadic_members():
    pts = PointDomain.dyadic(3).members()
    assert pts == (0.0, 0.125, 0.25, 0.5)


@pytest.mark.parametrize("make", [
    lambda: PointDomain.interval(1, 0),
    lambda: PointDomain.finite([]),
    lambda: PointDomain.finite([0.0, 0.0]),
    lambda: PointDomain.finite([float("nan")]),
    lambda: PointDomain.dyadic(0),
    lambda: PointDomain("circle"),
])
def test_domain_invariants(make):
    with pytest.raises(DomainError):
        make()


def test_contains_and_snap():
    dy = PointDomain.dyadic(10)
    assert dy.contains(0.25) and not dy.contains(0.3)
    assert dy.snap(1e-9) == 0.0
    iv = PointDomain.interval(0, 1, hi_closed=False)
    assert iv.contains(0.999) and not iv.contains(1.0)
    assert iv.snap(0.123) == 0.123


# -- axioms ----------------------------------------------------------------

def test_axioms_example_3_4_metric():
    space = line(PointDomain.interval(0, 1, step=0.05), dim=2, norm_mode="max-entry", order_mode="entrywise")
    c = check_metric_axioms(space)
    assert c.passed and c.sample_size == 21


def test_axioms_signed_difference_fails_positivity():
    space = MetricSpace(PointDomain.finite([0, 1]), lambda x, y: np.diag([x - y, x - y]), Algebra(2))
    c = check_metric_axioms(space)
    assert not c.passed
    assert c.witness == (0.0, 1.0, None)
    assert c.details["violation"] == "positivity"


def test_axioms_example_2_2_metric():
    space = MetricSpace(PointDomain.finite([-1, 0, 1]), builtins.weighted_diagonal(2.0),
                        Algebra(2, norm_mode="max-entry", order_mode="entrywise"))
    assert check_metric_axioms(space).passed


def test_axioms_triangle_failure_squared_distance():
    space = MetricSpace(PointDomain.finite([0, 1, 2]), lambda x, y: (x - y) ** 2)
    c = check_metric_axioms(space)
    assert not c.passed and c.details["violation"] == "triangle"
    assert c.witness == (0.0, 2.0, 1.0)


def test_axioms_identity_and_symmetry_failures():
    nonzero_diag = MetricSpace(PointDomain.finite([0, 1]), lambda x, y: abs(x - y) + 1)
    assert check_metric_axioms(nonzero_diag).details["violation"] == "identity"
    lopsided = MetricSpace(PointDomain.finite([0, 1]), lambda x, y: abs(x - y) * (2 if x < y else 1))
    assert check_metric_axioms(lopsided).details["violation"] == "symmetry"
    collapsed = MetricSpace(PointDomain.finite([0, 1]), lambda x, y: 0.0)
    assert check_metric_axioms(collapsed).details["violation"] == "indiscernibles"


def test_axioms_scalar_and_matrix_paths_agree():
    metric = lambda x, y: (x - y) ** 2  # noqa: E731
    pts = [0.0, 0.5, 1.0, 2.0]
    scalar = check_metric_axioms(MetricSpace(PointDomain.finite(pts), metric, Algebra(1)))
    wide = check_metric_axioms(MetricSpace(PointDomain.finite(pts), lambda x, y: metric(x, y) * np.eye(2),
                                           Algebra(2)))
    assert scalar.witness == wide.witness
    assert scalar.worst_margin == pytest.approx(wide.worst_margin, abs=1e-12)


def test_axioms_rejects_points_outside_domain():
    with pytest.raises(DomainError):
        check_metric_axioms(line(PointDomain.interval(0, 1)), sample=[2.0])


def test_axioms_empty_sample():
    with pytest.raises(ValueError):
        check_metric_axioms(line(PointDomain.interval(0, 1)), sample=[])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=4, unique=True))
def test_property_swapped_witness_reproduces_violation(pts):
    space = MetricSpace(PointDomain.finite(pts), lambda x, y: x - y)
    c = check_metric_axioms(space)
    if c.passed:
        return
    x, y, _ = c.witness
    swapped = check_metric_axioms(space, sample=[y, x])
    assert not swapped.passed


# -- sequence limits -------------------------------------------------------

def test_sequence_limit_examples():
    space = line(PointDomain.interval(0, 1))
    assert sequence_limit(space, [0.3] * 6) == 0.3
    assert sequence_limit(space, [0.0, 1.0] * 5) is None
    dy = line(PointDomain.dyadic(30))
    assert sequence_limit(dy, [2.0**-n for n in range(1, 60)]) == 0.0


def test_sequence_limit_needs_two_terms():
    with pytest.raises(ValueError):
        sequence_limit(line(PointDomain.interval(0, 1)), [0.0])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 0.9), st.integers(30, 80))
def test_property_limit_stable_under_appending(r, n):
    space = line(PointDomain.interval(0, 1))
    seq = [r**k for k in range(n)]
    z = sequence_limit(space, seq)
    if z is not None:
        assert sequence_limit(space, seq + [z]) == pytest.approx(z, abs=1e-10)


# -- continuity ------------------------------------------------------------

def test_probe_linear_map_modulus():
    space = line(PointDomain.interval(0, 1, step=0.05))
    c = probe_continuity(space, lambda x: x / 5, 0.5, space.domain.members())
    assert c.passed
    assert c.details["modulus"] == pytest.approx(0.2)


def test_probe_detects_jump():
    space = line(PointDomain.interval(0, 1))
    probes = [1 - 10.0**-k for k in range(1, 9)]
    c = probe_continuity(space, builtins.jump_at_one, 1.0, probes)
    assert not c.passed
    assert c.witness[1] == 1.0 and c.witness[2] == pytest.approx(0.5)


def test_probe_identity_anywhere():
    space = line(PointDomain.interval(0, 1))
    for at in (0.0, 0.3, 1.0):
        assert probe_continuity(space, lambda x: x, at, space.domain.members()).passed


def test_cartesian_pairs_includes_diagonal():
    assert cartesian_pairs([0, 1]) == [(0, 0), (0, 1), (1, 0), (1, 1)]
