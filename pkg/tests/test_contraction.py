import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cstarfix import builtins
from cstarfix.algebra import Algebra
from cstarfix.certificate import Certificate, threshold_margin
from cstarfix.contraction import (MappingScenario, certify_ciric1, certify_ciric2, certify_common, certify_eq1,
                                  certify_kannan, constant, eq1_as_ciric1, kannan_as_ciric2, squared_gauge)
from cstarfix.errors import AlgebraError, ContractionError, ScenarioError
from cstarfix.space import MetricSpace, PointDomain

R5 = 1 / math.sqrt(5.0)


def ex34(step=0.05, delta=None, q=None):
    alg = Algebra(2, norm_mode="max-entry", order_mode="entrywise")
    space = MetricSpace(PointDomain.interval(0, 1, step=step), builtins.usual(2), alg)
    return MappingScenario(space, lambda x: x / 5, constant(R5 * np.eye(2) if q is None else q),
                           delta or (lambda x, y: (x + y) * np.eye(2)))


def real_line(domain=None):
    return MetricSpace(domain or PointDomain.interval(0, 1, step=0.05), builtins.usual(1))


def scalar_scn(T, q, delta, S=None, domain=None, N=10):
    return MappingScenario(real_line(domain), T, constant(q), delta, S=S, max_power=N)


# -- certificate record ----------------------------------------------------

def test_certificate_witness_invariant():
    with pytest.raises(ValueError):
        Certificate("ciric-type1", True, 0.0, witness=(0, 0, 1))
    with pytest.raises(ValueError):
        Certificate("ciric-type1", False, -1.0)
    with pytest.raises(ValueError):
        Certificate("bogus", True, 0.0)


@pytest.mark.parametrize("value,threshold", [(0.0, 0.0), (1e-11, 1e-10), (2e-10, 1e-10), (0.5, 0.0), (3.0, 1.0)])
def test_threshold_margin_sign(value, threshold):
    eps = 1e-10
    assert (threshold_margin(value, threshold, eps) >= -eps) == (value <= threshold)


# -- eq1 -------------------------------------------------------------------

def test_eq1_example_3_4_equality_case():
    c = certify_eq1(ex34(), R5 * np.eye(2))
    assert c.passed and c.worst_margin >= -1e-12 and c.max_power == 1


def test_eq1_example_3_5_fails_near_one():
    scn = scalar_scn(builtins.jump_at_one, 1 / math.sqrt(2), lambda x, y: x + y)
    c = certify_eq1(scn, 0.99, sample=[(0.999, 1.0)])
    assert not c.passed and c.witness == (0.999, 1.0, 1)


def test_eq1_constant_map_zero_gauge():
    scn = scalar_scn(lambda x: 0.3, 0.5, lambda x, y: 1.0)
    assert certify_eq1(scn, 0.0).passed


def test_eq1_gauge_norm_error():
    with pytest.raises(ContractionError):
        certify_eq1(ex34(), np.eye(2))


# -- type1 -----------------------------------------------------------------

def test_ciric1_example_3_4():
    c = certify_ciric1(ex34(step=0.1))
    assert c.passed and c.sample_size == 121 and c.max_power == 10


def test_ciric1_example_3_5():
    scn = scalar_scn(builtins.jump_at_one, 1 / math.sqrt(2), lambda x, y: x + y)
    assert certify_ciric1(scn).passed


def test_ciric1_zero_delta_witness():
    scn = ex34(step=0.1, delta=lambda x, y: np.zeros((2, 2)))
    c = certify_ciric1(scn, sample=[(1.0, 0.0)])
    assert not c.passed and c.witness == (1.0, 0.0, 1)


def test_ciric1_rejects_large_gauge():
    with pytest.raises(ContractionError):
        certify_ciric1(scalar_scn(lambda x: x / 2, 1.0, lambda x, y: 1.0))


def test_scenario_rejects_map_leaving_domain():
    with pytest.raises(ScenarioError):
        certify_ciric1(scalar_scn(lambda x: x + 2, 0.5, lambda x, y: 1.0))


def test_scenario_rejects_non_positive_delta():
    with pytest.raises(ScenarioError):
        certify_ciric1(scalar_scn(lambda x: x / 2, 0.5, lambda x, y: -1.0))


def test_ciric1_non_diagonalizable_gauge():
    # q = [[0, 1/2], [0, 0]] is nilpotent; powers vanish from n = 2 on
    q = np.array([[0.0, 0.5], [0.0, 0.0]])
    space = MetricSpace(PointDomain.finite([0.0, 1.0]), builtins.usual(2), Algebra(2))
    scn = MappingScenario(space, lambda x: 0.0, constant(q), lambda x, y: np.eye(2))
    assert certify_ciric1(scn).passed


# -- type2 -----------------------------------------------------------------

def test_ciric2_example_3_10_scalar_gauge():
    scn = scalar_scn(lambda x: x / 3, 1 / 3, lambda x, y: 1 + x + y)
    assert certify_ciric2(scn).passed


def test_ciric2_zero_gauge_constant_map():
    assert certify_ciric2(scalar_scn(lambda x: 0.5, 0.0, lambda x, y: 1.0)).passed


def test_ciric2_non_central_error():
    with pytest.raises(ContractionError, match="central"):
        certify_ciric2(ex34(q=np.diag([0.5, 1 / 3])))


# -- kannan ----------------------------------------------------------------

def test_kannan_quarter_map():
    c = certify_kannan(real_line(), lambda x: x / 4, 1 / 3)
    assert c.passed
    assert c.derived_gauge[0, 0] == pytest.approx(0.5)


def test_kannan_constant_map():
    assert certify_kannan(real_line(), lambda x: 0.2, 0.25).passed


def test_kannan_identity_fails():
    c = certify_kannan(real_line(PointDomain.finite([0.0, 1.0])), lambda x: x, 1 / 3)
    assert not c.passed and c.witness == (0.0, 1.0, 1)
    assert c.derived_gauge is None


def test_kannan_preconditions():
    with pytest.raises(AlgebraError):
        certify_kannan(real_line(), lambda x: x / 4, 0.5)
    space = MetricSpace(PointDomain.interval(0, 1), builtins.usual(2), Algebra(2))
    with pytest.raises(ContractionError):
        certify_kannan(space, lambda x: x / 4, np.diag([0.1, 0.2]))


# -- common ----------------------------------------------------------------

def test_common_example_3_17():
    scn = scalar_scn(lambda x: x / 2, 1 / math.sqrt(2), lambda x, y: 1 + x + y, S=lambda x: x / 4)
    assert certify_common(scn).passed


def test_common_example_3_19():
    scn = scalar_scn(builtins.halve_fixing_zero, 1 / math.sqrt(2), lambda x, y: 1 + x + y,
                     S=builtins.halve_or_kick, domain=PointDomain.dyadic(40))
    assert certify_common(scn).passed


def test_common_constant_maps():
    scn = scalar_scn(lambda x: 0.4, 0.0, lambda x, y: 1.0, S=lambda x: 0.4)
    assert certify_common(scn, form="type1").passed
    assert certify_common(scn, form="type2").passed


def test_common_requires_S():
    with pytest.raises(ScenarioError):
        certify_common(scalar_scn(lambda x: x, 0.5, lambda x, y: 1.0))


# -- properties ------------------------------------------------------------

def _failing_scenario(N):
    # T = x/2 with a gauge that decays faster than the map: fails from some depth on
    return scalar_scn(lambda x: x / 2, 0.6, lambda x, y: abs(x - y), N=N,
                      domain=PointDomain.interval(0, 1, step=0.5))


def test_monotone_in_depth():
    first = None
    for N in range(1, 8):
        c = certify_ciric1(_failing_scenario(N))
        if first is not None:
            assert not c.passed
            assert c.witness[2] <= first.witness[2]
        elif not c.passed:
            first = c
    assert first is not None


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 0.95), st.floats(0.0, 5.0), st.floats(0.05, 0.95))
def test_property_adding_positive_to_delta_keeps_pass(q, p, c):
    base = scalar_scn(lambda x: c * x, q, lambda x, y: 1 + x + y, N=5, domain=PointDomain.interval(0, 1, step=0.25))
    wider = scalar_scn(lambda x: c * x, q, lambda x, y: 1 + x + y + p, N=5,
                       domain=PointDomain.interval(0, 1, step=0.25))
    if certify_ciric1(base).passed:
        assert certify_ciric1(wider).passed


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 0.95), st.floats(-0.99, 0.99), st.floats(0.0, 2.0))
def test_property_abelian_equivalence(q, c, shift):
    scn = scalar_scn(lambda x: c * x, q, lambda x, y: shift + abs(x - y), N=6,
                     domain=PointDomain.interval(-1, 1, step=0.25))
    one, two = certify_ciric1(scn), certify_ciric2(squared_gauge(scn))
    assert one.passed == two.passed
    assert one.worst_margin == pytest.approx(two.worst_margin, abs=1e-12)


def test_eq1_translation_passes_type1():
    scn = ex34()
    a = R5 * np.eye(2)
    assert certify_eq1(scn, a).passed
    assert certify_ciric1(eq1_as_ciric1(scn, a)).passed


def test_kannan_translation_passes_type2():
    space = real_line()
    T = lambda x: x / 4  # noqa: E731
    c = certify_kannan(space, T, 1 / 3)
    assert certify_ciric2(kannan_as_ciric2(space, T, c.derived_gauge)).passed
