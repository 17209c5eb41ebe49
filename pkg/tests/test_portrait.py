"""Symbolic portraits: validation, arc partitions, component numbers, and
certificate construction, including exact-rational angle handling."""

import random
from fractions import Fraction

import pytest

from polybasin.errors import GenericityViolation, OnBoundary
from polybasin.invariant import ComponentNumber
from polybasin.portrait import (
    CriticalPortrait,
    CriticalSpec,
    arc_partition,
    build_certificate,
    component_number,
    locate_in_partition,
    portrait_from_json,
    portrait_to_json,
    portrait_validate,
)

F = Fraction


def quadratic_portrait():
    return CriticalPortrait(
        2, 0.0, (CriticalSpec(2, 0, 0.0, (0.0, 0.5)),))


def two_critical_cubic_portrait(theta2=0.05, t2_frac=0.4, n2=1):
    """Degree 3, base angle 0: first critical with co-angles {0, 1/3}, second
    at timeline n2 + t2_frac with co-angles {theta2, theta2 + 1/3}."""
    return CriticalPortrait(
        3, F(0), (
            CriticalSpec(2, 0, F(0), (F(0), F(1, 3))),
            CriticalSpec(2, n2, t2_frac, (theta2, theta2 + F(1, 3))),
        ))


# -- validation ----------------------------------------------------------------

def test_validate_quadratic_model():
    assert portrait_validate(quadratic_portrait()).ok


def test_validate_duplicate_fiber():
    P = CriticalPortrait(3, 0.0, (
        CriticalSpec(2, 0, 0.0, (0.0, F(1, 3))),
        CriticalSpec(2, 0, 0.0, (F(1, 6), F(1, 2))),
    ))
    rep = portrait_validate(P)
    assert any("genericity" in v for v in rep.violations)


def test_validate_bad_spacing():
    P = CriticalPortrait(2, 0.0, (CriticalSpec(2, 0, 0.0, (0.0, F(1, 3))),))
    rep = portrait_validate(P)
    assert any("spacing" in v for v in rep.violations)


def test_validate_first_critical_normalization():
    P = CriticalPortrait(2, 0.0, (CriticalSpec(2, 0, 0.25, (0.0, 0.5)),))
    rep = portrait_validate(P)
    assert any("first critical" in v for v in rep.violations)


def test_validate_branching_bound():
    P = CriticalPortrait(2, 0.0, (
        CriticalSpec(2, 0, 0.0, (0.0, 0.5)),
        CriticalSpec(2, 1, 0.5, (0.25, 0.75)),
    ))
    rep = portrait_validate(P)
    assert any("branching" in v for v in rep.violations)


def test_validate_base_angle_consistency():
    P = CriticalPortrait(2, 0.25, (CriticalSpec(2, 0, 0.0, (0.0, 0.5)),))
    rep = portrait_validate(P)
    assert any("base" in v for v in rep.violations)


# -- arc partitions --------------------------------------------------------------

def test_arcs_ccw_entry_and_order():
    spec = CriticalSpec(2, 0, 0.0, (F(1, 6), F(2, 3)))
    part = arc_partition(spec, F(0), "ccw")
    assert part.entry == F(1, 6)
    assert part.arcs == ((F(1, 6), F(2, 3)), (F(2, 3), F(1, 6)))


def test_arcs_cw_entry_mirrors():
    spec = CriticalSpec(2, 0, 0.0, (F(1, 6), F(2, 3)))
    part = arc_partition(spec, F(0), "cw")
    assert part.entry == F(2, 3)
    assert part.arcs == ((F(2, 3), F(1, 6)), (F(1, 6), F(2, 3)))


def test_arcs_three_branches():
    spec = CriticalSpec(3, 0, 0.0, (F(0), F(1, 3), F(2, 3)))
    part = arc_partition(spec, F(0), "ccw")
    assert part.entry == F(0)
    assert part.arcs == ((F(0), F(1, 3)), (F(1, 3), F(2, 3)), (F(2, 3), F(0)))


def test_locate_basic():
    spec = CriticalSpec(2, 0, 0.0, (F(0), F(1, 2)))
    part = arc_partition(spec, F(0), "ccw")
    assert locate_in_partition(part, F(1, 4)) == 1
    assert locate_in_partition(part, F(3, 4)) == 2


def test_locate_float_boundary():
    spec = CriticalSpec(2, 0, 0.0, (0.0, 0.5))
    part = arc_partition(spec, 0.0, "ccw")
    with pytest.raises(OnBoundary):
        locate_in_partition(part, 0.5)
    with pytest.raises(OnBoundary):
        locate_in_partition(part, 0.5 + 1e-8)


def test_locate_exact_boundary_attaches_to_starting_arc():
    spec = CriticalSpec(2, 0, 0.0, (F(0), F(1, 2)))
    part = arc_partition(spec, F(0), "ccw")
    assert locate_in_partition(part, F(1, 2)) == 2
    assert locate_in_partition(part, F(0)) == 1


# -- component numbers ------------------------------------------------------------

def test_first_critical_number_is_one():
    P = two_critical_cubic_portrait()
    for orientation in ("ccw", "cw"):
        assert component_number(P, 0, orientation) == ComponentNumber((1,))


def test_second_critical_ccw_entry():
    """theta2 = 0.05, s = ceil(1.4) = 2: the query angle is 9 * 0.05 = 0.45,
    inside the wrap arc (1/3, 1) of the first critical: entry 2."""
    P = two_critical_cubic_portrait(theta2=0.05)
    assert component_number(P, 1, "ccw") == ComponentNumber((2, 1))


def test_second_critical_cw_entry():
    """Walking clockwise from the entry co-angle 0, the first arc runs from 0
    back to 1/3 and contains 0.45: entry 1."""
    P = two_critical_cubic_portrait(theta2=0.05)
    assert component_number(P, 1, "cw") == ComponentNumber((1, 1))


def test_component_number_short_arc():
    """A query angle inside (0, 1/3) gets ccw entry 1."""
    P = two_critical_cubic_portrait(theta2=F(1, 90))  # 9 * 1/90 = 1/10
    assert component_number(P, 1, "ccw") == ComponentNumber((1, 1))
    assert component_number(P, 1, "cw") == ComponentNumber((2, 1))


def test_genericity_violation_raises():
    P = CriticalPortrait(3, F(0), (
        CriticalSpec(2, 0, F(0), (F(0), F(1, 3))),
        CriticalSpec(2, 0, 1e-12, (F(1, 6), F(1, 2))),
    ))
    with pytest.raises(GenericityViolation):
        build_certificate(P)


# -- certificates -----------------------------------------------------------------

def test_empty_portrait_certificate():
    cert = build_certificate(CriticalPortrait(2, 0.0, ()))
    assert cert.degree == 2
    assert len(cert.graph) == 0


def test_quadratic_certificate_forced():
    cert = build_certificate(quadratic_portrait())
    assert len(cert.graph) == 1
    pt = cert.graph.points[0]
    assert pt.position == 0.0
    assert pt.label.d == 2 and pt.label.n == 0
    assert pt.label.pair == (ComponentNumber((1,)), ComponentNumber((1,)))


def test_two_critical_certificate():
    P = two_critical_cubic_portrait(theta2=0.05)
    cert = build_certificate(P)
    assert cert.degree == 3
    assert len(cert.graph) == 2
    second = cert.graph.points[1]
    assert abs(second.position - 0.4) < 1e-12
    assert second.label.d == 2 and second.label.n == 1
    assert second.label.pair == (ComponentNumber((1, 1)), ComponentNumber((2, 1)))


def test_orientation_flip_is_bit_identical():
    from polybasin.invariant import certificate_to_json
    P = two_critical_cubic_portrait(theta2=0.05)
    assert (certificate_to_json(build_certificate(P, "ccw"))
            == certificate_to_json(build_certificate(P, "cw")))


def test_single_critical_certificate_forced_by_degree_pair():
    """Whatever the angles, one critical point always yields the anchor-only
    graph determined by (m, d)."""
    rng = random.Random(5)
    for _ in range(50):
        m = rng.choice((2, 3, 4, 5))
        d = rng.randrange(2, m + 1)
        base = rng.random()
        image = base
        cos = sorted((image + k) / m % 1.0 for k in range(d))
        P = CriticalPortrait(m, base, (CriticalSpec(d, 0, 0.0, tuple(cos)),))
        rep = portrait_validate(P)
        assert rep.ok, rep
        cert = build_certificate(P)
        assert len(cert.graph) == 1
        pt = cert.graph.points[0]
        assert (pt.label.d, pt.label.n) == (d, 0)
        assert pt.label.pair == (ComponentNumber((1,)), ComponentNumber((1,)))


def test_angle_jitter_stability():
    """Perturbing every angle by a common delta below the comparison
    tolerance leaves the certificate bit-identical."""
    from polybasin.invariant import certificate_to_json
    delta = 2e-7
    base = build_certificate(CriticalPortrait(
        3, 0.0, (
            CriticalSpec(2, 0, 0.0, (0.0, 1 / 3)),
            CriticalSpec(2, 1, 0.4, (0.05, 0.05 + 1 / 3)),
        )))
    jittered = build_certificate(CriticalPortrait(
        3, delta, (
            CriticalSpec(2, 0, 0.0, (delta, 1 / 3 + delta)),
            CriticalSpec(2, 1, 0.4, (0.05 + delta, 0.05 + 1 / 3 + delta)),
        )))
    assert certificate_to_json(base) == certificate_to_json(jittered)


def test_build_certificate_deterministic():
    from polybasin.invariant import certificate_to_json
    P = two_critical_cubic_portrait(theta2=0.07, t2_frac=0.3)
    texts = {certificate_to_json(build_certificate(P)) for _ in range(5)}
    assert len(texts) == 1


# -- serialization -----------------------------------------------------------------

def test_portrait_json_round_trip_exact_rationals():
    P = two_critical_cubic_portrait(theta2=F(1, 90))
    text = portrait_to_json(P)
    back = portrait_from_json(text)
    assert back.criticals[0].co_angles == (F(0), F(1, 3))
    assert back.criticals[1].co_angles == (F(1, 90), F(1, 90) + F(1, 3))
    assert portrait_to_json(back) == text


def test_portrait_json_rational_strings():
    text = '{"degree": 2, "base_angle": "0/1", "criticals": ' \
           '[{"d": 2, "n": 0, "y_frac": 0.0, "co_angles": ["0/1", "1/2"]}]}'
    P = portrait_from_json(text)
    assert P.criticals[0].co_angles == (F(0), F(1, 2))
    assert portrait_validate(P).ok
