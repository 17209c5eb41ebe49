"""Labels, distinguishing graphs, certificates, and their equivalences."""

import random

import pytest

from polybasin.errors import InvalidGraph
from polybasin.invariant import (
    ComponentNumber,
    CriticalLabel,
    DistinguishingGraph,
    InvariantCertificate,
    LabelledPoint,
    canonical_sequence,
    certificate_from_json,
    certificate_to_json,
    certificates_equivalent,
    graph_validate,
    graphs_equivalent,
    label_eq,
)

C = ComponentNumber


def _lbl(d, n, a, b):
    return CriticalLabel(d, n, (C(tuple(a)), C(tuple(b))))


def _anchor(d=2):
    return LabelledPoint(0.0, _lbl(d, 0, (1,), (1,)))


def test_label_eq_identical():
    assert label_eq(_lbl(2, 0, (1,), (1,)), _lbl(2, 0, (1,), (1,)))


def test_label_eq_unordered_pair():
    assert label_eq(_lbl(2, 1, (1, 2), (2, 1)), _lbl(2, 1, (2, 1), (1, 2)))


def test_label_eq_degree_matters():
    assert not label_eq(_lbl(2, 1, (1,), (1,)), _lbl(3, 1, (1,), (1,)))


def test_label_eq_depth_matters():
    assert not label_eq(_lbl(2, 1, (1,), (1,)), _lbl(2, 2, (1,), (1,)))


def test_component_number_rejects_empty():
    with pytest.raises(ValueError):
        C(())


def test_component_number_rejects_zero_entry():
    with pytest.raises(ValueError):
        C((1, 0))


def test_validate_empty_graph():
    assert graph_validate(DistinguishingGraph(())).ok


def test_validate_single_anchor():
    g = DistinguishingGraph((_anchor(),))
    assert graph_validate(g).ok


def test_validate_missing_anchor():
    g = DistinguishingGraph((LabelledPoint(0.3, _lbl(2, 1, (2,), (1,))),))
    rep = graph_validate(g)
    assert not rep.ok
    assert any("0 unlabelled" in v for v in rep.violations)


def test_validate_wrong_anchor_pair():
    g = DistinguishingGraph((LabelledPoint(0.0, _lbl(2, 0, (2,), (1,))),))
    rep = graph_validate(g)
    assert not rep.ok


def test_validate_duplicate_slot():
    g = DistinguishingGraph((
        _anchor(),
        LabelledPoint(0.25, _lbl(2, 1, (1, 1), (1, 1))),
        LabelledPoint(0.25, _lbl(2, 1, (2, 1), (1, 1))),
    ))
    rep = graph_validate(g)
    assert any("duplicate" in v for v in rep.violations)


def test_validate_position_range():
    g = DistinguishingGraph((_anchor(), LabelledPoint(1.5, _lbl(2, 1, (1, 1), (1, 1)))))
    rep = graph_validate(g)
    assert any("outside" in v for v in rep.violations)


def test_validate_ambiguous_order_warning():
    g = DistinguishingGraph((
        _anchor(),
        LabelledPoint(0.25, _lbl(2, 1, (1, 1), (1, 1))),
        LabelledPoint(0.25 + 1e-10, _lbl(2, 2, (2, 1), (1, 1))),
    ))
    rep = graph_validate(g)
    assert rep.ok
    assert any("AmbiguousOrder" in w for w in rep.warnings)


def test_shared_position_different_depths_allowed():
    g = DistinguishingGraph((
        _anchor(),
        LabelledPoint(0.0, _lbl(2, 1, (1, 1), (1, 1))),
    ))
    assert graph_validate(g).ok
    seq = canonical_sequence(g)
    assert seq[0].n == 0 and seq[1].n == 1


def test_canonical_sequence_orders_and_drops_positions():
    g = DistinguishingGraph((
        LabelledPoint(0.37, _lbl(2, 1, (2,), (1,))),
        _anchor(),
    ))
    seq = canonical_sequence(g)
    assert [l.n for l in seq] == [0, 1]
    assert label_eq(seq[1], _lbl(2, 1, (2,), (1,)))


def test_canonical_sequence_invalid_graph():
    g = DistinguishingGraph((LabelledPoint(0.5, _lbl(2, 0, (1,), (1,))),))
    with pytest.raises(InvalidGraph):
        canonical_sequence(g)


def test_graphs_equivalent_empty():
    assert graphs_equivalent(DistinguishingGraph(()), DistinguishingGraph(()))


def test_graphs_equivalent_position_independent():
    g1 = DistinguishingGraph((_anchor(), LabelledPoint(0.3, _lbl(2, 1, (2,), (1,)))))
    g2 = DistinguishingGraph((_anchor(), LabelledPoint(0.6, _lbl(2, 1, (2,), (1,)))))
    assert graphs_equivalent(g1, g2)


def test_graphs_differ_by_degree():
    g1 = DistinguishingGraph((_anchor(2),))
    g2 = DistinguishingGraph((_anchor(3),))
    assert not graphs_equivalent(g1, g2)


def test_certificates_equivalent_degree_gate():
    empty = DistinguishingGraph(())
    assert certificates_equivalent(InvariantCertificate(2, empty),
                                   InvariantCertificate(2, empty))
    assert not certificates_equivalent(InvariantCertificate(2, empty),
                                       InvariantCertificate(3, empty))


def test_pair_swap_yields_equivalent_graph():
    g1 = DistinguishingGraph((_anchor(), LabelledPoint(0.4, _lbl(2, 1, (2, 1), (1, 1)))))
    g2 = DistinguishingGraph((_anchor(), LabelledPoint(0.4, _lbl(2, 1, (1, 1), (2, 1)))))
    assert graphs_equivalent(g1, g2)


# -- randomized law suites ---------------------------------------------------

def _random_label(rng):
    d = rng.randrange(2, 5)
    n = rng.randrange(0, 4)
    if n == 0 and rng.random() < 0.5:
        return _lbl(d, 0, (1,), (1,))
    length = rng.randrange(1, 4)
    a = tuple(rng.randrange(1, 4) for _ in range(length))
    b = tuple(rng.randrange(1, 4) for _ in range(length))
    return _lbl(d, n, a, b)


def _random_graph(rng):
    pts = [_anchor(rng.randrange(2, 5))]
    used = {(0.0, 0)}
    for _ in range(rng.randrange(0, 4)):
        lbl = _random_label(rng)
        pos = min(round(rng.random(), 3), 0.999)
        if (pos, lbl.n) in used:
            continue
        if pos == 0.0 and lbl.n == 0:
            continue
        used.add((pos, lbl.n))
        pts.append(LabelledPoint(pos, lbl))
    return DistinguishingGraph(tuple(pts))


def test_label_eq_laws_10k():
    rng = random.Random(11)
    for _ in range(10000):
        a, b, c = (_random_label(rng) for _ in range(3))
        assert label_eq(a, a)
        assert label_eq(a, b) == label_eq(b, a)
        if label_eq(a, b) and label_eq(b, c):
            assert label_eq(a, c)


def test_graph_equivalence_laws():
    rng = random.Random(12)
    for _ in range(2500):
        g1, g2, g3 = (_random_graph(rng) for _ in range(3))
        for g in (g1, g2, g3):
            assert graphs_equivalent(g, g)
        assert graphs_equivalent(g1, g2) == graphs_equivalent(g2, g1)
        if graphs_equivalent(g1, g2) and graphs_equivalent(g2, g3):
            assert graphs_equivalent(g1, g3)
        # certificate laws ride on top
        c1 = InvariantCertificate(2, g1)
        c2 = InvariantCertificate(2, g2)
        assert certificates_equivalent(c1, c1)
        assert certificates_equivalent(c1, c2) == certificates_equivalent(c2, c1)


def test_canonical_sequence_reparametrization():
    """Any increasing reparametrization of positions fixing 0 leaves the
    canonical sequence unchanged."""
    rng = random.Random(13)
    for _ in range(2500):
        g = _random_graph(rng)
        power = rng.choice((0.5, 1.0, 2.0, 3.0))
        pts = tuple(LabelledPoint(pt.position ** power, pt.label)
                    for pt in g.points)
        g2 = DistinguishingGraph(pts)
        s1 = canonical_sequence(g)
        s2 = canonical_sequence(g2)
        assert len(s1) == len(s2)
        assert all(label_eq(a, b) for a, b in zip(s1, s2))


def test_swapping_pairs_graphwide_keeps_equivalence():
    rng = random.Random(14)
    for _ in range(2500):
        g = _random_graph(rng)
        swapped = DistinguishingGraph(tuple(
            LabelledPoint(pt.position,
                          CriticalLabel(pt.label.d, pt.label.n,
                                        (pt.label.pair[1], pt.label.pair[0])))
            for pt in g.points))
        assert graphs_equivalent(g, swapped)


# -- serialization ------------------------------------------------------------

def test_certificate_json_round_trip_bit_exact():
    g = DistinguishingGraph((
        _anchor(),
        LabelledPoint(0.16434796230046051, _lbl(2, 0, (2, 1), (2, 1))),
        LabelledPoint(1 / 3, _lbl(3, 2, (1, 2, 1), (2, 2, 1))),
    ))
    cert = InvariantCertificate(3, g)
    text = certificate_to_json(cert)
    again = certificate_to_json(certificate_from_json(text))
    assert text == again


def test_certificate_json_sorted_by_position_then_depth():
    g = DistinguishingGraph((
        LabelledPoint(0.5, _lbl(2, 2, (1, 1), (1, 1))),
        LabelledPoint(0.5, _lbl(2, 1, (2, 1), (1, 1))),
        _anchor(),
    ))
    cert = InvariantCertificate(2, g)
    obj_positions = [(pt.position, pt.label.n) for pt in cert.graph.points]
    assert obj_positions == sorted(obj_positions)
    text = certificate_to_json(cert)
    assert certificate_to_json(certificate_from_json(text)) == text
