"""Exact combinatorial core: cyclic preimage fractions, critical labels,
and the linearly ordered labelled-point certificate that decides topological
equivalence of basin dynamics.

Everything here is immutable and pure; all arithmetic on fractions is exact
integer arithmetic.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BadBase,
    DegenerateTriple,
    DepthLimitExceeded,
    IndexOutOfRange,
    InvalidCertificate,
    InvalidGraph,
    MixedBase,
    ParseError,
)

#: maximum supported preimage depth; deeper fractions are never needed at
#: desk scale and the cap keeps m**n sizes sane.
DEPTH_CAP = 64

#: two distinct float positions closer than this make the sort order of a
#: graph numerically ambiguous.
POSITION_COLLISION = 1e-9


# -- preimage fractions -------------------------------------------------------

@dataclass(frozen=True)
class PreimageFraction:
    """Cyclic index k among the m**n co-preimages at depth n, written k/m**n."""

    k: int
    m: int
    n: int

    def value(self):
        """Exact rational value in [0, 1)."""
        return Fraction(self.k, self.m ** self.n)

    def __str__(self):
        return f"{self.k}/{self.m ** self.n}"


def frac_make(k, m, n, depth_cap=DEPTH_CAP):
    """Build the fraction k/m**n; the identity pair is 0/1."""
    if m < 1:
        raise BadBase(f"covering degree must be >= 1, got {m}")
    if n < 0 or n > depth_cap:
        raise DepthLimitExceeded(f"depth {n} outside [0, {depth_cap}]")
    if not 0 <= k < m ** n:
        raise IndexOutOfRange(f"index {k} outside [0, {m}**{n})")
    return PreimageFraction(int(k), int(m), int(n))


def _check_base(a, b):
    if a.m != b.m:
        raise MixedBase(f"mixed covering degrees {a.m} and {b.m}")


def frac_eq(a, b):
    """Exact equality k_a/m**n_a == k_b/m**n_b by integer cross-multiplication."""
    _check_base(a, b)
    return a.k * b.m ** b.n == b.k * a.m ** a.n


def cyclic_between(a, b, c):
    """True iff, walking counterclockwise from a, b is met strictly before c."""
    _check_base(a, b)
    _check_base(a, c)
    if frac_eq(a, b) or frac_eq(a, c) or frac_eq(b, c):
        raise DegenerateTriple(f"degenerate triple {a}, {b}, {c}")
    gap_b = (b.value() - a.value()) % 1
    gap_c = (c.value() - a.value()) % 1
    return gap_b < gap_c


# -- component numbers and labels ---------------------------------------------

@dataclass(frozen=True)
class ComponentNumber:
    """Compound address of a preimage component: one entry per subdividing
    critical fiber, each entry >= 1."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if not entries:
            raise ValueError("component number needs at least one entry")
        if any(e < 1 for e in entries):
            raise ValueError(f"component entries must be >= 1, got {entries}")
        object.__setattr__(self, "entries", entries)

    def __str__(self):
        return "{" + ",".join(str(e) for e in self.entries) + "}"


def _as_component(c):
    return c if isinstance(c, ComponentNumber) else ComponentNumber(tuple(c))


@dataclass(frozen=True)
class CriticalLabel:
    """Label (d, n, {C, C'}) of a critical point: local degree, depth and the
    unordered pair of component numbers for the two boundary orientations."""

    d: int
    n: int
    pair: tuple

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"local degree must be >= 2, got {self.d}")
        if self.n < 0:
            raise ValueError(f"depth must be >= 0, got {self.n}")
        first, second = self.pair
        canon = tuple(sorted((_as_component(first), _as_component(second)),
                             key=lambda c: c.entries))
        object.__setattr__(self, "pair", canon)

    def __str__(self):
        return f"({self.d},{self.n},{self.pair[0]}{self.pair[1]})"


def label_eq(l1, l2):
    """Equal local degree, equal depth, equal unordered pair of sequences."""
    return l1.d == l2.d and l1.n == l2.n and l1.pair == l2.pair


_ANCHOR_PAIR = (ComponentNumber((1,)), ComponentNumber((1,)))


# -- the labelled semi-interval -------------------------------------------------

@dataclass(frozen=True)
class LabelledPoint:
    """A critical point projected to [0, 1) by the fractional part of its
    timeline coordinate, carrying its label."""

    position: float
    label: CriticalLabel

    def __post_init__(self):
        object.__setattr__(self, "position", float(self.position))

    def sort_key(self):
        return (self.position, self.label.n)


@dataclass(frozen=True)
class DistinguishingGraph:
    """Labelled points on [0, 1), kept sorted by (position, depth)."""

    points: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pts = tuple(sorted(self.points, key=LabelledPoint.sort_key))
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        if self.ok and not self.warnings:
            return "OK"
        lines = [f"violation: {v}" for v in self.violations]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) or "OK"


def graph_validate(g):
    """Check the anchor rule and ordering sanity; returns a report, never raises.

    The empty graph is valid.  A non-empty graph must label position 0 with a
    depth-0 label whose pair is {1}{1}; duplicate (position, depth) slots and
    out-of-range positions are violations.  Distinct positions closer than
    1e-9 only get an AmbiguousOrder warning: equivalence never compares
    positions numerically, so hairline collisions cannot flip a verdict, but
    they do make the sort order fragile.
    """
    report = ValidationReport()
    if not g.points:
        return report

    for pt in g.points:
        if not 0.0 <= pt.position < 1.0:
            report.violations.append(f"position {pt.position!r} outside [0, 1)")

    anchors = [pt for pt in g.points if pt.position == 0.0 and pt.label.n == 0]
    if not anchors:
        report.violations.append("0 unlabelled: no point at position 0 with depth 0")
    elif anchors[0].label.pair != _ANCHOR_PAIR:
        report.violations.append(
            f"anchor label pair must be {{1}}{{1}}, got {anchors[0].label}")

    seen = {}
    for pt in g.points:
        key = (pt.position, pt.label.n)
        if key in seen:
            report.violations.append(f"duplicate (position, depth) {key}")
        seen[key] = pt

    positions = sorted({pt.position for pt in g.points})
    for lo, hi in zip(positions, positions[1:]):
        if hi - lo < POSITION_COLLISION:
            report.warnings.append(
                f"AmbiguousOrder: positions {lo!r} and {hi!r} within {POSITION_COLLISION}")
    return report


def canonical_sequence(g):
    """Labels in ascending (position, depth) order with positions dropped.

    Positions carry no invariant content beyond their order: any orientation
    preserving reparametrization of [0, 1) fixing 0 leaves the sequence alone.
    """
    report = graph_validate(g)
    if not report.ok:
        raise InvalidGraph(str(report))
    return tuple(pt.label for pt in g.points)


def graphs_equivalent(g1, g2):
    """Order-preserving label-by-label agreement of the canonical sequences.

    Every self-homeomorphism of [0, 1) fixes 0 and is increasing, so graph
    equivalence reduces to equality of the ordered label sequences.
    """
    s1 = canonical_sequence(g1)
    s2 = canonical_sequence(g2)
    if len(s1) != len(s2):
        return False
    return all(label_eq(a, b) for a, b in zip(s1, s2))


# -- certificates ---------------------------------------------------------------

@dataclass(frozen=True)
class InvariantCertificate:
    """A map degree together with a distinguishing graph; the full conjugacy
    invariant for one polynomial restricted to its basin of infinity."""

    degree: int
    graph: DistinguishingGraph

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError(f"map degree must be >= 2, got {self.degree}")


def certificates_equivalent(c1, c2):
    """Equal degree and equivalent graphs."""
    for cert in (c1, c2):
        report = graph_validate(cert.graph)
        if not report.ok:
            raise InvalidCertificate(str(report))
    if c1.degree != c2.degree:
        return False
    return graphs_equivalent(c1.graph, c2.graph)


# -- serialization ---------------------------------------------------------------

def _label_to_obj(label):
    return {
        "d": label.d,
        "n": label.n,
        "pair": [list(label.pair[0].entries), list(label.pair[1].entries)],
    }


def _label_from_obj(obj):
    try:
        pair = tuple(ComponentNumber(tuple(seq)) for seq in obj["pair"])
        if len(pair) != 2:
            raise ValueError("pair must hold exactly two sequences")
        return CriticalLabel(int(obj["d"]), int(obj["n"]), pair)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad label object {obj!r}: {exc}") from exc


def certificate_to_obj(cert):
    return {
        "degree": cert.degree,
        "graph": [
            {"position": pt.position, "label": _label_to_obj(pt.label)}
            for pt in cert.graph.points
        ],
    }


def certificate_from_obj(obj):
    try:
        degree = int(obj["degree"])
        points = tuple(
            LabelledPoint(float(entry["position"]), _label_from_obj(entry["label"]))
            for entry in obj["graph"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad certificate document: {exc}") from exc
    return InvariantCertificate(degree, DistinguishingGraph(points))


def certificate_to_json(cert):
    """Serialize; point order is (position, depth) and floats use shortest
    round-trip repr, so the output is byte-stable."""
    return json.dumps(certificate_to_obj(cert), indent=2) + "\n"


def certificate_from_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return certificate_from_obj(obj)
