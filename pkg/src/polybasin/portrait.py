"""Symbolic critical portraits and the deterministic component-enumeration
walk that turns a portrait into an invariant certificate.

A portrait describes the escaping critical data of a degree-m covering of an
annulus: for each critical point its local degree d, timeline depth n and
fractional level y', and the d external angles whose rays crash together at
it.  The walk works entirely on angles; rational angles stay exact.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import angles as ang
from .errors import (
    EmptySpec,
    GenericityViolation,
    InvalidPortrait,
    OnBoundary,
    ParseError,
)
from .invariant import (
    ComponentNumber,
    CriticalLabel,
    DistinguishingGraph,
    InvariantCertificate,
    LabelledPoint,
    ValidationReport,
    graph_validate,
)

#: angular comparison tolerance for float portraits
EPS_ANGLE = ang.EPS_ANGLE

#: two timeline coordinates closer than this violate genericity
EPS_TIMELINE = 1e-9

ORIENTATIONS = ("ccw", "cw")


@dataclass(frozen=True)
class CriticalSpec:
    """One critical point: local degree, timeline position, and the external
    angles of the d rays crashing at it."""

    d: int
    n: int
    y_frac: object
    co_angles: tuple

    def __post_init__(self):
        object.__setattr__(self, "co_angles",
                           tuple(sorted(self.co_angles, key=ang.as_float)))

    @property
    def t(self):
        """Timeline coordinate n + y'."""
        return self.n + self.y_frac


@dataclass(frozen=True)
class CriticalPortrait:
    """Degree, the angle pinning the timeline curve at the first critical
    value, and the critical specs sorted by timeline coordinate."""

    degree: int
    base_angle: object
    criticals: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "criticals",
            tuple(sorted(self.criticals, key=lambda c: ang.as_float(c.t))))


def _is_multiple_of(value, unit, eps):
    """Is value an integer multiple of unit (both angles, mod 1)?"""
    if ang.is_exact(value) and ang.is_exact(unit):
        return (value / unit).denominator == 1
    ratio = ang.as_float(value) / ang.as_float(unit)
    return abs(ratio - round(ratio)) * ang.as_float(unit) <= eps


def portrait_validate(P):
    """Structural checks; returns a report, never raises."""
    report = ValidationReport()
    v = report.violations

    if P.degree < 2:
        v.append(f"degree must be >= 2, got {P.degree}")
    if not 0 <= ang.as_float(P.base_angle) < 1:
        v.append(f"base angle {P.base_angle} outside [0, 1)")

    for i, c in enumerate(P.criticals):
        if c.d < 2:
            v.append(f"critical {i}: local degree {c.d} < 2")
        if c.n < 0:
            v.append(f"critical {i}: depth {c.n} < 0")
        if not 0 <= ang.as_float(c.y_frac) < 1:
            v.append(f"critical {i}: level fraction {c.y_frac} outside [0, 1)")
        if len(c.co_angles) != c.d:
            v.append(f"critical {i}: {len(c.co_angles)} co-angles for degree {c.d}")
        for a in c.co_angles:
            if not 0 <= ang.as_float(a) < 1:
                v.append(f"critical {i}: co-angle {a} outside [0, 1)")
        unit = Fraction(1, P.degree)
        for a in c.co_angles:
            delta = ang.ccw_gap(c.co_angles[0], a)
            if delta and not _is_multiple_of(delta, unit, EPS_ANGLE):
                v.append(
                    f"critical {i}: co-angle spacing {a} vs {c.co_angles[0]} "
                    f"is not a multiple of 1/{P.degree}")

    if P.criticals:
        first = P.criticals[0]
        if first.n != 0 or ang.as_float(first.y_frac) != 0.0:
            v.append(
                f"first critical must sit at depth 0, level fraction 0, "
                f"got (n={first.n}, y'={first.y_frac})")
        for a in first.co_angles:
            image = ang.times_pow(a, P.degree, 1)
            if ang.cyc_dist(image, P.base_angle) > EPS_ANGLE:
                v.append(
                    f"first critical co-angle {a} does not map onto the base "
                    f"angle {P.base_angle}")

    ts = [ang.as_float(c.t) for c in P.criticals]
    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            if abs(ts[i] - ts[j]) <= EPS_TIMELINE:
                v.append(
                    f"genericity violated: criticals {i} and {j} share the "
                    f"timeline coordinate {ts[i]!r}")

    branching = sum(c.d - 1 for c in P.criticals)
    if branching > P.degree - 1:
        v.append(
            f"total branching {branching} exceeds degree bound {P.degree - 1}")
    return report


# -- arc partitions -------------------------------------------------------------

@dataclass(frozen=True)
class ArcPartition:
    """The circle minus the co-angles, as d arcs numbered 1..d from the entry
    co-angle in the walk orientation.  arcs[k] = (start, end) traversed in the
    partition's orientation."""

    orientation: str
    entry: object
    arcs: tuple


def arc_partition(spec, reference_angle, orientation="ccw"):
    """Split the circle at the spec's co-angles and number the arcs.

    The entry co-angle is the one nearest to the reference angle in the
    orientation's direction (ties break to the smaller angle value); arc 1
    starts there.
    """
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    cos = spec.co_angles
    if not cos:
        raise EmptySpec("critical spec carries no co-angles")

    def snap(gap):
        # a co-angle within the angular tolerance of the reference counts as
        # distance 0 in both orientations instead of wrapping to a full turn,
        # so jitter below the tolerance cannot rotate the arc numbering
        g = ang.as_float(gap)
        return 0.0 if g >= 1.0 - EPS_ANGLE else g

    if orientation == "ccw":
        def dist(c):
            return snap(ang.ccw_gap(reference_angle, c))
    else:
        def dist(c):
            return snap(ang.ccw_gap(c, reference_angle))

    entry = min(cos, key=lambda c: (dist(c), ang.as_float(c)))
    if orientation == "ccw":
        ordered = sorted(cos, key=lambda c: ang.as_float(ang.ccw_gap(entry, c)))
    else:
        ordered = sorted(cos, key=lambda c: ang.as_float(ang.ccw_gap(c, entry)))
    arcs = tuple(
        (ordered[i], ordered[(i + 1) % len(ordered)]) for i in range(len(ordered)))
    return ArcPartition(orientation, entry, arcs)


def locate_in_partition(partition, angle):
    """1-based index of the arc containing the angle.

    Float angles within EPS_ANGLE of a co-angle raise OnBoundary.  Exact
    rational hits on a co-angle are attached to the arc that begins there in
    the partition's orientation (the boundary belongs to the component on its
    far side from the attractor).
    """
    starts = [arc[0] for arc in partition.arcs]
    exact_all = ang.is_exact(angle) and all(ang.is_exact(s) for s in starts)

    if exact_all:
        for idx, start in enumerate(starts):
            if ang.norm1(angle) == ang.norm1(start):
                return idx + 1
    else:
        for start in starts:
            if ang.cyc_dist(angle, start) <= EPS_ANGLE:
                raise OnBoundary(
                    f"angle {angle} within {EPS_ANGLE} of co-angle {start}")

    for idx, (start, end) in enumerate(partition.arcs):
        if partition.orientation == "ccw":
            inside = ang.ccw_gap(start, angle) < ang.ccw_gap(start, end)
        else:
            inside = ang.ccw_gap(angle, start) < ang.ccw_gap(end, start)
        if inside:
            return idx + 1
    raise OnBoundary(f"angle {angle} not strictly inside any arc")


# -- component numbers and certificates -------------------------------------------

def _timeline_ceil(delta):
    """ceil of a timeline difference, exact for Fractions."""
    if isinstance(delta, Fraction):
        return -((-delta) // 1)
    return math.ceil(delta)


def reference_angle(P, spec):
    """Entry angle of the timeline trunk into a critical's subdivision ring:
    the depth-(n+1) pullback of the base angle along the k=0 branch."""
    if ang.is_exact(P.base_angle):
        return P.base_angle / Fraction(P.degree) ** (spec.n + 1)
    return ang.as_float(P.base_angle) / float(P.degree) ** (spec.n + 1)


def component_number(P, index, orientation="ccw"):
    """Compound address of critical ``index``: one arc index per shallower
    critical, in ascending timeline order, then the fixed own-entry 1.

    The entry relative to critical j is found by iterating the representative
    angle (the smallest co-angle) forward ceil(t_i - t_j) times, which lands
    it in j's subdivision ring, and locating it in j's arc partition.
    """
    crit = P.criticals[index]
    t_i = crit.t
    theta = crit.co_angles[0]
    entries = []
    for j, other in enumerate(P.criticals):
        if j == index:
            continue
        t_j = other.t
        if abs(ang.as_float(t_i) - ang.as_float(t_j)) <= EPS_TIMELINE:
            raise GenericityViolation(
                f"criticals {index} and {j} share timeline coordinate {t_i}")
        if ang.as_float(t_j) > ang.as_float(t_i):
            continue
        steps = int(_timeline_ceil(t_i - t_j))
        query = ang.times_pow(theta, P.degree, steps)
        part = arc_partition(other, reference_angle(P, other), orientation)
        entries.append(locate_in_partition(part, query))
    entries.append(1)
    return ComponentNumber(tuple(entries))


def build_certificate(P, orientation="ccw"):
    """Certificate of a validated portrait: one labelled point per critical at
    its fractional level, labelled with both orientations' compound numbers.

    ``orientation`` picks which walk runs first; the label pair is unordered,
    so the result is bit-identical either way.  A portrait with no criticals
    yields the empty graph; the certificate is then decided by the degree
    alone.
    """
    report = portrait_validate(P)
    if not report.ok:
        genericity = [v for v in report.violations if "genericity" in v]
        if genericity:
            raise GenericityViolation("; ".join(genericity))
        raise InvalidPortrait(str(report))

    walks = ("cw", "ccw") if orientation == "cw" else ORIENTATIONS
    points = []
    for i, crit in enumerate(P.criticals):
        pair = tuple(component_number(P, i, o) for o in walks)
        label = CriticalLabel(crit.d, crit.n, pair)
        points.append(LabelledPoint(ang.as_float(crit.y_frac), label))
    graph = DistinguishingGraph(tuple(points))
    gr = graph_validate(graph)
    if not gr.ok:
        raise InvalidPortrait(f"constructed graph invalid: {gr}")
    return InvariantCertificate(P.degree, graph)


# -- serialization -----------------------------------------------------------------

def portrait_to_obj(P):
    return {
        "degree": P.degree,
        "base_angle": ang.format_angle(P.base_angle),
        "criticals": [
            {
                "d": c.d,
                "n": c.n,
                "y_frac": ang.format_angle(c.y_frac),
                "co_angles": [ang.format_angle(a) for a in c.co_angles],
            }
            for c in P.criticals
        ],
    }


def portrait_from_obj(obj):
    try:
        criticals = tuple(
            CriticalSpec(
                int(c["d"]),
                int(c["n"]),
                ang.parse_angle(c["y_frac"]),
                tuple(ang.parse_angle(a) for a in c["co_angles"]),
            )
            for c in obj["criticals"]
        )
        return CriticalPortrait(
            int(obj["degree"]), ang.parse_angle(obj["base_angle"]), criticals)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad portrait document: {exc}") from exc


def portrait_to_json(P):
    return json.dumps(portrait_to_obj(P), indent=2) + "\n"


def portrait_from_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return portrait_from_obj(obj)
