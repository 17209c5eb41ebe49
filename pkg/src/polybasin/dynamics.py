"""Orbit numerics for the basin of infinity: escape-rate potential, external
angles, critical-point extraction, and the bridge from a concrete polynomial
to its symbolic critical portrait and invariant certificate.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import angles as ang
from . import rays
from .errors import (
    BranchAmbiguity,
    GenericityViolation,
    IllConditioned,
    NonEscaping,
    RayTraceFailure,
    RootFindingDiverged,
)
from .invariant import certificates_equivalent
from .poly import (
    ComplexPolynomial,
    escape_radius,
    ratio_to_power,
    tail_coefficient_sum,
)
from .portrait import CriticalPortrait, CriticalSpec, build_certificate

DEFAULT_MAX_ITER = 10000
DEFAULT_TOL_GREEN = 1e-12
DEFAULT_TOL_ANGLE = 1e-9

#: escaping criticals closer than this in timeline coordinate break genericity
GENERICITY_TOL = 1e-9

#: critical-root clustering radius
CLUSTER_RADIUS = 1e-6

#: a traced candidate ray is attributed to a critical point at this distance
ATTRIBUTION_RADIUS = 1e-6


@dataclass(frozen=True)
class GreenEstimate:
    """Escape-rate potential value with an a-posteriori error bound."""

    value: float
    error_bound: float
    iterations_used: int


@dataclass(frozen=True)
class CriticalOrbitRecord:
    """Escaping critical point with its potential level, timeline coordinate,
    and ray data.  Angles are stored in the gauge-normalized frame; the raw
    frame (as traced in the plane) is kept alongside for the grid oracle.
    ``co_angles_traced`` holds only the raw angles whose rays genuinely reach
    this point from infinity (branches blocked by a shallower crash are
    padded into ``co_angles_raw`` but carry no ray)."""

    point: complex
    local_degree: int
    green_level: GreenEstimate
    timeline: float
    external_angle: float
    co_angles: tuple
    image_angle_raw: float
    co_angles_raw: tuple
    co_angles_traced: tuple


@dataclass(frozen=True)
class PortraitExtraction:
    """Everything the downstream oracle needs: the symbolic portrait, the
    per-critical records, the top critical level, and the gauge rotation that
    was applied to all stored angles."""

    polynomial: ComplexPolynomial
    portrait: CriticalPortrait
    records: tuple
    green_star: float
    gauge_shift: float
    skipped: tuple  # (point, local_degree) of non-escaping criticals


# -- escape-rate potential ------------------------------------------------------

def green(p, z, tol=DEFAULT_TOL_GREEN, max_iter=DEFAULT_MAX_ITER,
          esc_radius_factor=1.0):
    """Potential G(z) = lim m**-k log|p^k(z)|, with G(p(z)) = m G(z).

    The orbit is first iterated to the escape radius (NonEscaping if the
    budget runs out), then the telescoping series
    G = m**-K (log|z_K| + sum m**-(j+1) log|p(z_j)/z_j**m|) is accumulated
    from the escape point until its tail bound drops under ``tol``.
    Renormalized 1/z evaluation keeps every step finite.
    """
    if tol < 1e-14:
        raise ValueError("tolerance below double precision")
    m = p.degree
    R = escape_radius(p) * esc_radius_factor
    A = tail_coefficient_sum(p)

    w = complex(z)
    k_esc = 0
    while abs(w) <= R:
        if k_esc >= max_iter:
            raise NonEscaping(
                f"orbit of {z} stayed within radius {R:g} for {max_iter} steps",
                iterations=max_iter)
        w = p(w)
        k_esc += 1

    # Remaining correction series splits into the leading-coefficient part,
    # summed in closed form, and the 1/z part: |z| doubles per step beyond R,
    # so |log(1+delta)| <= 2A/|z| summed geometrically bounds that tail.
    log_lead = math.log(abs(p.leading))
    log_base = math.log(abs(w))
    corr = 0.0
    scale = 1.0 / m
    k = 0
    cap = 10.0 ** (250.0 / m)
    while True:
        tail = scale * 4.0 * A / abs(w) if abs(w) > 2.0 * A else scale * 2.0
        if tail <= tol * 0.5 or abs(w) > cap:
            corr += scale * m / (m - 1.0) * log_lead
            break
        corr += scale * math.log(abs(ratio_to_power(p, w)))
        w = p(w)
        k += 1
        scale /= m

    value = (log_base + corr) * m ** (-k_esc)
    # summation error: terms shrink geometrically, so a few ulps of the
    # partial sums dominate regardless of the iteration count
    roundoff = 4e-15 * (abs(log_base) + abs(corr) + 1.0) * m ** (-k_esc)
    bound = tail * m ** (-k_esc) + roundoff + 4e-16 * abs(value)
    if bound > tol:
        raise IllConditioned(f"could not reach tolerance {tol:g}")
    return GreenEstimate(value, bound, k_esc + k)


# -- external angle ---------------------------------------------------------------

def external_angle(p, z, tol=DEFAULT_TOL_ANGLE, max_iter=DEFAULT_MAX_ITER,
                   esc_radius_factor=1.0):
    """Angle of the basin coordinate: lim arg(p^k(z)) / (2 pi m**k), with the
    argument unwound continuously along the orbit.

    Each step contributes Arg(a_m) + Arg(1 + delta_k) at weight m**-(k+1); a
    correction with |Arg(1 + delta)| >= pi/2 before escape means the branch
    cannot be resolved and raises BranchAmbiguity.
    """
    m = p.degree
    R = escape_radius(p) * esc_radius_factor
    arg_lead = cmath.phase(p.leading)

    w = complex(z)
    if w == 0:
        raise BranchAmbiguity("argument undefined at the origin")
    total = cmath.phase(w)
    scale = 1.0 / m
    k = 0
    escaped = abs(w) > R
    cap = 10.0 ** (250.0 / m)
    while True:
        if not escaped and k >= max_iter:
            raise NonEscaping(
                f"orbit of {z} stayed within radius {R:g} for {max_iter} steps",
                iterations=max_iter)
        ratio = ratio_to_power(p, w) if w != 0 else None
        if ratio is None or ratio == 0:
            raise BranchAmbiguity("orbit passed through a zero")
        phase = cmath.phase(ratio / p.leading)
        if not escaped and abs(phase) >= math.pi / 2:
            raise BranchAmbiguity(
                f"per-step correction {phase:.3f} rad at step {k} before escape")
        total += scale * (arg_lead + phase)
        w = p(w)
        k += 1
        escaped = escaped or abs(w) > R
        if escaped:
            tail = scale * (abs(arg_lead) + 2.0 * _delta_bound(p, w)) * 2.0
            if tail <= tol * math.pi or abs(w) > cap:
                # closed form for the remaining leading-coefficient phases
                total += scale / (m - 1.0) * arg_lead
                break
        scale /= m
    return ang.norm1(total / (2.0 * math.pi))


def _delta_bound(p, w):
    A = tail_coefficient_sum(p)
    aw = abs(w)
    return A / aw if aw > 2.0 * A else 1.0


def external_angle_resolved(p, z, tol=DEFAULT_TOL_ANGLE, depth=0):
    """External angle with branch-ambiguity recovery: retry from the next
    orbit point and pick the preimage angle whose ray passes through z."""
    try:
        return external_angle(p, z, tol)
    except BranchAmbiguity:
        if depth >= 8:
            raise
    g_here = green(p, z).value
    theta_up = external_angle_resolved(p, p(z), tol, depth + 1)
    m = p.degree
    candidates = [ang.norm1((theta_up + j) / m) for j in range(m)]
    dists = []
    for cand in candidates:
        try:
            end = rays.trace_ray(p, cand, g_here)
        except RayTraceFailure:
            dists.append(math.inf)
            continue
        dists.append(abs(end - z))
    order = sorted(range(m), key=lambda i: dists[i])
    scale = max(1.0, abs(z))
    if dists[order[0]] > 1e-4 * scale:
        raise BranchAmbiguity(f"no candidate ray passes through {z}")
    if len(order) > 1 and dists[order[1]] < 3.0 * dists[order[0]]:
        raise BranchAmbiguity(f"two candidate rays pass near {z}")
    return candidates[order[0]]


# -- critical points ----------------------------------------------------------------

def _poly_scale(coeffs, z):
    return sum(abs(c) * max(1.0, abs(z)) ** i for i, c in enumerate(coeffs))


_EPS = 2.2e-16


def _single_linkage(roots, radius):
    clusters = [[r] for r in roots]
    merged = True
    while merged:
        merged = False
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                gap = min(abs(a - b) for a in clusters[i] for b in clusters[j])
                scale = max(1.0, abs(clusters[i][0]))
                if gap <= radius * scale:
                    clusters[i] += clusters[j]
                    del clusters[j]
                    merged = True
                    break
            if merged:
                break
    return clusters


def _refine_clusters(p, clusters):
    """Refined (center, local_degree) list, or None when a cluster fails its
    multiplicity certificate (spread law, derivative vanishing, residual)."""
    out = []
    for cluster in clusters:
        mult = len(cluster)
        center = sum(cluster) / mult
        # the mult-th derivative of p has a simple root there: polish with Newton
        for _ in range(50):
            f = p.derivative(center, mult)
            df = p.derivative(center, mult + 1)
            if df == 0:
                break
            step = f / df
            center -= step
            if abs(step) <= 1e-14 * max(1.0, abs(center)):
                break
        if mult > 1:
            spread = max(abs(r - center) for r in cluster)
            if spread > 10.0 * _EPS ** (1.0 / mult) * max(1.0, abs(center)):
                return None
        for j in range(1, mult + 1):
            scale = _poly_scale(p.derivative_coefficients(j), center)
            if abs(p.derivative(center, j)) > 1e-7 * max(scale, 1e-300):
                return None
        scale1 = _poly_scale(p.derivative_coefficients(), center)
        if abs(p.derivative(center)) > 1e-9 * max(scale1, 1e-300):
            return None
        out.append((center, mult + 1))
    return out


def critical_points(p):
    """Roots of the derivative with local degrees (multiplicity + 1).

    A genuine multiplicity-mu root of the derivative splits numerically by
    about eps**(1/mu), so candidate clusterings are tried from the coarsest
    splitting radius down to CLUSTER_RADIUS; the first whose clusters all
    certify their multiplicity (spread law, higher derivatives vanishing,
    tiny residual) wins.  Distinct criticals closer than CLUSTER_RADIUS are
    rejected as ill-conditioned rather than silently merged.
    """
    dcoeffs = p.derivative_coefficients()
    roots = np.roots(list(reversed(dcoeffs)))
    if not np.all(np.isfinite(roots)):
        raise RootFindingDiverged("derivative root finding produced non-finite values")
    roots = sorted((complex(r) for r in roots), key=lambda r: (r.real, r.imag))

    radii = sorted({10.0 * _EPS ** (1.0 / s) for s in range(2, p.degree)}
                   | {CLUSTER_RADIUS}, reverse=True)
    out = None
    for radius in radii:
        out = _refine_clusters(p, _single_linkage(roots, radius))
        if out is not None:
            break
    if out is None:
        raise IllConditioned(
            "critical points cannot be separated into certified "
            "multiplicity clusters (distinct roots too close)")

    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            if abs(out[i][0] - out[j][0]) < CLUSTER_RADIUS:
                raise IllConditioned(
                    f"distinct critical points {out[i][0]} and {out[j][0]} "
                    f"closer than {CLUSTER_RADIUS}")

    total = sum(d - 1 for _, d in out)
    if total != p.degree - 1:
        raise RootFindingDiverged(
            f"branching count {total} != degree - 1 = {p.degree - 1}")
    return out


# -- portrait extraction --------------------------------------------------------------

#: a descending ray passing this close to a shallower critical at its level
#: has crashed there; its continuation below is not a global ray
BLOCK_RADIUS = 1e-3


def classify_candidate_rays(p, point, theta_hat, level, blockers):
    """Trace the m preimage rays of the critical value's angle toward the
    critical point at ``level``.

    ``blockers`` are shallower criticals as (point, level) pairs, level
    descending.  Returns (hits, blocked): candidate angles whose rays
    terminate at the critical point, and ones crashing on a blocker first.
    """
    m = p.degree
    scale = max(1.0, abs(point))
    hits, blocked, missed = [], [], []
    for j in range(m):
        cand = ang.norm1((theta_hat + j) / m)
        tracer = rays.RayTracer(p, cand)
        try:
            stopped = None
            for b_point, b_level in blockers:
                rays.descend_to_crash(tracer, b_level, gap=1e-10)
                if abs(tracer.point - b_point) <= BLOCK_RADIUS * max(1.0, abs(b_point)):
                    stopped = b_point
                    break
            if stopped is not None:
                blocked.append(cand)
                continue
            rays.descend_to_crash(tracer, level, gap=1e-13)
        except RayTraceFailure:
            missed.append((cand, math.inf))
            continue
        dist = abs(tracer.point - point)
        if dist <= ATTRIBUTION_RADIUS * scale:
            hits.append(cand)
        else:
            missed.append((cand, dist))
    return hits, blocked, missed


def _co_angles_by_tracing(p, point, local_degree, theta_hat, level, blockers):
    """Co-angle set of a critical point: the genuinely crashing preimage
    angles, padded (ascending) with blocked candidates when a shallower
    crash cuts a branch off from infinity.

    Padding cannot disturb the certificate: only the image angle theta_hat
    survives one forward iteration, and all candidates share it.
    """
    d = local_degree
    scale = max(1.0, abs(point))
    hits, blocked, missed = classify_candidate_rays(
        p, point, theta_hat, level, blockers)
    if len(hits) < d and missed:
        # soft attribution: the closest-approach floor scales with the
        # precision of the crash level, so accept near hits separated by a
        # clean factor from the true misses
        missed.sort(key=lambda item: item[1])
        while (len(hits) < d and missed and missed[0][1] <= 1e-4 * scale
               and (len(missed) == 1
                    or missed[1][1] >= 20.0 * max(missed[0][1], 1e-12)
                    or missed[1][1] <= 1e-4 * scale)):
            hits.append(missed.pop(0)[0])
    if len(hits) > d:
        raise BranchAmbiguity(
            f"{len(hits)} rays terminate at critical point {point}, "
            f"local degree is only {d}")
    co = sorted(hits)
    for cand in sorted(blocked):
        if len(co) >= d:
            break
        co.append(cand)
    if len(co) != d:
        raise BranchAmbiguity(
            f"expected {d} rays at critical point {point}: traced "
            f"{len(hits)} crashing and {len(blocked)} blocked candidates")
    return tuple(sorted(co)), tuple(sorted(hits))


def extract_portrait(p, tol_green=DEFAULT_TOL_GREEN, tol_angle=DEFAULT_TOL_ANGLE,
                     max_iter=DEFAULT_MAX_ITER, esc_radius_factor=1.0):
    """Critical portrait of a polynomial on its basin of infinity.

    Only escaping critical points enter the portrait (bounded criticals lie
    outside the basin).  The timeline is anchored at the highest critical
    level; the base angle is the external angle of that critical's value.
    All angles are then rotated into a canonical gauge: the residual freedom
    of the basin coordinate is a rotation by a multiple of 1/(m-1), fixed by
    moving the base angle into [0, 1/(m-1)).
    """
    m = p.degree
    crits = critical_points(p)
    records = []
    skipped = []
    greens = {}
    level_tol = min(tol_green, 1e-13)  # crash levels gate ray attribution
    for point, d in crits:
        try:
            greens[point] = green(p, point, level_tol, max_iter, esc_radius_factor)
        except NonEscaping:
            skipped.append((point, d))

    escaping = [(point, d) for point, d in crits if point in greens]
    if not escaping:
        portrait = CriticalPortrait(m, 0.0, ())
        return PortraitExtraction(p, portrait, (), 0.0, 0.0, tuple(skipped))

    g_star = max(greens[pt].value for pt, _ in escaping)
    log_m = math.log(m)

    timed = []
    for point, d in escaping:
        t = (math.log(g_star) - math.log(greens[point].value)) / log_m
        timed.append((t, point, d))
    timed.sort(key=lambda item: item[0])
    timed[0] = (0.0, timed[0][1], timed[0][2])  # anchor exactly

    for (t1, p1, _), (t2, p2, _) in zip(timed, timed[1:]):
        if abs(t1 - t2) <= GENERICITY_TOL:
            raise GenericityViolation(
                f"criticals {p1} and {p2} share the potential level: "
                f"timeline coordinates {t1!r} and {t2!r}")

    alpha_raw = external_angle_resolved(p, p(timed[0][1]), tol_angle)
    # Fix the residual gauge freedom of the basin coordinate (rotation by a
    # multiple of 1/(m-1)) by moving the base angle into [0, 1/(m-1)).
    # Residues within 1e-9 of the window boundary snap to 0 so that float
    # noise cannot split otherwise identical portraits across the wrap.
    residue = ang.norm1(alpha_raw * (m - 1))
    if residue >= 1.0 - 1e-9:
        residue = 0.0
    base = residue / (m - 1)
    shift = ang.norm1(base - alpha_raw)

    specs = []
    blockers = []  # shallower criticals, level descending
    for t, point, d in timed:
        theta_hat_raw = (alpha_raw if t == 0.0
                         else external_angle_resolved(p, p(point), tol_angle))
        co_raw, traced = _co_angles_by_tracing(p, point, d, theta_hat_raw,
                                               greens[point].value, tuple(blockers))
        n = int(math.floor(t))
        y = t - n
        co = tuple(sorted(ang.norm1(c + shift) for c in co_raw))
        specs.append((t, point, d, n, y, co, theta_hat_raw, co_raw, traced))
        blockers.append((point, greens[point].value))

    portrait = CriticalPortrait(
        m, base,
        tuple(CriticalSpec(d, n, y, co)
              for t, point, d, n, y, co, _, _, _ in specs))

    recs = tuple(
        CriticalOrbitRecord(
            point=point, local_degree=d, green_level=greens[point],
            timeline=t, external_angle=co[0], co_angles=co,
            image_angle_raw=theta_hat_raw, co_angles_raw=co_raw,
            co_angles_traced=traced)
        for t, point, d, n, y, co, theta_hat_raw, co_raw, traced in specs)
    return PortraitExtraction(p, portrait, recs, g_star, shift, tuple(skipped))


def portrait_of(p, **kwargs):
    """Symbolic critical portrait; empty when no critical escapes."""
    return extract_portrait(p, **kwargs).portrait


def invariant_of(p, orientation="ccw", **kwargs):
    """Full pipeline: portrait extraction plus the enumeration walk."""
    return build_certificate(portrait_of(p, **kwargs), orientation=orientation)


def polys_equivalent(p, q, **kwargs):
    """Topological equivalence on the basins of infinity: equal degrees and
    equivalent certificates."""
    return certificates_equivalent(invariant_of(p, **kwargs),
                                   invariant_of(q, **kwargs))
