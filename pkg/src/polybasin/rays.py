"""External-ray tracing by iterated pullback.

A ray is entered at a level high enough for the basin coordinates to be
asymptotically polar and followed downward.  The tracer keeps the forward
chain of ray points at levels g, m g, m**2 g, ...; each downward step
re-solves p(z) = w level by level with Newton seeded by continuity, falling
back to a full root solve when a crash point degrades Newton.  A fallback
whose branch choice is ambiguous aborts the step and the tracer retries with
a smaller level decrement.
"""

import cmath
import math

import numpy as np

from .errors import RayTraceFailure
from .poly import gamma_constant, tail_coefficient_sum

#: Newton convergence target relative to |z|
NEWTON_TOL = 1e-13

#: per-step multiplicative level shrink
LEVEL_STEP = 2.0 ** 0.25


def seed_point(p, g, theta):
    """Asymptotic ray point at level g, valid when exp(g) is large: the basin
    coordinate is log z = (g - gamma) + i (2 pi theta - Arg(a_m)/(m-1))."""
    gamma = gamma_constant(p)
    arg = 2.0 * math.pi * theta - cmath.phase(p.leading) / (p.degree - 1)
    return cmath.exp(complex(g - gamma, arg))


def entry_level(p):
    """Level high enough for the asymptotic seed to be trustworthy."""
    gamma = gamma_constant(p)
    A = tail_coefficient_sum(p)
    return math.log(max(1e6, 1e8 * A)) + gamma


def _pullback(p, w, seed):
    """Solve p(z) = w for the branch through ``seed``."""
    z = seed
    for _ in range(24):
        dz = p.derivative(z)
        if dz == 0:
            break
        step = (p(z) - w) / dz
        z = z - step
        if abs(step) <= NEWTON_TOL * max(1.0, abs(z)):
            return z
    # near-critical pullback: fall back to the full root set
    coeffs = list(p.coefficients)
    coeffs[0] -= w
    roots = sorted(
        (complex(r) for r in np.roots(list(reversed(coeffs)))),
        key=lambda r: abs(r - seed))
    if not all(cmath.isfinite(r) for r in roots):
        raise RayTraceFailure("pullback root solve failed")
    if len(roots) > 1:
        d0 = abs(roots[0] - seed)
        d1 = abs(roots[1] - seed)
        if d0 > 0 and d1 < 2.0 * d0:
            raise RayTraceFailure(
                f"ambiguous branch choice: nearest roots at {d0:g} and {d1:g}")
    return roots[0]


class RayTracer:
    """Stateful downward walk along one external ray."""

    def __init__(self, p, theta):
        self.p = p
        self.m = p.degree
        self.theta = theta % 1.0
        self.g = entry_level(p)
        self.chain = [seed_point(p, self.g, self.theta)]

    @property
    def point(self):
        return self.chain[0]

    def _angle_at(self, j):
        return (self.theta * self.m ** j) % 1.0

    def _try_step(self, g_new):
        """One chain update to base level g_new."""
        old_chain = list(self.chain)
        old_g = self.g
        self.g = g_new
        top_needed = entry_level(self.p)
        while self.g * self.m ** (len(self.chain) - 1) < top_needed:
            self.chain.append(0j)  # placeholder, seeded below
        j_top = len(self.chain) - 1
        self.chain[j_top] = seed_point(
            self.p, self.g * self.m ** j_top, self._angle_at(j_top))
        try:
            for j in range(j_top - 1, -1, -1):
                if j < len(old_chain):
                    seed = old_chain[j]
                else:
                    seed = seed_point(self.p, self.g * self.m ** j, self._angle_at(j))
                self.chain[j] = _pullback(self.p, self.chain[j + 1], seed)
        except RayTraceFailure:
            self.chain = old_chain
            self.g = old_g
            raise

    def step_to(self, g_new, depth=0):
        """Move to base level g_new, recursively halving the step on trouble."""
        if g_new >= self.g:
            return
        try:
            self._try_step(g_new)
        except RayTraceFailure:
            if depth >= 16:
                raise
            mid = math.sqrt(self.g * g_new)
            if not mid < self.g:
                raise
            self.step_to(mid, depth + 1)
            self.step_to(g_new, depth + 1)


def descend(tracer, g_end, path=None):
    """Walk a tracer down to level g_end with the geometric step schedule."""
    g = tracer.g
    while g > g_end * (1 + 1e-12):
        g = max(g / LEVEL_STEP, g_end)
        tracer.step_to(g)
        if path is not None:
            path.append((g, tracer.point))


def descend_to_crash(tracer, crash_level, gap=1e-13, path=None):
    """Approach a crash level from above: geometric steps down to twice the
    level, then halve the remaining relative gap each step down to ``gap``."""
    if tracer.g > 2.0 * crash_level:
        descend(tracer, 2.0 * crash_level, path)
    rel = tracer.g / crash_level - 1.0
    while rel > gap:
        rel = max(rel / 2.0, gap)
        tracer.step_to(crash_level * (1.0 + rel))
        if path is not None:
            path.append((tracer.g, tracer.point))


def trace_ray(p, theta, g_end, collect=False):
    """Follow the ray at angle theta from the entry level down to g_end.

    Returns the final ray point, or the [(level, point), ...] polyline when
    ``collect`` is set.
    """
    if g_end <= 0:
        raise ValueError("target level must be positive")
    tracer = RayTracer(p, theta)
    if g_end >= tracer.g:
        raise ValueError("target level above the entry level")
    path = [(tracer.g, tracer.point)] if collect else None
    descend(tracer, g_end, path)
    return path if collect else tracer.point


def trace_ray_to_crash(p, theta, crash_level, gap=1e-13, collect=False):
    """Descend toward a crash level; returns the final point (or polyline)."""
    tracer = RayTracer(p, theta)
    path = [(tracer.g, tracer.point)] if collect else None
    descend_to_crash(tracer, crash_level, gap, path)
    return path if collect else tracer.point
