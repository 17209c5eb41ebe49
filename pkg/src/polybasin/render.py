"""Static SVG/CSV views of the basin structure: equipotential curves,
external rays crashing at the critical points, and colored preimage-band
component maps.  All output is a pure function of input and configuration,
with fixed-precision coordinates, so files are byte-reproducible.
"""

import numpy as np
from skimage import measure

from . import angles as ang
from . import rays
from .errors import RayTraceFailure

_PALETTE = ("#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
            "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd")


def _fmt(x):
    return f"{x:.6f}"


def _svg_open(field, size):
    half = field.half
    cx, cy = field.center.real, field.center.imag
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{size}" height="{size}" '
        f'viewBox="{_fmt(cx - half)} {_fmt(cy - half)} '
        f'{_fmt(2 * half)} {_fmt(2 * half)}">',
        f'<rect x="{_fmt(cx - half)}" y="{_fmt(cy - half)}" '
        f'width="{_fmt(2 * half)}" height="{_fmt(2 * half)}" fill="white"/>',
    ]


def _polyline(points, color, width):
    coords = " ".join(f"{_fmt(z.real)},{_fmt(z.imag)}" for z in points)
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(width)}"/>')


def _contours_at(field, level):
    """Marching-squares contours of the potential at one level, mapped from
    pixel space to the complex plane."""
    values = np.where(np.isnan(field.values), -1e30, field.values)
    out = []
    for contour in measure.find_contours(values, level):
        pts = [field.z_at(row, col) for row, col in contour]
        out.append(pts)
    return out


def svg_equipotentials(field, levels, size=800):
    """Closed level curves of the potential at the given levels."""
    parts = _svg_open(field, size)
    width = field.half / 400.0
    for i, level in enumerate(sorted(levels)):
        color = _PALETTE[i % len(_PALETTE)]
        for pts in _contours_at(field, level):
            parts.append(_polyline(pts, color, width))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_rays(p, extraction, field, size=800, top_level=None):
    """External rays at each critical point's traced co-angles, drawn from
    the outer ring level down to the crash."""
    parts = _svg_open(field, size)
    width = field.half / 400.0
    m = p.degree
    if top_level is None:
        top_level = m * m * extraction.green_star
    for i, rec in enumerate(extraction.records):
        color = _PALETTE[i % len(_PALETTE)]
        for theta in rec.co_angles_traced:
            try:
                tracer = rays.RayTracer(p, ang.as_float(theta))
                path = []
                rays.descend(tracer, top_level, path)
                path = [(tracer.g, tracer.point)]
                rays.descend_to_crash(tracer, rec.green_level.value,
                                      gap=1e-9, path=path)
            except RayTraceFailure:
                continue
            pts = [z for _, z in path] + [rec.point]
            parts.append(_polyline(pts, color, width))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_regions(cmap, size=800):
    """Colored component map of one preimage band, row-run-length encoded."""
    field = cmap.field
    parts = _svg_open(field, size)
    px = field.pixel
    labels = cmap.labels
    n = field.resolution
    x0 = field.center.real - field.half
    y0 = field.center.imag - field.half
    for row in range(n):
        col = 0
        while col < n:
            rid = int(labels[row, col])
            run = col
            while run < n and int(labels[row, run]) == rid:
                run += 1
            if rid > 0:
                color = _PALETTE[(rid - 1) % len(_PALETTE)]
                parts.append(
                    f'<rect x="{_fmt(x0 + col * px)}" y="{_fmt(y0 + row * px)}" '
                    f'width="{_fmt((run - col) * px)}" height="{_fmt(px)}" '
                    f'fill="{color}"/>')
            col = run
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
