"""Angle arithmetic on the unit circle [0, 1).

Angles are either floats or ``fractions.Fraction``; rational angles stay
exact through every operation, floats go through ordinary IEEE arithmetic.
Mixing the two demotes to float.
"""

from fractions import Fraction

from .errors import ParseError

Angle = float | Fraction

#: tolerance for float angular comparisons
EPS_ANGLE = 1e-6


def is_exact(a):
    return isinstance(a, Fraction)


def norm1(a):
    """Reduce an angle mod 1 into [0, 1).

    Guards against the float quirk where tiny negative values wrap to
    exactly 1.0 under ``%``.
    """
    r = a % 1
    if not isinstance(r, Fraction) and r >= 1.0:
        return 0.0
    return r


def as_float(a):
    return float(a)


def parse_angle(value):
    """Read an angle from a JSON value: a number, or a ``"p/q"`` string."""
    if isinstance(value, str):
        try:
            num, _, den = value.partition("/")
            frac = Fraction(int(num), int(den)) if den else Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational angle {value!r}") from exc
        return norm1(frac)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"bad angle value {value!r}")
    return norm1(float(value))


def format_angle(a):
    """JSON representation: Fractions as ``"p/q"`` strings, floats as numbers."""
    if is_exact(a):
        return f"{a.numerator}/{a.denominator}"
    return float(a)


def ccw_gap(a, b):
    """Counterclockwise distance from a to b, in [0, 1)."""
    return norm1(b - a)


def cyc_dist(a, b):
    """Shortest circular distance between two angles."""
    g = as_float(ccw_gap(a, b))
    return min(g, 1.0 - g)


def times_pow(a, base, power):
    """``a * base**power`` mod 1; exact for rational ``a``."""
    if is_exact(a):
        return norm1(a * Fraction(base) ** power)
    return norm1(as_float(a) * float(base) ** power)
