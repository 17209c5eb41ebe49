"""Complex polynomials with coefficient-level helpers.

Coefficients are stored ascending by power.  Non-monic polynomials are fully
supported; the leading coefficient feeds the escape-rate normalization
constant log|a_m|/(m-1) used throughout the numerics.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial a_0 + a_1 z + ... + a_m z**m with m >= 2 and a_m != 0."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        if len(coeffs) < 3:
            raise ValueError("degree must be at least 2")
        if coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    @property
    def leading(self):
        return self.coefficients[-1]

    def __call__(self, z):
        acc = 0j
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def derivative_coefficients(self, order=1):
        coeffs = list(self.coefficients)
        for _ in range(order):
            coeffs = [i * c for i, c in enumerate(coeffs)][1:]
            if not coeffs:
                return (0j,)
        return tuple(coeffs)

    def derivative(self, z, order=1):
        acc = 0j
        for c in reversed(self.derivative_coefficients(order)):
            acc = acc * z + c
        return acc

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coefficients):
            if c != 0:
                terms.append(f"({c.real:+g}{c.imag:+g}j)z^{i}")
        return " + ".join(terms) or "0"


def horner_array(p, z):
    """Vectorized evaluation on a numpy array."""
    acc = np.zeros_like(z)
    for c in reversed(p.coefficients):
        acc = acc * z + c
    return acc


def ratio_to_power(p, z):
    """p(z) / z**m evaluated stably via a Horner scheme in 1/z.

    Never overflows for |z| >= 1, which is what the escape-rate telescoping
    needs once the orbit has left the unit disk.
    """
    w = 1 / z
    acc = 0j
    for c in p.coefficients:
        acc = acc * w + c
    return acc


def gamma_constant(p):
    """log|a_m| / (m - 1): the escape-rate normalization constant."""
    return math.log(abs(p.leading)) / (p.degree - 1)


def escape_radius(p):
    """Radius beyond which |p(z)| >= 2|z| is guaranteed.

    Derived from |p(z)| >= |z|**(m-1) (|a_m||z| - S) for |z| >= 1 with
    S the sum of the non-leading coefficient magnitudes: it suffices that
    |a_m||z| - S >= 2, doubled for margin.
    """
    S = sum(abs(c) for c in p.coefficients[:-1])
    return max(2.0, 2.0 * (S + 2.0) / abs(p.leading))


def tail_coefficient_sum(p):
    """A = sum_{i<m} |a_i| / |a_m|, the scale of the 1/z expansion tail."""
    return sum(abs(c) for c in p.coefficients[:-1]) / abs(p.leading)


def affine_conjugate(p, a, b):
    """The polynomial phi o p o phi^{-1} for phi(z) = a z + b."""
    if a == 0:
        raise ValueError("affine map must be invertible")
    inner = np.array([-b / a, 1 / a], dtype=complex)
    acc = np.array([p.coefficients[-1]], dtype=complex)
    for c in reversed(p.coefficients[:-1]):
        acc = np.polynomial.polynomial.polymul(acc, inner)
        acc[0] += c
    acc = a * acc
    acc[0] += b
    return ComplexPolynomial(tuple(acc))


def polynomial_to_obj(p):
    return {"coefficients": [[c.real, c.imag] for c in p.coefficients]}


def polynomial_from_obj(obj):
    try:
        coeffs = tuple(complex(re, im) for re, im in obj["coefficients"])
        return ComplexPolynomial(coeffs)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad polynomial document: {exc}") from exc


def polynomial_to_json(p):
    return json.dumps(polynomial_to_obj(p), indent=2) + "\n"


def polynomial_from_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return polynomial_from_obj(obj)
