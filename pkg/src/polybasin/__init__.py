"""Topological conjugacy certificates for complex polynomials restricted to
their basin of attraction of infinity.

The pipeline: extract the escaping critical data of a polynomial (potential
levels, external angles, crashing rays), encode it as a symbolic critical
portrait, run the deterministic component-enumeration walk to produce an
invariant certificate (a labelled semi-interval plus the map degree), and
decide topological equivalence by comparing certificates.  A grid-based
flood-fill oracle independently validates the combinatorics.
"""

from . import angles, errors
from .dynamics import (
    CriticalOrbitRecord,
    GreenEstimate,
    PortraitExtraction,
    critical_points,
    extract_portrait,
    external_angle,
    green,
    invariant_of,
    polys_equivalent,
    portrait_of,
)
from .invariant import (
    ComponentNumber,
    CriticalLabel,
    DistinguishingGraph,
    InvariantCertificate,
    LabelledPoint,
    PreimageFraction,
    canonical_sequence,
    certificate_from_json,
    certificate_to_json,
    certificates_equivalent,
    cyclic_between,
    frac_eq,
    frac_make,
    graph_validate,
    graphs_equivalent,
    label_eq,
)
from .oracle import (
    ComponentMap,
    GridField,
    band_components,
    component_of,
    consistency_report,
    green_grid,
)
from .poly import (
    ComplexPolynomial,
    affine_conjugate,
    escape_radius,
    polynomial_from_json,
    polynomial_to_json,
)
from .portrait import (
    ArcPartition,
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

__version__ = "0.1.0"
