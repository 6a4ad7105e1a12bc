"""Weak-topology machinery on Hadamard spaces, made computational.

Four model spaces (Euclidean R^n, the spike, the book of triangles and the
hyperbolic half-plane) with exact geodesics, closest-point projections,
elementary sets, weak-convergence reports and numeric witnesses.
"""

__version__ = "0.1.0"

from .core import (
    DEFAULT_TOLERANCE,
    Geodesic,
    HadamardError,
    InputError,
    NumericalError,
    Point,
    PreconditionError,
    Space,
    ToleranceConfig,
    check_cn_inequality,
    distance,
    geodesic_point,
    midpoint,
)
from .projection import ProjectionResult, project, project_to_ball, project_to_geodesic
from .spaces import (
    Book,
    ClosedBall,
    ConvexBody,
    Euclidean,
    HalfPlane,
    Spike,
    make_book,
    make_euclidean,
    make_halfplane,
    make_spike,
    space_from_dict,
)
from .topology import (
    ConvergenceReport,
    Membership,
    Verdict,
    check_convex_complement,
    check_preimage_identity,
    cone_cover_certificate,
    halfspace_formula_check,
    in_elementary_set,
    make_net,
    weak_convergence_report,
)
from .properties import (
    Fingerprint,
    PropertyName,
    Witness,
    WitnessKind,
    book_witness_tw_ne_tg,
    check_fingerprint_separation,
    check_property_N,
    check_q4,
    fingerprint,
    search_counterexamples,
    verify_witness,
)
