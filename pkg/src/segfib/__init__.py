"""Lattice segmental fibrations: gap vectors of polytopal monoids and lifted unimodular triangulations."""

from .families import (
    AffineMap,
    IntervalQuadruple,
    NakajimaSpec,
    build_family,
    check_fibration,
    make_nakajima,
    make_nakajima_tower,
    make_pm,
    make_segment_polytope,
    product_with_segment,
)
from .lattice import SublatticeBasis, hnf, lattice_span, smith, smith_summand_check
from .monoid import (
    EhrhartPolynomial,
    GapReport,
    PointConfig,
    ehrhart_polynomial,
    gap_vector,
    generated_slices,
    is_integrally_closed,
    is_smooth,
    is_unimodular_simplex,
    is_very_ample,
    normalized_slices,
    rarify,
)
from .cones import hilbert_basis
from .polytope import LatticePolytope, convex_hull, enumerate_lattice_points
from .triangulation import (
    FaceCompatibilityError,
    TriangulationComplex,
    build_pi_triangulation,
    fibered_subdivision,
    is_flag,
    is_regular,
    is_unimodular_triangulation,
    refines,
    verify_complex,
)

__version__ = "0.1.0"
