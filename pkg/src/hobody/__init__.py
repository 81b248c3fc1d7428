"""Higher-order projection, centroid and radial mean bodies with numerical verification."""

from .bodies import Ellipsoid, Polytope, ball, cross_polytope, hull_from_vertices, random_polytope, simplex, unit_cube
from .centroid import CentroidBody, centroid_support, dual_mixed_vol_neg1, duality_check, random_simplex_expectation
from .covariogram import DifferenceBody, covariogram_derivative_check, diff_body_radial, m_covariogram
from .errors import HobodyError
from .projection import petty_product, polar_proj_oracle, proj_support
from .quadrature import MCEstimate, StarBody, mc_sphere_integral, sphere_sample, star_body_volume
from .radialmean import berwald_chain_check, rmb_radial, rmb_volume_identity
from .symmetrize import HigherSymmetral, SteinerSymmetral, higher_steiner_membership, steiner

__version__ = "0.1.0"

__all__ = [
    "CentroidBody",
    "DifferenceBody",
    "Ellipsoid",
    "HigherSymmetral",
    "HobodyError",
    "MCEstimate",
    "Polytope",
    "StarBody",
    "SteinerSymmetral",
    "ball",
    "berwald_chain_check",
    "centroid_support",
    "covariogram_derivative_check",
    "cross_polytope",
    "diff_body_radial",
    "dual_mixed_vol_neg1",
    "duality_check",
    "higher_steiner_membership",
    "hull_from_vertices",
    "m_covariogram",
    "mc_sphere_integral",
    "petty_product",
    "polar_proj_oracle",
    "proj_support",
    "random_polytope",
    "random_simplex_expectation",
    "rmb_radial",
    "rmb_volume_identity",
    "simplex",
    "sphere_sample",
    "star_body_volume",
    "steiner",
    "unit_cube",
]
