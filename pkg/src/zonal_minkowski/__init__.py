"""Zonal Minkowski endomorphisms and valuations on the sphere."""

__all__ = ["GegenbauerBasis", "gauss_rule", "omega", "kappa", "ZonalFunction", "ZonalMeasure", "sphere_integral",
           "berg_apply", "box_n", "convolve", "cosine_transform", "inverse_cosine_even", "BodyRev", "area_density",
           "area_measure", "double_cone_S1", "sample_body", "cone_membership", "firey_check",
           "is_generating_function", "weil_psi", "Endomorphism", "apply", "is_weakly_monotone",
           "nonmonotone_construct", "HomValuation", "apply_valuation", "decomposition_experiment"]

__version__ = "0.1.0"

from .sphere import GegenbauerBasis, gauss_rule, omega, kappa
from .zonal import ZonalFunction, ZonalMeasure, sphere_integral
from .harmonic import berg_apply, box_n, convolve, cosine_transform, inverse_cosine_even
from .bodies import BodyRev, area_density, area_measure, double_cone_S1, sample_body
from .cones import cone_membership, firey_check, is_generating_function, weil_psi
from .endomorphisms import Endomorphism, apply, is_weakly_monotone, nonmonotone_construct
from .valuations import HomValuation, apply_valuation, decomposition_experiment
