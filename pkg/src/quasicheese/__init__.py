"""Swiss cheese constructions, path calculus and Denjoy-Carleman bound certificates."""

__version__ = "0.1.0"

from .geometry import (AbstractSwissCheese, ClassicalityReport, Disk, circle_in_cheese,
                       contains_point, empty_interior_witness, is_classical, rho)
from .paths import (Arc, Line, Path, Polyline, QuadratureResult, arclength_parametrize,
                    check_cohen_taylor_bound, check_F_derivative,
                    check_pathwise_derivative_bound, contour_integral, length, reverse, subpath)
from .rational_jets import (Jet, RationalFunction, eval_jet, sup_jet_on_circle,
                            sup_on_cheese)
from .sequences import (Divergence, MinorantResult, PositiveSequence, classify_divergence,
                        dales_davie_norm, dc_partial_sums, f_analytic_statistic,
                        is_algebra_sequence, is_log_convex, log_convex_minorant)
from .cohen_engine import (BTable, PropagationCertificate, b_table, easycase_bound,
                           propagate_vanishing_bound, verify_cohen_bounds)
from .cheese_estimates import (DistanceProfile, cheese_derivative_bound, distance_profile,
                               verify_cheese_bound)
from .construction import (AnnulusSpec, ConstructionResult, build_construction, choose_gamma,
                           quasianalyticity_certificate, regular_annulus_cheese)

__all__ = [
    "AbstractSwissCheese", "ClassicalityReport", "Disk", "circle_in_cheese", "contains_point",
    "empty_interior_witness", "is_classical", "rho",
    "Arc", "Line", "Path", "Polyline", "QuadratureResult", "arclength_parametrize",
    "check_cohen_taylor_bound", "check_F_derivative", "check_pathwise_derivative_bound",
    "contour_integral", "length", "reverse", "subpath",
    "Jet", "RationalFunction", "eval_jet", "sup_jet_on_circle", "sup_on_cheese",
    "Divergence", "MinorantResult", "PositiveSequence", "classify_divergence",
    "dales_davie_norm", "dc_partial_sums", "f_analytic_statistic", "is_algebra_sequence",
    "is_log_convex", "log_convex_minorant",
    "BTable", "PropagationCertificate", "b_table", "easycase_bound",
    "propagate_vanishing_bound", "verify_cohen_bounds",
    "DistanceProfile", "cheese_derivative_bound", "distance_profile", "verify_cheese_bound",
    "AnnulusSpec", "ConstructionResult", "build_construction", "choose_gamma",
    "quasianalyticity_certificate", "regular_annulus_cheese",
]
