"""Exact computations around the pentagram map."""
from .projective import (PentalabError, ProjMap, cross_ratio, cross_ratio_collinear, join, meet,
                         omega_invariants)
from .invariants import eval_E, eval_O, invariant_tuple, mod4_products
from .dynamics import (TwistedPolygon, alpha1, alpha2, closed_polygon, extract_invariants,
                       is_degenerate, pentagram_step)
from .reconstruct import build_polyline, build_polypoint, omega_from_invariants
from .condensation import (bareiss_det, circulent_to_pentagram, collapse_experiment, dodgson_det,
                           lift_pentagram, octahedron_step)
from .vanishing import independence_check, lambda_direct, lambda_via_measures, vanishing_check

__version__ = "0.1.0"
