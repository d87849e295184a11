"""Exact and numerical toolkit for bracket-generating tangent
distributions: Lie flags and growth vectors, annihilator geometry and
characteristic kernels, jets of horizontal curves with their lifting maps,
endpoint-map classification of regular versus singular (abnormal) curves,
and desk-scale dimension audits over declared strata."""

__version__ = "0.1.0"

from .annihilator import (CovectorPoint, KernelBasis, annihilator_level,
                          characteristic_kernel, eta_act,
                          integrate_characteristic, liouville_two_form,
                          restricted_kernel, verify_corank,
                          verify_lifting_identity)
from .distribution import (Distribution, FlagReport, GrowthVector,
                           bracket_generating_step, curvature_at,
                           growth_vector_at, lie_flag)
from .endpoint import (ClassificationReport, ClassifyOptions, ControlCurve,
                       HorizontalPath, classify_curve, deform_fixed_endpoints,
                       endpoint, lift_curve, reduced_endpoint,
                       variational_endpoint_family, variational_jacobian)
from .errors import HliftError, InputError, NumericalError, PreconditionError
from .forms import (PolyOneForm, PolyTwoForm, PolyVectorField,
                    exterior_derivative, interior_product, lie_bracket, wedge)
from .jets import (CurveJet, DimensionAudit, ehresmann_jet_lift,
                   inadmissible_codim_bound, is_characteristic_jet,
                   is_horizontal_jet, jet_project, pullback_oneform_by_jet,
                   rho_act, submanifold_family_dimension,
                   tangency_family_dimension)
from .poly import MultiPoly, poly_eval, poly_parse
from .series import TaylorSeries, poly_on_series
from .strata import (FunctionMatrix, GridAxis, RankPartitionReport,
                     StratumSpec, minors, partition_grid, rank_at,
                     two_form_rank_on_subvariety, two_form_rank_via_wedge)

__all__ = [name for name in dir() if not name.startswith("_")]
