"""Exact-arithmetic conversions between mixed-integer Chvatal systems and
projections of mixed-integer linear systems, with brute-force certificates.
"""

from .closure import (ClosureOptions, Cone, FeasibilityFunctions, GeneratingSet,
                      TdiAggregator, closure_step, cone_contains,
                      feasibility_functions, hilbert_generating_set,
                      is_pointed, reduce_generating_set, tdi_aggregator,
                      zonotope_integer_points)
from .errors import (CapExceededError, DimensionMismatchError, MicrepError,
                     SystemFileError, TreeSyntaxError, UnboundVariableError,
                     ValidationError)
from .fm import (IntegerChain, LinearSystem, SymbolicSystem, eliminate_all,
                 eliminate_var, feasible_point, lp_min, project_cone, prune)
from .lift import NoCeilingError, lift_to_milp, reduce_one_ceiling
from .oracle import (Box, EqualityReport, check_projection_equality,
                     dmic_member, mic_member, milp_feasible)
from .project import (eliminate_variable, eliminate_variables,
                      monoid_representation, project_to_mic)
from .rationals import Rational, format_rational, parse_rational, rational
from .systems import ChvatalIneq, MicSystem, MilpRow, MilpSystem, affine_ineq
from .trees import (AffineForm, Case1, Case2, Ceil, ChvatalTree, Leaf, Scale,
                    Sum, ceiling_count, compose_affine, decompose, depth,
                    evaluate, format_tree, interval_evaluate, is_homogeneous,
                    leaf, parse_tree, tree_as_affine, weighted_sum)
from .varpool import fresh_var, intern_var, var_name

__all__ = [name for name in dir() if not name.startswith("_")]
