"""Two-species competition dynamics on finite weighted graphs.

Discrete Laplacians with reflecting or absorbing boundaries, explicit
time integration, smallest Dirichlet eigenpairs, long-time regime
classification, and monotone upper/lower-solution machinery.
"""

from .classify import (
    Certificate,
    CoexistencePoint,
    PredictedLimit,
    Regime,
    RegimeKind,
    classify_bistable_basin,
    classify_dirichlet,
    classify_neumann,
    coexistence_point,
    eigenpairs_for,
    predicted_limit,
)
from .dynamics import (
    BoundaryCondition,
    CompetitionParams,
    FieldPair,
    Problem,
    Trajectory,
    integrate,
    invariant_rectangle,
    neumann_project,
    reaction,
    sample_times,
    stable_dt,
)
from .errors import GraphLVError, InputError, NumericalError
from .graphs import (
    DomainMode,
    DomainPartition,
    WeightedGraph,
    boundary_of,
    build_graph,
    dirichlet_blocks,
    field_array,
    laplacian_apply,
    normal_derivative,
    whole_laplacian,
)
from .monotone import (
    CoexistenceBounds,
    LinearCoupledSystem,
    MaxPrincipleReport,
    OrderedPair,
    PairReport,
    SteadyState,
    TimeField,
    analytic_envelopes,
    coexistence_bounds,
    constant_pair,
    logistic_steady_state,
    maximum_principle_check,
    monotone_solve,
    pair_from_trajectory,
    verify_coupled_pair,
)
from .spectral import EigenPair, smallest_dirichlet_eigenpair

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "Certificate",
    "CoexistenceBounds",
    "CoexistencePoint",
    "CompetitionParams",
    "DomainMode",
    "DomainPartition",
    "EigenPair",
    "FieldPair",
    "GraphLVError",
    "InputError",
    "LinearCoupledSystem",
    "MaxPrincipleReport",
    "NumericalError",
    "OrderedPair",
    "PairReport",
    "PredictedLimit",
    "Problem",
    "Regime",
    "RegimeKind",
    "SteadyState",
    "TimeField",
    "Trajectory",
    "WeightedGraph",
    "analytic_envelopes",
    "boundary_of",
    "build_graph",
    "classify_bistable_basin",
    "classify_dirichlet",
    "classify_neumann",
    "coexistence_bounds",
    "coexistence_point",
    "constant_pair",
    "dirichlet_blocks",
    "eigenpairs_for",
    "field_array",
    "integrate",
    "invariant_rectangle",
    "laplacian_apply",
    "logistic_steady_state",
    "maximum_principle_check",
    "monotone_solve",
    "neumann_project",
    "normal_derivative",
    "pair_from_trajectory",
    "predicted_limit",
    "reaction",
    "sample_times",
    "smallest_dirichlet_eigenpair",
    "stable_dt",
    "verify_coupled_pair",
    "whole_laplacian",
]
