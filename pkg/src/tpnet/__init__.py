"""Tensor-product randomized-basis solver for PDEs.

Two frozen random subnetworks produce ``p`` features each; their ``p**2``
pairwise products form the basis, and only the output coefficients are
fitted, by one dense least-squares solve over collocation equations.
"""
from .basis import FieldJet, NetworkBasis, TensorBasis
from .errors import (
    BlockFailure,
    DomainError,
    InputError,
    InvalidSpecError,
    NumericOverflowError,
    RankZeroError,
    ShapeError,
    TPNetError,
    UnknownProblemError,
    UnsupportedOperatorError,
)
from .lstsq import LstsqResult, SvdFactorization, solve_lstsq
from .operators import LinearOperator, d1, d2, identity, laplacian
from .problems import PdeProblem, assemble_linear_system, catalog, problem_names
from .sampling import CollocationSet, Domain, sample_lhs, sample_uniform_grid
from .solvers import (
    ErrorReport,
    Solution,
    SolverConfig,
    block_time_march,
    compute_errors,
    evaluate,
    load_solution,
    save_solution,
    solve,
    solve_linear,
    solve_nonlinear_picard,
)
from .subnetworks import SubnetworkSpec, eval_jets, init_subnetwork

__version__ = "0.1.0"

__all__ = [
    "FieldJet",
    "NetworkBasis",
    "TensorBasis",
    "BlockFailure",
    "DomainError",
    "InputError",
    "InvalidSpecError",
    "NumericOverflowError",
    "RankZeroError",
    "ShapeError",
    "TPNetError",
    "UnknownProblemError",
    "UnsupportedOperatorError",
    "LstsqResult",
    "SvdFactorization",
    "solve_lstsq",
    "LinearOperator",
    "d1",
    "d2",
    "identity",
    "laplacian",
    "PdeProblem",
    "assemble_linear_system",
    "catalog",
    "problem_names",
    "CollocationSet",
    "Domain",
    "sample_lhs",
    "sample_uniform_grid",
    "ErrorReport",
    "Solution",
    "SolverConfig",
    "block_time_march",
    "compute_errors",
    "evaluate",
    "load_solution",
    "save_solution",
    "solve",
    "solve_linear",
    "solve_nonlinear_picard",
    "SubnetworkSpec",
    "eval_jets",
    "init_subnetwork",
]
