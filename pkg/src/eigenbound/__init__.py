"""Certified two-sided bounds for mixed principal eigenvalues of
one-dimensional elliptic operators a(x) f'' + b(x) f' on (0, D).

The library computes the positivity criterion constant, basic and improved
two-sided estimates, monotone approximating sequences for both sides, the
centered sequence for the double-Neumann spectral gap, and validates every
bound against an independent finite-volume eigensolver.
"""

__version__ = "0.1.0"

from .bounds import BoundsReport, basic_bounds, compute_report, delta, delta1, delta1_prime
from .errors import (
    ConfigError,
    CriterionDegenerateError,
    DegenerationError,
    DivergenceError,
    DomainError,
    EigenboundError,
    HypothesisViolationError,
    LexError,
    ParseError,
    RangeError,
)
from .expr import parse_expression, validate_positive
from .iterate import IterationTrace, eta_sequence, lower_sequence, upper_sequence_dn, upper_sequence_nd
from .measures import (
    MeasureTable,
    ProblemSpec,
    Tolerances,
    build_tables,
    hypothesis_check,
    make_problem,
    truncate,
)
from .oracle import (
    EigenSolution,
    dual_table,
    duality_pair,
    eigen_residuals,
    fd_eigensolve,
    infinite_domain_limit,
    solve_on_table,
)
from .testfn import GridFunction, center, dirichlet_energy, l2_norm_sq, localized_dn, localized_nd, power, seed_function
from .variational import (
    OperatorValue,
    double_integral_form,
    dual_differential_form,
    differential_form,
    lower_bound,
    single_integral_form,
    upper_bound,
)

__all__ = [
    "__version__",
    "BoundsReport",
    "ConfigError",
    "CriterionDegenerateError",
    "DegenerationError",
    "DivergenceError",
    "DomainError",
    "EigenboundError",
    "EigenSolution",
    "GridFunction",
    "HypothesisViolationError",
    "IterationTrace",
    "LexError",
    "MeasureTable",
    "OperatorValue",
    "ParseError",
    "ProblemSpec",
    "RangeError",
    "Tolerances",
    "basic_bounds",
    "build_tables",
    "center",
    "compute_report",
    "delta",
    "delta1",
    "delta1_prime",
    "dirichlet_energy",
    "double_integral_form",
    "dual_differential_form",
    "dual_table",
    "differential_form",
    "duality_pair",
    "eigen_residuals",
    "eta_sequence",
    "fd_eigensolve",
    "hypothesis_check",
    "infinite_domain_limit",
    "l2_norm_sq",
    "localized_dn",
    "localized_nd",
    "lower_bound",
    "lower_sequence",
    "make_problem",
    "parse_expression",
    "power",
    "seed_function",
    "single_integral_form",
    "solve_on_table",
    "truncate",
    "upper_bound",
    "upper_sequence_dn",
    "upper_sequence_nd",
    "validate_positive",
]
