"""Completability analysis for partially sampled two-view low-rank matrices.

Given a sampling pattern and the three rank constraints (each view and the
joint matrix), this package decides whether the observed entries pin the
matrix down to finitely many or exactly one completion, cross-checks the
combinatorial decision against a generic Jacobian-rank computation, and
evaluates the probabilistic per-column sample bounds.
"""

from .bounds import (
    BoundReport,
    baseline_sample_bound,
    bernoulli_success_probability,
    check_dimension_assumptions,
    finite_sample_bound,
    probability_bounds,
    unique_sample_bound,
)
from .basis import canonicalize, is_canonical, is_span_equivalent, solve_coefficients
from .checker import (
    Status,
    Verdict,
    check_finite,
    check_unique,
    count_bound,
    decide_finite,
    single_view_condition,
    verify_candidate,
)
from .constraint import (
    ColumnSubset,
    ConstraintColumn,
    ConstraintMatrix,
    build_constraint,
    nonzero_rows,
    split_by_view,
)
from .core import (
    ProblemShape,
    RankTriple,
    basis_dof,
    derived_ranks,
    has_min_samples_per_column,
)
from .oracle import (
    OracleConfig,
    OracleReport,
    PolynomialSystem,
    build_system,
    finiteness_oracle,
    independent_count,
    jacobian_generic_rank,
)
from .pattern import (
    GenericInstance,
    SamplingPattern,
    gen_bernoulli,
    gen_fixed_per_column,
    gen_generic_instance,
    load_pattern,
    parse_pattern,
    save_pattern,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ColumnSubset",
    "ConstraintColumn",
    "ConstraintMatrix",
    "GenericInstance",
    "OracleConfig",
    "OracleReport",
    "PolynomialSystem",
    "ProblemShape",
    "RankTriple",
    "SamplingPattern",
    "Status",
    "Verdict",
    "baseline_sample_bound",
    "basis_dof",
    "bernoulli_success_probability",
    "build_constraint",
    "build_system",
    "canonicalize",
    "check_dimension_assumptions",
    "check_finite",
    "check_unique",
    "count_bound",
    "decide_finite",
    "derived_ranks",
    "finite_sample_bound",
    "finiteness_oracle",
    "gen_bernoulli",
    "gen_fixed_per_column",
    "gen_generic_instance",
    "has_min_samples_per_column",
    "independent_count",
    "is_canonical",
    "is_span_equivalent",
    "jacobian_generic_rank",
    "load_pattern",
    "nonzero_rows",
    "parse_pattern",
    "probability_bounds",
    "save_pattern",
    "single_view_condition",
    "solve_coefficients",
    "split_by_view",
    "unique_sample_bound",
    "verify_candidate",
]
