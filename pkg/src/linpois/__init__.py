"""linpois: exact probabilities for integer linear combinations of
independent Poisson variables.

Y = A X with A a natural-number matrix and X_i ~ Poisson(lambda_i).
P(Y = b) is computed exactly in integer/rational arithmetic up to the
final log-space summation, via a one-parameter solution line (Smith
normal form), the closed form for invertible A, or brute-force
enumeration; a seeded Monte Carlo harness cross-checks the results.
"""

from .errors import (
    InputError,
    InternalInvariantError,
    LinpoisError,
    MethodNotApplicableError,
    SingularMatrixError,
)
from .intlinalg import (
    SnfDecomposition,
    det_exact,
    format_matrix_text,
    int_identity,
    int_matrix,
    int_vector,
    inverse_rational,
    minor_gcd,
    parse_matrix_text,
    rank,
    snf,
)
from .kernels import HAVE_NUMBA, default_backend, poisson_cdf_table, uniform53
from .model import PoissonModel, load_model_file, model_from_dict
from .montecarlo import RngState, SampleReport, sample_many, sample_x, verify
from .pmf import (
    PmfResult,
    gf_eval,
    gf_eval_series,
    log_term,
    logsumexp,
    pmf,
    pmf_enumerate,
    pmf_invertible,
    pmf_single_index,
    pmf_table,
    solution_family,
)
from .solutions import (
    MethodTag,
    PreprocessReport,
    RowRelation,
    SolutionFamily,
    classify,
    enumerate_solutions,
    parametrize_single_index,
    preprocess,
    solve_invertible,
)

__version__ = "0.1.0"

__all__ = [
    "LinpoisError",
    "InputError",
    "SingularMatrixError",
    "MethodNotApplicableError",
    "InternalInvariantError",
    "int_matrix",
    "int_identity",
    "int_vector",
    "SnfDecomposition",
    "snf",
    "det_exact",
    "rank",
    "inverse_rational",
    "minor_gcd",
    "parse_matrix_text",
    "format_matrix_text",
    "MethodTag",
    "SolutionFamily",
    "RowRelation",
    "PreprocessReport",
    "classify",
    "parametrize_single_index",
    "solve_invertible",
    "enumerate_solutions",
    "preprocess",
    "PoissonModel",
    "model_from_dict",
    "load_model_file",
    "PmfResult",
    "log_term",
    "logsumexp",
    "solution_family",
    "pmf",
    "pmf_single_index",
    "pmf_invertible",
    "pmf_enumerate",
    "gf_eval",
    "gf_eval_series",
    "pmf_table",
    "RngState",
    "SampleReport",
    "sample_x",
    "sample_many",
    "verify",
    "HAVE_NUMBA",
    "default_backend",
    "uniform53",
    "poisson_cdf_table",
    "__version__",
]
