"""Certified lower bounds and global minimizers for sums of small polynomials.

The pipeline: express the objective as a sum of low dimensional summands
(SparseSum), build a semidefinite relaxation whose blocks follow that
structure (build_relaxation), solve it with the embedded interior point
method (solve), and read minimizers back out of the moment blocks
(extract_solution).  ``run_pipeline`` chains the steps and returns a
self-contained report.
"""

from .poly import (
    Clique,
    DecompositionError,
    Exponent,
    ParseError,
    Polynomial,
    SparseSum,
    monomial_decompose,
    monomials,
    parse_polynomial,
)
from .sdp import (
    LmiBlock,
    LmiSdp,
    SdpSolution,
    SolverConfig,
    SolverStatus,
    export_sdpa,
    solve,
)
from .relax import RelaxationInfo, RelaxationKind, build_relaxation, verify_sos_certificate
from .extract import ExtractionResult, accuracy, extract_solution, flat_extension_check
from .apps import (
    BenchmarkFamily,
    BenchmarkSpec,
    BvpSpec,
    SnlInstance,
    benchmark,
    bvp_basic,
    bvp_cubic_forcing,
    bvp_discretize,
    chain_quadratic_system,
    nls_from_system,
    random_clique_instance,
    random_dense_instance,
    rmsd,
    snl_generate,
    snl_objective,
)
from .cli import Report, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "Clique",
    "DecompositionError",
    "Exponent",
    "ParseError",
    "Polynomial",
    "SparseSum",
    "monomial_decompose",
    "monomials",
    "parse_polynomial",
    "LmiBlock",
    "LmiSdp",
    "SdpSolution",
    "SolverConfig",
    "SolverStatus",
    "export_sdpa",
    "solve",
    "RelaxationInfo",
    "RelaxationKind",
    "build_relaxation",
    "verify_sos_certificate",
    "ExtractionResult",
    "accuracy",
    "extract_solution",
    "flat_extension_check",
    "BenchmarkFamily",
    "BenchmarkSpec",
    "BvpSpec",
    "SnlInstance",
    "benchmark",
    "bvp_basic",
    "bvp_cubic_forcing",
    "bvp_discretize",
    "chain_quadratic_system",
    "nls_from_system",
    "random_clique_instance",
    "random_dense_instance",
    "rmsd",
    "snl_generate",
    "snl_objective",
    "Report",
    "run_pipeline",
    "__version__",
]
