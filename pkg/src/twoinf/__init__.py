"""Matrix-free estimation of two-to-infinity and one-to-two operator norms.

The two-to-infinity norm of a matrix is its maximum row l2 norm; the
one-to-two norm is the maximum column l2 norm.  This package estimates
both using only matrix-vector products with ``A`` and ``A^T``, by
locating the largest diagonal entry of the Gram operator ``A A^T``
through seeded stochastic diagonal estimation, with an optional
sketch-and-deflate variance reduction, and then measuring the selected
row's norm exactly.  A benchmark harness compares the estimators against
power-iteration and diagonal-averaging baselines at matched matvec
budgets.
"""

from .oplib import DeflatedGramOp, DenseMatrix, GramOp, LinearOp, TransposedOp
from .sketch import (
    DiagEstimate,
    RngStream,
    hutchinson_diag,
    hutchpp_diag,
    lowrank_diag,
    rademacher_vector,
    thin_qr,
)
from .estimators import (
    METHODS,
    GapReport,
    NormEstimate,
    adaptive_power,
    compute_gap,
    dual_vector,
    estimate_one_to_two,
    exact_two_to_inf,
    rademacher_averaging,
    sufficient_m_twinest,
    twinest,
    twinest_pp,
)
from .synthetic import (
    GapMatrixSpec,
    TallMatrixSpec,
    gen_gap_matrix,
    gen_tall_lowrank,
    load_matrix,
    save_matrix,
)
from .bench import BenchConfig, BenchRecord, SummaryRow, run_bench, summarize

__version__ = "0.1.0"

__all__ = [
    "LinearOp",
    "DenseMatrix",
    "GramOp",
    "DeflatedGramOp",
    "TransposedOp",
    "RngStream",
    "DiagEstimate",
    "rademacher_vector",
    "hutchinson_diag",
    "thin_qr",
    "lowrank_diag",
    "hutchpp_diag",
    "NormEstimate",
    "GapReport",
    "METHODS",
    "exact_two_to_inf",
    "twinest",
    "twinest_pp",
    "rademacher_averaging",
    "dual_vector",
    "adaptive_power",
    "estimate_one_to_two",
    "compute_gap",
    "sufficient_m_twinest",
    "GapMatrixSpec",
    "TallMatrixSpec",
    "gen_gap_matrix",
    "gen_tall_lowrank",
    "save_matrix",
    "load_matrix",
    "BenchConfig",
    "BenchRecord",
    "SummaryRow",
    "run_bench",
    "summarize",
]
