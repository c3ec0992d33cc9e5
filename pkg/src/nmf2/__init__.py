"""Rank-2 nonnegative matrix factorization toolkit.

Exact factorization of nonnegative rank-2 matrices through an angular
parametrization of the scaled truncated SVD, a cheap clipping-based
approximation for general nonnegative input, alternating nonnegative least
squares with several initializations, three-way and symmetric variants, and
a seeded benchmark harness.
"""

from .anls import (
    AnlsConfig,
    AnlsResult,
    anls,
    anls_symmetric,
    init_nndsvd,
    init_qdr,
    init_random,
    init_spa,
    residual,
)
from .bench import (
    BenchRecord,
    GeneratorSpec,
    aggregate_records,
    multi_restart_objective,
    run_bench,
    write_records_csv,
    write_summary_csv,
)
from .errors import (
    DegenerateColumns,
    DegenerateFactor,
    EmptyMatrix,
    InfeasibleAlpha,
    InfeasibleParams,
    InputError,
    NegativeInput,
    Nmf2Error,
    NoConvergence,
    NonpositiveDominant,
    NotSymmetric,
    NumericalError,
    OutOfBox,
    RankDeficient,
    ReducibleInput,
    RejectionLimit,
)
from .exact import (
    AngularForm,
    Rank2Nmf,
    RatioStats,
    TBox,
    alpha_intervals,
    alpha_midpoints,
    alpha_nmf,
    exact_nmf,
    is_nonnegative_rank2,
    is_unique,
    ratio_stats,
    staircase_check,
    tbox,
    to_angular,
)
from .generators import (
    draw_integer4x4,
    gen_boundary_noise,
    gen_integer4x4,
    gen_lognormal,
    is_trivial_rank2,
)
from .linalg import (
    Preprocessed,
    ScaledSvd2,
    as_matrix,
    dominant_eig2,
    frobenius,
    nnls2,
    preprocess,
    reconstruct,
    svd2,
)
from .matrixio import read_matrix, write_matrix
from .qdr import ThetaSolution, clip_angles, clip_cost, qdr, solve_theta
from .threeway import (
    DefectCorner,
    DefectReport,
    SymmetricEig2,
    ThreeWayNmf,
    ThreeWayParams,
    alpha_threeway,
    defects,
    eig2_scaled,
    gram_defect,
    minimize_defects,
    threeway_nmf,
    threeway_symmetric,
    with_unit_columns,
)

__version__ = "0.1.0"

__all__ = [
    "AngularForm",
    "AnlsConfig",
    "AnlsResult",
    "BenchRecord",
    "DefectCorner",
    "DefectReport",
    "DegenerateColumns",
    "DegenerateFactor",
    "EmptyMatrix",
    "GeneratorSpec",
    "InfeasibleAlpha",
    "InfeasibleParams",
    "InputError",
    "NegativeInput",
    "Nmf2Error",
    "NoConvergence",
    "NonpositiveDominant",
    "NotSymmetric",
    "NumericalError",
    "OutOfBox",
    "Preprocessed",
    "Rank2Nmf",
    "RankDeficient",
    "RatioStats",
    "ReducibleInput",
    "RejectionLimit",
    "ScaledSvd2",
    "SymmetricEig2",
    "TBox",
    "ThetaSolution",
    "ThreeWayNmf",
    "ThreeWayParams",
    "aggregate_records",
    "alpha_intervals",
    "alpha_midpoints",
    "alpha_nmf",
    "alpha_threeway",
    "anls",
    "anls_symmetric",
    "as_matrix",
    "clip_angles",
    "clip_cost",
    "defects",
    "dominant_eig2",
    "draw_integer4x4",
    "eig2_scaled",
    "exact_nmf",
    "frobenius",
    "gen_boundary_noise",
    "gen_integer4x4",
    "gen_lognormal",
    "gram_defect",
    "init_nndsvd",
    "init_qdr",
    "init_random",
    "init_spa",
    "is_nonnegative_rank2",
    "is_trivial_rank2",
    "is_unique",
    "minimize_defects",
    "multi_restart_objective",
    "nnls2",
    "preprocess",
    "qdr",
    "ratio_stats",
    "read_matrix",
    "reconstruct",
    "residual",
    "run_bench",
    "solve_theta",
    "staircase_check",
    "svd2",
    "tbox",
    "threeway_nmf",
    "threeway_symmetric",
    "to_angular",
    "with_unit_columns",
    "write_matrix",
    "write_records_csv",
    "write_summary_csv",
]
