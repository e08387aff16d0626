"""Exact linear and ReLU regression under Massart label corruption.

The pipeline: rescale the covariates into approximate radial-isotropic
position, minimize the l1 loss (a linear program for linear models, an
ellipsoid method with a gradient separation oracle for ReLUs), and snap the
minimizer to bounded-denominator rationals for exact recovery.
"""

from .data import LabeledDataset, load_dataset_csv, save_dataset_csv
from .errors import (
    ContractViolation,
    Degenerate,
    DimensionMismatch,
    EmptyComplement,
    HalfspaceEmpty,
    HeavySubspaceEncountered,
    InsufficientPoints,
    InvalidNoiseRate,
    MalformedCsv,
    NoRecovery,
    NonIdentifiable,
    RadregError,
    SimulationInfeasible,
    SingularMatrix,
    SolverStalled,
)
from .isotropy import (
    HeavySubspace,
    RadialTransform,
    check_forster_condition,
    find_heavy_subspace,
    min_isotropy_eig,
    radial_isotropize,
    second_moment,
)
from .l1 import (
    L1FitResult,
    RationalVector,
    check_structural_condition,
    l0_fit_bruteforce,
    l1_fit_linear,
    snap_to_rational,
)
from .linalg import OrthonormalBasis, inv_sqrt_psd, orthonormal_complement, sym_eigendecomp
from .linear import (
    RecoveryConfig,
    RecoveryReport,
    recover_linear,
    recover_linear_simple,
    recover_with_retries,
)
from .noise import (
    AnyCoordAbove,
    Constant,
    CorruptionRecord,
    FlipNegate,
    Gated,
    MassartSpec,
    Scale,
    corrupt_massart,
    corrupt_oblivious,
    gated_flip,
    inflated_massart_rate,
    strategy_from_json,
)
from .relu import (
    EllipsoidConfig,
    EllipsoidState,
    SepResult,
    ellipsoid_cut,
    ellipsoid_recover_relu,
    gd_relu_transformed,
    relu_l1_loss,
    sep_oracle,
)
from .bench import (
    BenchReport,
    SyntheticSpec,
    default_sample_size,
    default_target,
    exact_recovery_bench,
    make_synthetic_dataset,
    margin_fraction,
    method_registry,
    sample_synthetic_mixture,
)

__version__ = "0.1.0"
