"""Data-driven sensitivity indices for models with dependent inputs.

The pipeline: enumerate a total-degree monomial basis, arrange it into an
ordered partition, orthonormalize it against the empirical measure of the
observed samples with modified Gram-Schmidt, project the output onto the
result, and read sensitivity indices off block-wise sums of squared
coefficients.
"""

from .basis import (
    Block,
    MonomialSet,
    MultiIndex,
    OrderedBasis,
    basis_size,
    cyclic_permutation,
    enumerate_monomials,
    partition_full,
    partition_nested,
    partition_order_based,
    partition_uncorrelated,
    permute_inputs,
)
from .benchmarks import (
    BenchmarkSpec,
    analytic_example1_indices,
    analytic_example3_totals,
    analytic_var_product_normal,
    generate,
    generate_replication,
)
from .dataio import read_csv, write_csv
from .errors import (
    BasisSizeError,
    ConfigError,
    DataError,
    DegenerateOutputWarning,
    DimensionError,
    GsaPceError,
    InsufficientSamplesError,
    InvalidPermutationError,
    LinearDependenceError,
    NumericalError,
)
from .indices import (
    IndexEntry,
    IndexReport,
    OrderSweep,
    Pipeline,
    all_indices,
    conditional_total_sweep,
    first_order_full,
    first_order_uncorrelated,
    group_total,
    interaction_coefficient_report,
    order_based_sweep,
    screen_interactions,
    total_full,
    total_uncorrelated,
)
from .ortho import (
    Dataset,
    OrthoOptions,
    OrthonormalBasis,
    empirical_inner,
    evaluate_basis,
    evaluate_monomials,
    modified_gram_schmidt,
)
from .pce import (
    BlockVariance,
    PceModel,
    block_variances,
    fit,
    group_by_support,
    moments,
    predict,
)
from .report import VERSION as __version__
from .stats import (
    BootstrapResult,
    ReplicationResult,
    ResamplingPlan,
    bootstrap_ci,
    bootstrap_mean_ci,
    replicate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
