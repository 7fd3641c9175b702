"""Tail-dependence matrices: membership, constructions, sampling and estimation."""

__version__ = "0.1.0"

from .errors import DomainError, FileFormatError  # noqa: E402
from .matrix import (  # noqa: E402
    SquareUnitMatrix,
    SubstochasticMatrix,
    TailMatrix,
    ar1_matrix,
    convex_mix,
    equicorr_matrix,
    frechet_bernoulli_bounds_check,
    gamma_matrix,
    hadamard,
    lift_diag,
    ma1_matrix,
    psd_necessary_check,
    validate_tail_candidate,
)
from .bernoulli import (  # noqa: E402
    BernoulliVectorDistribution,
    ExclusiveAssignmentDistribution,
    ar1_x,
    equicorrelation_x,
    gamma_partition_x,
    ma1_x,
    moment_matrix,
    substochastic_x,
)
from .solver import (  # noqa: E402
    ConeDecomposition,
    MembershipVerdict,
    Status,
    dd_check,
    dd_decompose,
    decomposition_to_bernoulli,
    membership,
    verify_decomposition,
)
from .copulas import (  # noqa: E402
    Clayton,
    Comonotone,
    CopulaModel,
    Gaussian,
    Independence,
    LiebscherProduct,
    SampleBatch,
    SModel,
    StochRep,
    SurvivalMarshallOlkin,
    eval_smodel_copula,
    eval_stochrep_copula,
    model_from_dict,
    sample,
    substochastic_model,
    substochastic_tail_matrix,
    tail_matrix_of,
)
from .estimator import EmpiricalTailEstimate, empirical_tail_matrix, threshold_sweep  # noqa: E402
