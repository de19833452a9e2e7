"""Gaussian Radon partitions, Gale duality and Youden's demon."""

from .errors import (
    DegenerateInputError,
    DimensionMismatchError,
    InvalidDistributionError,
    RankAmbiguityError,
    UnknownIdentifierError,
)
from .numerics import RngStream, cofactor_kernel, gaussian_stream, haar_orthogonal, null_space
from .geometry import (
    PointCloud,
    SignPattern,
    gale_dual,
    is_convex_position,
    is_general_position,
    min_side,
    radon_partition,
)
from .census import SeparationCensus, cover_counts, enumerate_separations, hulls_intersect_oracle
from .youden import (
    DemonOutcome,
    ExactValue,
    asymptotic_pnk,
    asymptotic_xd_tail,
    closed_form,
    demon_count,
    xd_law_from_demon,
)
from .estimator import (
    DemonEstimate,
    EstimateResult,
    SplitDistribution,
    compare_distributions,
    estimate_pnk,
    estimate_xd_demon,
    estimate_xd_geometric,
    wilson_ci,
)
from .coupling import CoupledPair, couple_gale, sample_nu, sample_rho, verify_coupling

__version__ = "0.1.0"
