"""Uniformity testing on hypergrids with subcube conditional samples."""

from .grid import (
    CapacityError,
    Distribution,
    GridShape,
    InequalityReport,
    Restriction,
    ZeroMassSubcube,
    bias,
    bias_norm,
    bias_vector,
    draw_restriction_sigma,
    draw_restriction_t,
    project,
    restrict,
    tv_to_uniform,
    verify_projection_bias_bound,
    verify_restriction_tv_bound,
)
from .oracle import DistributionOracle, QueryLedger, RestrictedView, SubcubeOracle
from .edges import OrientedEdgeSet, Orientation, build_orientation, classify_edges
from .testers import (
    ConfigError,
    RecursionDepthError,
    TesterConfig,
    Verdict,
    base_case_tester,
    coarse_test,
    mean_tester,
    projected_test_mean,
    sub_cond_uni,
)

__version__ = "0.1.0"
