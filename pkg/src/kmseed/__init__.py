"""k-means++ and k-means|| seeding with Exponential Race, bounds and diagnostics."""

from .bounds import (
    bicriteria_factor,
    bound_table,
    contraction,
    er_bounds,
    f_decay_bound,
    f_recurrence,
    kmeanspp_factor,
    parallel_bound,
    parallel_convergence_bound,
    wei_factor,
)
from .diagnostics import CoverageReport, EquivalenceResult, coverage_report, supermartingale_probe, tv_distance
from .geometry import AllCoveredError, CostCache, Dataset, as_dataset, nearest, opt1, point_cost, total_cost
from .instances import (
    GroundTruthInstance,
    bicriteria_lb_instance,
    brute_force_optk,
    optimal_partition,
    synthetic_blobs,
    tight_covered_instance,
)
from .parallel import (
    ParallelConfig,
    coupled_round,
    kmeans_parallel,
    kmeans_parallel_pois,
    kmeans_parallel_pruned,
    pois_round_clusterwise,
)
from .race import RaceConfig, RaceResult, er_kmeanspp
from .rng import make_rng, trial_rng
from .seeding import (
    BiCriteriaConfig,
    CenterList,
    bicriteria_kmeanspp,
    dsq_sample,
    kmeanspp,
    kmeanspp_batch,
    prune,
    weighted_kmeanspp,
)

__version__ = "0.1.0"
