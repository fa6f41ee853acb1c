"""Greedy switching for minimum expected path length placement on grids, tori and graphs."""

from ._kernels import BACKEND
from .distributions import (ActivityDistribution, ClusterSpec, DistributionError, PairDistribution,
                            clique_instance, clustered_distribution, interleaved_ring_placement,
                            product_distribution, random_activities, tree_instance,
                            uniform_cluster_spec, worst_case_line_arrangement)
from .dynamics import (DynamicsConfig, DynamicsTrace, TraceStep, is_local_minimum, run_dynamics,
                       run_online_dynamics, switch_delta, verify_center_monotone)
from .experiments import RatioCurvePoint, Scenario, cluster_ratio_sweep, run_scenario
from .metrics import (BoundReport, UnsupportedDistributionError, bound_report, center_sums, epl,
                      expected_center, expected_rank, expected_sqrt_rank, ranks)
from .oracle import (OracleLimitError, OracleResult, approximation_ratio_study, brute_force_mepl,
                     c_min_rearrangement, enumerate_local_minima, local_minima, polygon_rank_bound,
                     ring_cluster_analytics, triangle_count)
from .placement import Placement
from .suites import verify_all
from .topology import Topology, TopologyError, build_topology, general, grid, line, ring, torus

__version__ = "0.1.0"
