"""ordviz: order-faithful representation of finite metric spaces.

The package turns metric data into purely ordinal questions: which of two
pairs is closer?  It measures how well drawings answer those questions
(`order_accuracy`, `kendall_tau`), improves drawings (`optimize`), refutes
impossible orders with checkable angle-bound proofs (`prove`), embeds
nearest/farthest-neighbour structure in the plane (`nn_embed_plane`,
`fn_embed_plane`), realises cluster trees on a line (`cluster_embed_line`,
`line_embed_bisection`), and estimates how much of order space random
configurations cover (`coverage_experiment`, `confidence_lower_bound`).
"""

from .errors import (ConstructionError, DegenerateConfigError, FormatError,
                     InvalidInputError, OrdvizError, TiedDistancesError)
from .metric import (MetricSpace, NeighbourMaps, PointConfig,
                     build_metric_space, config_metric_space, neighbour_maps,
                     pair_count, pair_index, index_pair, all_pairs)
from .orders import (EdgeOrder, concordant_pairs, count_inversions,
                     edge_order, kendall_tau, neighbour_maps_from_order,
                     order_accuracy, order_accuracy_against_config,
                     random_edge_order, tie_pair_count)
from .represent import RepresentationKind, check_representation
from .files import (read_distance_matrix, write_distance_matrix,
                    read_points, write_points, read_edge_order,
                    write_edge_order, read_digraph, write_digraph,
                    read_coords, write_coords, sniff_and_read)
from .rubberband import (RubberBandParams, OptimizeResult, rubber_band_epoch,
                         optimize, optimize_restarts, stretch_spread)
from .neighbours import (Digraph, neighbour_digraph, ForestComponent,
                         BiRootedForestDecomposition, decompose_bi_rooted,
                         proper_children, max_proper_children,
                         PlaneFeasibility, plane_nn_feasible, nn_embed_plane,
                         fejes_toth_delta, non_nn_fraction, random_order_nn,
                         NnStatistics, nn_statistics, forest_from_children)
from .fnembed import (FnEmbeddingPlan, fn_embedding_plan, fn_embed_plane,
                      curve_point)
from .cluster import (ClusterTree, cluster_tree_from_merges, single_linkage,
                      complete_linkage, random_cluster_tree, width_bound,
                      LineStep, LineRepresentation, cluster_embed_line,
                      verify_cluster_representation, BisectionCertificate,
                      balanced_bisection, LineEmbedResult,
                      line_embed_bisection)
from .experiments import (SampleDomain, UnitSquare, unit_cube, sample_config,
                          order_rank, order_from_rank, CoverageStore,
                          structure_codes, CoverageResult, coverage_experiment,
                          normal_quantile, normal_cdf, ConfidenceQuery,
                          confidence_lower_bound)
from .svg import render_config_svg, write_svg
from .prover import (ConstraintMode, ConstraintState, init_state, prove,
                     ProofResult, ProofLog, render_proof, check_proof,
                     parse_proof, CheckResult)

__version__ = "0.1.0"
