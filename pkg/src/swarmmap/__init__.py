"""Swarm-based projection, topographic maps, and geodesic clustering."""

from .cluster import (ClusterResult, PipelineResult, Dendrogram, GeodesicMatrix,
                      swarm_cluster, geodesic_distances, hierarchical_cluster,
                      linkage_matrix, tendency_gap)
from .data import (Dataset, DissimilarityMatrix, euclidean_dissimilarity,
                   load_dataset, load_dissimilarity, save_dataset,
                   save_dissimilarity)
from .datasets import GENERATOR_NAMES, generate_benchmark
from .engine import (EngineState, EpochLog, Projection, chance, compute_s0,
                     happiness, initial_state, propose_and_move,
                     swarm_project, run_epoch, scent)
from .errors import ParseError, SwarmMapError, ValidationError
from .evaluate import (BenchmarkCell, BenchmarkSuite, TrialReport,
                       baseline_kmeans, baseline_single_linkage,
                       best_permutation_accuracy, error_rate, f1_score,
                       run_benchmark)
from .grid import (GridConfig, GridPos, PolarVec, cone, grid_distance,
                   polar_from_cartesian, ring_positions, rmin_from_grid,
                   solve_grid_size)
from .topomap import (NeighborGraph, TopoMap, delaunay_torus,
                      detect_volcanoes, render_heightmap, u_heights)

__version__ = "0.1.0"
