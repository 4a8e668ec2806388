"""Clustering of variable-length 2-D vehicle motion trajectories.

Pipeline: pairwise DTW alignment costs, t-SNE embedding, minimax
(path-based) transitive distances over a minimum spanning tree, classical
MDS re-embedding, and Gaussian-mixture clustering with the cluster count
selected by silhouette score.  Includes four reduced baselines, external
evaluation metrics, and a parametric generator of synthetic driving
scenarios.
"""

from .clustering import (
    GmmModel,
    ModelSelection,
    fit_gmm,
    kmeans,
    predict_labels,
    select_k,
    silhouette_score,
)
from .config import Config, load_config
from .data import (
    Embedding,
    Labeling,
    SymMatrix,
    Trajectory,
    TrajectorySet,
    load_matrix,
    load_trajectories,
    save_matrix,
    save_trajectories,
)
from .dtw import DtwConfig, cost_matrix, dtw_cost
from .evaluation import align_labels_for_display, mutual_information, rand_index, v_measure
from .mds import MdsConfig, classical_mds, elbow_dimension, nonmetric_mds
from .minimax import build_graph, minimax_distances, prim_mst
from .pipeline import METHOD_CHAINS, METHODS, RunReport, run_augmentation_study, run_method
from .scenarios import ScenarioSpec, build_evaluation_sets, generate, rule_label
from .tsne import TsneConfig, conditional_affinities, symmetrize_affinities, tsne_embed

__version__ = "0.1.0"

__all__ = [
    "Config",
    "DtwConfig",
    "Embedding",
    "GmmModel",
    "Labeling",
    "MdsConfig",
    "METHOD_CHAINS",
    "METHODS",
    "ModelSelection",
    "RunReport",
    "ScenarioSpec",
    "SymMatrix",
    "Trajectory",
    "TrajectorySet",
    "TsneConfig",
    "align_labels_for_display",
    "build_evaluation_sets",
    "build_graph",
    "classical_mds",
    "conditional_affinities",
    "cost_matrix",
    "dtw_cost",
    "elbow_dimension",
    "fit_gmm",
    "generate",
    "kmeans",
    "load_config",
    "load_matrix",
    "load_trajectories",
    "minimax_distances",
    "mutual_information",
    "nonmetric_mds",
    "predict_labels",
    "prim_mst",
    "rand_index",
    "rule_label",
    "run_augmentation_study",
    "run_method",
    "save_matrix",
    "save_trajectories",
    "select_k",
    "silhouette_score",
    "symmetrize_affinities",
    "tsne_embed",
    "v_measure",
]
