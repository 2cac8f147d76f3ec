"""Init file for pairwise module."""

from ._base_similarity import AdjacencyMatrix, BaseSimilarity
from .distances import (
    BaseDistanceBackend,
    DistanceBackendNumpy,
    DistanceBackendNumba,
    make_distance_backend,
    pairwise_sq_distances,
)
from .similarities import (
    L2Similarity,
    CosineSimilarity,
    SNESimilarity,
    KNNSimilarity,
    SimilarityConfig,
    SIMILARITY_KINDS,
    LABELING_SPACES,
    cosine_similarity_matrix,
    partition_function,
    sne_similarity,
)
from .adjacency import (
    adjacency_l2,
    adjacency_cosine,
    adjacency_sne,
    adjacency_knn,
    build_adjacency,
    calibrate_threshold,
)
from .graph import to_graph, edge_count, write_edge_list

__all__ = [
    "AdjacencyMatrix",
    "BaseSimilarity",
    "BaseDistanceBackend",
    "DistanceBackendNumpy",
    "DistanceBackendNumba",
    "make_distance_backend",
    "pairwise_sq_distances",
    "L2Similarity",
    "CosineSimilarity",
    "SNESimilarity",
    "KNNSimilarity",
    "SimilarityConfig",
    "SIMILARITY_KINDS",
    "LABELING_SPACES",
    "cosine_similarity_matrix",
    "partition_function",
    "sne_similarity",
    "adjacency_l2",
    "adjacency_cosine",
    "adjacency_sne",
    "adjacency_knn",
    "build_adjacency",
    "calibrate_threshold",
    "to_graph",
    "edge_count",
    "write_edge_list",
]
