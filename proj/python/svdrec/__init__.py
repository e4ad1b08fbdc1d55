"""SVD-based collaborative filtering.

Thin package wrapper around the compiled extension: NGCF-format dataset
loading, bipartite graph normalization, randomized truncated SVD, spectral
embedding tables, pairwise ranking training, and top-k evaluation.
"""

from ._svdrec import (
    EmbeddingTable,
    EpochRecord,
    EvalReport,
    FitResult,
    InteractionDataset,
    ModelParams,
    SparseMatrix,
    TrainConfig,
    build_adjacency,
    dense_from_numpy,
    evaluate,
    fit,
    forward,
    laplacian_normalize,
    load_dataset,
    matrix_power2,
    score,
    ssb_embeddings,
    symmetrize,
    top_k_items,
    truncated_svd,
    tsa_embeddings,
)

__all__ = [
    "EmbeddingTable",
    "EpochRecord",
    "EvalReport",
    "FitResult",
    "InteractionDataset",
    "ModelParams",
    "SparseMatrix",
    "TrainConfig",
    "build_adjacency",
    "dense_from_numpy",
    "evaluate",
    "fit",
    "forward",
    "laplacian_normalize",
    "load_dataset",
    "matrix_power2",
    "score",
    "ssb_embeddings",
    "symmetrize",
    "top_k_items",
    "truncated_svd",
    "tsa_embeddings",
]
