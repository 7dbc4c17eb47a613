"""Rank-oracle matroids, unions, extended k-fold unions and occupancy."""
from .base import GroundSet, Matroid, PartitionStructure, all_subsets, as_subset
from .families import (ExplicitMatroid, GraphicMatroid, PartitionMatroid, Restriction, UniformMatroid, edge_view,
                       graph_girth)
from .union import (ExtendedKFoldUnion, ParallelExtension, UnionMatroid, extend_kfold, kfold_union, occupancy,
                    occupancy_batch, partition_into_independent, union_rank)

__all__ = [
    "GroundSet", "Matroid", "PartitionStructure", "all_subsets", "as_subset",
    "ExplicitMatroid", "GraphicMatroid", "PartitionMatroid", "Restriction", "UniformMatroid", "edge_view", "graph_girth",
    "ExtendedKFoldUnion", "ParallelExtension", "UnionMatroid", "extend_kfold", "kfold_union", "occupancy",
    "occupancy_batch", "partition_into_independent", "union_rank",
]
