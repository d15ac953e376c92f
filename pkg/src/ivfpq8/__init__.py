"""IVFPQ approximate nearest-neighbor search with reduced-precision
lookup tables, including unsigned 8-bit float storage (e5m3/e4m4)."""

from .bankmodel import (
    BankGeometry,
    adversarial_pattern,
    lanes_per_bank,
    simulate_warp_access,
    worst_case_conflicts,
)
from .datasets import (
    NeighborLists,
    brute_force_knn,
    read_bvecs,
    read_fvecs,
    read_ivecs,
    synth_gaussian_mixture,
    write_fvecs,
    write_ivecs,
)
from .estimator import IvfPq
from .index import IvfPqIndex, build_index, load_index, save_index
from .kmeans import KMeansParams, KMeansResult, kmeans, train_coarse
from .minifloat import E4M4, E5M3, MiniFloatSpec, decode, decode_table, encode
from .pq import PQCodebook, compute_residuals, pq_encode, reconstruct, train_pq
from .search import (
    LUT_PRECISIONS,
    Lut,
    SearchParams,
    build_lut,
    recall,
    scan_list,
    search,
    search_batch,
    select_clusters,
    top_k,
)

__version__ = "0.1.0"

__all__ = [
    "BankGeometry",
    "E4M4",
    "E5M3",
    "IvfPq",
    "IvfPqIndex",
    "KMeansParams",
    "KMeansResult",
    "LUT_PRECISIONS",
    "Lut",
    "MiniFloatSpec",
    "NeighborLists",
    "PQCodebook",
    "SearchParams",
    "adversarial_pattern",
    "brute_force_knn",
    "build_index",
    "build_lut",
    "compute_residuals",
    "decode",
    "decode_table",
    "encode",
    "kmeans",
    "lanes_per_bank",
    "load_index",
    "pq_encode",
    "read_bvecs",
    "read_fvecs",
    "read_ivecs",
    "recall",
    "reconstruct",
    "save_index",
    "scan_list",
    "search",
    "search_batch",
    "select_clusters",
    "simulate_warp_access",
    "synth_gaussian_mixture",
    "top_k",
    "train_coarse",
    "train_pq",
    "worst_case_conflicts",
    "write_fvecs",
    "write_ivecs",
]
