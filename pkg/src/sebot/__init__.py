"""Unsupervised social bot detection with two-level structural entropy."""
from .config import PipelineConfig, resolve_config
from .entropy import EncodingTree, one_dim_entropy, optimize_tree, structural_entropy
from .graph import GraphConfig, MultiRelationalGraph, build_graph
from .ingest import UserRecord, extract_features, parse_user_records
from .multirank import iterate_stationary, tensorize
from .pipeline import run_detect

__all__ = [
    "EncodingTree", "GraphConfig", "MultiRelationalGraph", "PipelineConfig", "UserRecord",
    "build_graph", "extract_features", "iterate_stationary", "one_dim_entropy", "optimize_tree",
    "parse_user_records", "resolve_config", "run_detect", "structural_entropy", "tensorize",
]
