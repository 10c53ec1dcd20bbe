"""Embedding-space cleaning: clustering, inspection montages, decisions."""

from effsense.cleaning.decisions import (
    CleaningDecision,
    RemovalReport,
    apply_cleaning_decisions,
    read_decisions,
    write_decisions_template,
)
from effsense.cleaning.images import (
    SentinelSignature,
    apply_mask,
    corner_signature,
    detect_empty_aerial,
)
from effsense.cleaning.kmeans import ClusterModel, kmeans, load_cluster_model, save_cluster_model
from effsense.cleaning.montage import MontageResult, export_cluster_montage
from effsense.cleaning.neighbors import nearest_neighbors

__all__ = [
    "CleaningDecision",
    "ClusterModel",
    "MontageResult",
    "RemovalReport",
    "SentinelSignature",
    "apply_cleaning_decisions",
    "apply_mask",
    "corner_signature",
    "detect_empty_aerial",
    "export_cluster_montage",
    "kmeans",
    "load_cluster_model",
    "nearest_neighbors",
    "read_decisions",
    "save_cluster_model",
    "write_decisions_template",
]
