"""Batch image embedding exporter.

Converts a directory of building images into an EMB1 embedding file (one
2048-d row per image, row order = sorted ids) plus a companion id list
and a provenance sidecar, using a frozen Inception-v3 encoder.
"""

from emb_exporter.export import ExportError, ExportJob, ExportResult, export_embeddings

__all__ = ["ExportError", "ExportJob", "ExportResult", "export_embeddings"]
