"""Fused prediction heads over concatenated feature channels."""

from effsense.fusion.features import (
    FusionInput,
    MissingChannelError,
    ScalarStats,
    build_feature_matrix,
    canonical_channels,
    concat_features,
    scalar_stats,
)
from effsense.fusion.head import (
    AdamState,
    ForwardCache,
    HeadParameters,
    StaleCacheError,
    adam_step,
    backward,
    forward,
    init_head_params,
    predict,
    weighted_cross_entropy,
)
from effsense.fusion.store import load_head, save_head
from effsense.fusion.train import TrainConfig, TrainedHead, TrainHistory, train_head

__all__ = [
    "AdamState",
    "ForwardCache",
    "FusionInput",
    "HeadParameters",
    "MissingChannelError",
    "ScalarStats",
    "StaleCacheError",
    "TrainConfig",
    "TrainHistory",
    "TrainedHead",
    "adam_step",
    "backward",
    "build_feature_matrix",
    "canonical_channels",
    "concat_features",
    "forward",
    "init_head_params",
    "load_head",
    "predict",
    "save_head",
    "scalar_stats",
    "train_head",
    "weighted_cross_entropy",
]
