"""Toolkit for classifying building energy efficiency from remote sensing features.

Buildings are labelled Efficient (EPC grades A through D) or Inefficient
(E through G).  Feature channels are street view, aerial, and segmented
street view embeddings plus land surface temperature, footprint area, and
metered energy consumption scalars.  The package covers dataset assembly,
embedding-space cleaning, classical baselines, fused prediction heads,
integrated-gradients attribution, and evaluation reports.
"""

from effsense.dataset.types import BinaryClass, EfficiencyLabel, FeatureChannel

__all__ = ["BinaryClass", "EfficiencyLabel", "FeatureChannel"]

__version__ = "0.1.0"
