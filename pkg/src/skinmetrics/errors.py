"""Exception types raised across the pipeline.

Every error that callers are expected to catch and act on (skip an image,
drop a region, bypass normalization) has its own class; everything inherits
from :class:`SkinMetricsError` so batch drivers can catch the lot.
"""

from __future__ import annotations


class SkinMetricsError(Exception):
    """Base class for all errors raised by this package."""


class ChannelRangeError(SkinMetricsError):
    """A color channel fell outside its documented domain."""


class LandmarkFormatError(SkinMetricsError):
    """Landmark sidecar file is malformed or fails validation."""


class RegionExtractionError(SkinMetricsError):
    """A requested face region could not be cut from the image."""

    def __init__(self, region: str, message: str):
        super().__init__(f"{region}: {message}")
        self.region = region


class BackgroundUnavailableError(SkinMetricsError):
    """No image corner is clear of the face; background crop omitted."""


class SegmentationFailedError(SkinMetricsError):
    """Adaptive skin segmentation produced no usable pixels."""


class InsufficientPixelsError(SkinMetricsError):
    """A pixel set is below the documented minimum size."""


class InsufficientSkinError(SkinMetricsError):
    """Too few skin pixels before or after segmentation filtering."""


class BackgroundTooDarkError(SkinMetricsError):
    """Background mean too close to zero for divisive normalization."""


class DegenerateFitError(SkinMetricsError):
    """A dataset-level fit has no usable variance."""


class InsufficientDataError(SkinMetricsError):
    """Too few samples to fit a dataset-level model."""


class NmfInitError(SkinMetricsError):
    """SVD-based initialization failed (degenerate input)."""


class NumericalFailureError(SkinMetricsError):
    """Non-finite values appeared during iteration."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class ClippingError(SkinMetricsError):
    """Synthetic scene drives too many pixels into the clamp."""


class MetricUnavailableError(SkinMetricsError):
    """A per-image metric could not be computed."""

    def __init__(self, message: str, regions: list[str] | None = None):
        super().__init__(message)
        self.regions = regions or []


class DegenerateMetricError(SkinMetricsError):
    """All values of a metric are identical; normalization undefined."""


class ManifestError(SkinMetricsError):
    """Dataset manifest is unreadable or violates its schema."""
