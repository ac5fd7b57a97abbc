"""Individual Typology Angle.

Per-pixel angle from the Lab lightness/yellowness pair, computed over each
skin region, smoothed with a small mean filter, summarized per region as the
histogram mode, and averaged over the three regions into a single value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from .color import linear_rgb_to_lab
from .config import ItaConfig
from .errors import InsufficientPixelsError, MetricUnavailableError
from .landmarks import FaceSample, Region, RegionCrop, SKIN_REGIONS


@dataclass
class ItaResult:
    per_region: dict[Region, float]  # mode angle per skin region, degrees
    value: float                     # mean of the three region modes


def pixel_ita(lab: np.ndarray) -> np.ndarray:
    """Angle in degrees from Lab values, shape (..., 3) -> (...).

    Uses the two-argument arctangent of (L - 50, b) so b = 0 maps to +/-90
    depending on the sign of L - 50; results are folded into [-90, 90].
    The single undefined point L = 50, b = 0 yields NaN and is excluded from
    region statistics.
    """
    lab = np.asarray(lab, dtype=np.float64)
    dl = lab[..., 0] - 50.0
    b = lab[..., 2]
    angle = np.degrees(np.arctan2(dl, b))
    # arctan2 ranges over (-180, 180]; b < 0 lands outside the ITA branch.
    angle = np.where(angle > 90.0, angle - 180.0, angle)
    angle = np.where(angle < -90.0, angle + 180.0, angle)
    undefined = (dl == 0.0) & (b == 0.0)
    if np.ndim(angle) == 0:
        return np.float64(np.nan) if undefined else np.float64(angle)
    return np.where(undefined, np.nan, angle)


def _smooth_nan_aware(angles: np.ndarray, size: int) -> np.ndarray:
    """Mean filter with replicated edges; NaN pixels excluded from windows."""
    if size <= 1:
        return angles
    valid = np.isfinite(angles)
    filled = np.where(valid, angles, 0.0)
    num = uniform_filter(filled, size=size, mode="nearest")
    den = uniform_filter(valid.astype(np.float64), size=size, mode="nearest")
    with np.errstate(invalid="ignore"):
        out = num / den
    out[den == 0.0] = np.nan
    return out


def _histogram_mode(values: np.ndarray, bin_width: float) -> float:
    """Mode via a histogram with bins centered on multiples of bin_width.

    Ties between equal-count bins break toward the bin center nearest the
    distribution median, then toward the lower center.
    """
    half = bin_width / 2.0
    n_half = int(np.ceil(90.0 / bin_width))
    centers = np.arange(-n_half, n_half + 1) * bin_width
    edges = np.concatenate([centers - half, [centers[-1] + half]])
    counts, _ = np.histogram(values, bins=edges)
    best = np.flatnonzero(counts == counts.max())
    if best.size == 1:
        return float(centers[best[0]])
    median = float(np.median(values))
    dist = np.abs(centers[best] - median)
    return float(centers[best[np.argmin(dist)]])


def region_ita(crop: RegionCrop, cfg: ItaConfig | None = None) -> float:
    """Mode of the smoothed pixel-wise angle distribution for one crop."""
    cfg = cfg or ItaConfig()
    lab = linear_rgb_to_lab(crop.grid())
    angles = pixel_ita(lab)
    if int(np.isfinite(angles).sum()) < cfg.min_valid_pixels:
        raise InsufficientPixelsError(
            f"{crop.region.value}: {int(np.isfinite(angles).sum())} valid pixels "
            f"< {cfg.min_valid_pixels}")
    smoothed = _smooth_nan_aware(angles, cfg.smoothing_size)
    values = smoothed[np.isfinite(smoothed)]
    if values.size < cfg.min_valid_pixels:
        raise InsufficientPixelsError(
            f"{crop.region.value}: {values.size} smoothed pixels < {cfg.min_valid_pixels}")
    return _histogram_mode(values, cfg.bin_width_deg)


def compute_ita(sample: FaceSample, cfg: ItaConfig | None = None) -> ItaResult:
    """Mean of the three region modes; any failing region aborts the metric."""
    per_region: dict[Region, float] = {}
    for region in SKIN_REGIONS:
        crop = sample.crops.get(region)
        if crop is None:
            raise MetricUnavailableError(f"missing region {region.value}", regions=[region.value])
        try:
            per_region[region] = region_ita(crop, cfg)
        except InsufficientPixelsError as exc:
            raise MetricUnavailableError(str(exc), regions=[region.value]) from exc
    value = float(np.mean(list(per_region.values())))
    return ItaResult(per_region=per_region, value=value)
