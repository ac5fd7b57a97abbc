"""Adaptive skin segmentation for the reflectance metrics.

Pipeline: keep pixels inside a face ellipse derived from the landmark
bounding box, carve out dilated eye and mouth hulls, drop luminance
outliers, then optionally divide by the background crop's channel means so
a global illumination scale cancels out.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import SegmentationConfig
from .errors import (
    BackgroundTooDarkError,
    InsufficientSkinError,
    SegmentationFailedError,
)
from .landmarks import LandmarkSet, RegionCrop


class PixelSource(str, Enum):
    ADAPTIVE_SEGMENTATION = "adaptive_segmentation"
    PATCH_UNION = "patch_union"


# Rec. 709 weights; applied directly because normalized sets may exceed [0, 1].
_LUMA = np.array([0.2126, 0.7152, 0.0722])


@dataclass
class SkinPixelSet:
    pixels: np.ndarray          # (m, 3) linear RGB; entries in [0, 4]
    source: PixelSource
    normalized: bool = False    # background division applied


_EYE_RINGS = (slice(36, 42), slice(42, 48))
_MOUTH_RING = slice(48, 60)


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull, CCW in image coordinates (y down).

    Collinear inputs degenerate to a 2-point 'polygon'; the exclusion test
    then reduces to a distance-to-segment check.
    """
    pts = np.unique(points, axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _near_polygon(query: np.ndarray, poly: np.ndarray, margin: float) -> np.ndarray:
    """True for points inside the polygon or within margin of its boundary."""
    m = len(poly)
    if m == 0:
        return np.zeros(len(query), dtype=bool)
    if m == 1:
        return np.linalg.norm(query - poly[0], axis=1) <= margin

    edges_a = poly
    edges_b = np.roll(poly, -1, axis=0)
    inside = np.ones(len(query), dtype=bool)
    min_d2 = np.full(len(query), np.inf)
    for a, b in zip(edges_a, edges_b):
        ab = b - a
        ab2 = float(ab @ ab)
        ap = query - a
        if m >= 3:
            crossv = ab[0] * ap[:, 1] - ab[1] * ap[:, 0]
            inside &= crossv >= 0.0
        t = np.clip((ap @ ab) / ab2, 0.0, 1.0) if ab2 > 0 else 0.0
        proj = a + np.multiply.outer(t, ab)
        d2 = np.sum((query - proj) ** 2, axis=1)
        np.minimum(min_d2, d2, out=min_d2)
    if m < 3:
        inside = np.zeros(len(query), dtype=bool)
    return inside | (min_d2 <= margin * margin)


def circular_mask(image: np.ndarray, landmarks: LandmarkSet,
                  cfg: SegmentationConfig | None = None) -> np.ndarray:
    """Skin candidate pixels as an (m, 3) linear-RGB matrix.

    Keeps pixels inside the ellipse inscribed in the landmark bounding box
    (shrunk about its center), excluding dilated eye and mouth hulls.
    """
    cfg = cfg or SegmentationConfig()
    pts = landmarks.points
    height, width = image.shape[:2]

    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    ax = (x1 - x0) / 2.0 * cfg.ellipse_scale
    ay = (y1 - y0) / 2.0 * cfg.ellipse_scale
    if ax <= 0 or ay <= 0:
        raise SegmentationFailedError("degenerate landmark bounding box")

    gx0 = max(int(np.floor(cx - ax)), 0)
    gx1 = min(int(np.ceil(cx + ax)) + 1, width)
    gy0 = max(int(np.floor(cy - ay)), 0)
    gy1 = min(int(np.ceil(cy + ay)) + 1, height)
    if gx0 >= gx1 or gy0 >= gy1:
        raise SegmentationFailedError("face ellipse entirely outside the image")

    ys, xs = np.mgrid[gy0:gy1, gx0:gx1]
    inside = ((xs - cx) / ax) ** 2 + ((ys - cy) / ay) ** 2 <= 1.0

    margin = cfg.exclusion_dilation_frac * (x1 - x0)
    coords = np.column_stack([xs[inside].astype(np.float64), ys[inside].astype(np.float64)])
    keep = np.ones(len(coords), dtype=bool)
    for ring in (*_EYE_RINGS, _MOUTH_RING):
        hull = _convex_hull(pts[ring])
        keep &= ~_near_polygon(coords, hull, margin)

    if not keep.any():
        raise SegmentationFailedError("exclusion hulls cover the whole face ellipse")
    sel_y = ys[inside][keep]
    sel_x = xs[inside][keep]
    return image[sel_y, sel_x].reshape(-1, 3).copy()


def remove_luminance_outliers(pixels: np.ndarray,
                              cfg: SegmentationConfig | None = None) -> np.ndarray:
    """Single-pass drop of pixels whose luminance leaves mean +/- k*std."""
    cfg = cfg or SegmentationConfig()
    pixels = np.asarray(pixels, dtype=np.float64)
    if len(pixels) < cfg.min_skin_pixels:
        raise InsufficientSkinError(
            f"{len(pixels)} pixels < required {cfg.min_skin_pixels}")
    lum = pixels @ _LUMA
    mean, std = float(lum.mean()), float(lum.std())
    kept = pixels[np.abs(lum - mean) <= cfg.outlier_sigma * std]
    if len(kept) < cfg.min_skin_pixels:
        raise InsufficientSkinError(
            f"{len(kept)} pixels remain after outlier removal "
            f"(minimum {cfg.min_skin_pixels})")
    return kept


def background_normalize(pixels: np.ndarray, background: RegionCrop,
                         cfg: SegmentationConfig | None = None) -> np.ndarray:
    """Divide each skin pixel channel-wise by the background channel means."""
    cfg = cfg or SegmentationConfig()
    if len(background.pixels) < cfg.min_background_pixels:
        raise InsufficientSkinError(
            f"background crop has {len(background.pixels)} pixels "
            f"< {cfg.min_background_pixels}")
    means = background.pixels.mean(axis=0)
    if np.any(means < cfg.background_min_mean):
        raise BackgroundTooDarkError(
            f"background channel mean {means.min():.4f} < {cfg.background_min_mean}")
    return np.clip(np.asarray(pixels, dtype=np.float64) / means, 0.0, 4.0)


def adaptive_skin_pixels(
    image: np.ndarray,
    landmarks: LandmarkSet,
    background: RegionCrop | None,
    cfg: SegmentationConfig | None = None,
) -> tuple[SkinPixelSet, list[str]]:
    """Full adaptive segmentation; returns the pixel set plus provenance flags.

    Background normalization is applied when enabled and a usable background
    crop exists; otherwise the step is bypassed and flagged, matching how the
    reflectance metric is run on datasets without a constant background.
    """
    cfg = cfg or SegmentationConfig()
    flags: list[str] = []
    pixels = circular_mask(image, landmarks, cfg)
    pixels = remove_luminance_outliers(pixels, cfg)
    normalized = False
    if cfg.normalize_background and background is not None:
        try:
            pixels = background_normalize(pixels, background, cfg)
            normalized = True
            flags.append("background-normalized")
        except (BackgroundTooDarkError, InsufficientSkinError):
            flags.append("background-normalization-skipped")
    elif cfg.normalize_background:
        flags.append("background-normalization-skipped")
    return SkinPixelSet(pixels=pixels, source=PixelSource.ADAPTIVE_SEGMENTATION,
                        normalized=normalized), flags
