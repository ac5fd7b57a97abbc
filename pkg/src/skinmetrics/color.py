"""Colorspace conversions: sRGB <-> linear RGB, linear RGB -> CIE-Lab, luminance.

All functions are vectorized over arrays whose last axis holds the three
channels, operate in double precision, and are pure. Decomposition math
elsewhere in the package runs on *linear* RGB (physical light mixing is only
additive there); Lab is produced through the standard sRGB -> XYZ (D65, 2deg)
-> Lab chain.
"""

from __future__ import annotations

import numpy as np

from .errors import ChannelRangeError

# sRGB primaries to XYZ, D65 white, 2 degree observer.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)

# Reference white = row sums of the matrix, so pure gray maps to zero chroma.
_WHITE = np.array([0.95047, 1.0000001, 1.08883])

# CIE f(t) breakpoints.
_CIE_EPS = 216.0 / 24389.0
_CIE_KAPPA = 24389.0 / 27.0

# Rec. 709 luma weights on linear RGB.
_LUMA = np.array([0.2126, 0.7152, 0.0722])


def _check_channels(rgb: np.ndarray, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    arr = np.asarray(rgb, dtype=np.float64)
    if arr.shape[-1] != 3:
        raise ChannelRangeError(f"expected 3 channels on the last axis, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ChannelRangeError("non-finite channel value")
    if np.any(arr < lo) or np.any(arr > hi):
        raise ChannelRangeError(f"channel value outside [{lo}, {hi}]")
    return arr


def srgb_to_linear(rgb: np.ndarray) -> np.ndarray:
    """Decode sRGB-encoded values in [0, 1] to linear light."""
    arr = _check_channels(rgb)
    return np.where(arr <= 0.04045, arr / 12.92, ((arr + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(rgb: np.ndarray) -> np.ndarray:
    """Encode linear-light values in [0, 1] back to sRGB."""
    arr = _check_channels(rgb)
    return np.where(arr <= 0.0031308, arr * 12.92, 1.055 * arr ** (1.0 / 2.4) - 0.055)


def linear_rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Linear RGB in [0, 1] to CIE-Lab (L in [0, 100], a/b signed)."""
    arr = _check_channels(rgb)
    xyz = arr @ _RGB_TO_XYZ.T
    t = xyz / _WHITE
    f = np.where(t > _CIE_EPS, np.cbrt(t), (_CIE_KAPPA * t + 16.0) / 116.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """sRGB-encoded values in [0, 1] to CIE-Lab."""
    return linear_rgb_to_lab(srgb_to_linear(rgb))


def luminance(rgb: np.ndarray) -> np.ndarray:
    """Rec. 709 luminance of linear RGB; scalar per pixel."""
    arr = _check_channels(rgb)
    return arr @ _LUMA
