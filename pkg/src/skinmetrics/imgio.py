"""Image file ingest and export.

In-memory convention everywhere in this package: height x width x 3 float64
arrays of *linear* RGB in [0, 1]. 8-bit files are divided by 255 and decoded
from sRGB at ingest; export re-encodes and quantizes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .color import linear_to_srgb, srgb_to_linear
from .errors import SkinMetricsError


def load_image(path: str | Path) -> np.ndarray:
    """Read an 8-bit PNG/JPEG as an (H, W, 3) linear-RGB float array."""
    try:
        with Image.open(path) as img:
            rgb = np.asarray(img.convert("RGB"), dtype=np.float64)
    except (OSError, ValueError) as exc:
        raise SkinMetricsError(f"cannot read image {path}: {exc}") from exc
    return srgb_to_linear(rgb / 255.0)


def save_image(path: str | Path, linear: np.ndarray) -> None:
    """Write an (H, W, 3) linear-RGB float array as an 8-bit PNG."""
    encoded = linear_to_srgb(np.clip(linear, 0.0, 1.0))
    data = np.round(encoded * 255.0).astype(np.uint8)
    Image.fromarray(data, mode="RGB").save(path)
