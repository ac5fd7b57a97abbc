"""Relative skin reflectance.

A dataset-level line fit in RGB space (first principal component of pooled
skin pixels) and per-image mean projection onto that line. Values only mean
anything relative to the other images fitted together, so the fit is frozen
to a JSON file and reused for projection.

The starred variant uses the union of the three ROI patches per image
instead of adaptive segmentation, with no background normalization.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from ._version import __version__
from .config import RsrConfig
from .errors import DegenerateFitError, InsufficientPixelsError, SkinMetricsError
from .landmarks import FaceSample
from .segmentation import PixelSource, SkinPixelSet


class RsrVariant(str, Enum):
    RSR = "rsr"
    RSR_STAR = "rsr-star"


@dataclass
class RsrFit:
    """Unit principal axis and center of the pooled-pixel cloud."""

    axis: np.ndarray            # (3,) unit norm, sum of components > 0
    center: np.ndarray          # (3,)
    fit_pixel_count: int
    sign_anchor: int            # multiplier applied to the raw eigenvector
    variant: RsrVariant
    seed: int

    @property
    def fit_id(self) -> str:
        return hashlib.sha256(self._payload_json().encode("utf-8")).hexdigest()[:12]

    def _payload_json(self) -> str:
        return json.dumps(
            {
                "kind": "rsr_fit",
                "variant": self.variant.value,
                "axis": [float(v) for v in self.axis],
                "center": [float(v) for v in self.center],
                "fit_pixel_count": self.fit_pixel_count,
                "sign_anchor": self.sign_anchor,
                "seed": self.seed,
            },
            sort_keys=True,
        )

    def save(self, path: str | Path, config_hash: str = "") -> None:
        doc = json.loads(self._payload_json())
        doc["fit_id"] = self.fit_id
        doc["config_hash"] = config_hash
        doc["tool_version"] = __version__
        Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RsrFit":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SkinMetricsError(f"cannot read fit file {path}: {exc}") from exc
        if doc.get("kind") != "rsr_fit":
            raise SkinMetricsError(f"{path} is not a reflectance fit file")
        return cls(
            axis=np.array(doc["axis"], dtype=np.float64),
            center=np.array(doc["center"], dtype=np.float64),
            fit_pixel_count=int(doc["fit_pixel_count"]),
            sign_anchor=int(doc["sign_anchor"]),
            variant=RsrVariant(doc["variant"]),
            seed=int(doc["seed"]),
        )


def _as_pixels(sample) -> np.ndarray:
    if isinstance(sample, SkinPixelSet):
        return sample.pixels
    return np.asarray(sample, dtype=np.float64)


def fit_rsr(
    samples: list,
    seed: int,
    cfg: RsrConfig | None = None,
    variant: RsrVariant = RsrVariant.RSR,
) -> RsrFit:
    """Fit the principal axis of pooled skin pixels.

    Pools all pixel sets, subsamples uniformly (seeded) above the cap,
    centers, and takes the top eigenvector of the 3x3 covariance. The axis
    sign is fixed so its component sum is positive, making larger values
    correspond to brighter skin regardless of eigen-solver convention.
    """
    cfg = cfg or RsrConfig()
    pools = [_as_pixels(s) for s in samples if len(_as_pixels(s))]
    if not pools:
        raise InsufficientPixelsError("no pixels to fit")
    pixels = np.concatenate(pools, axis=0)
    if len(pixels) < cfg.min_fit_pixels:
        raise InsufficientPixelsError(
            f"{len(pixels)} pooled pixels < required {cfg.min_fit_pixels}")
    if len(pixels) > cfg.pixel_cap:
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(len(pixels), size=cfg.pixel_cap, replace=False))
        pixels = pixels[idx]

    center = pixels.mean(axis=0)
    centered = pixels - center
    cov = centered.T @ centered / len(pixels)
    eigvals, eigvecs = np.linalg.eigh(cov)
    if not np.isfinite(eigvals[-1]) or eigvals[-1] <= 1e-15:
        raise DegenerateFitError("pooled pixels have no variance")
    axis = eigvecs[:, -1]
    s = float(axis.sum())
    sign = -1 if (s < 0 or (s == 0 and axis[np.argmax(np.abs(axis))] < 0)) else 1
    return RsrFit(
        axis=axis * sign,
        center=center,
        fit_pixel_count=len(pixels),
        sign_anchor=sign,
        variant=variant,
        seed=seed,
    )


def project_rsr(fit: RsrFit, pixels) -> float:
    """Mean projection of (pixel - center) onto the fitted axis."""
    arr = _as_pixels(pixels)
    if len(arr) == 0:
        raise InsufficientPixelsError("empty pixel set")
    return float(((arr - fit.center) @ fit.axis).mean())


def patch_union(sample: FaceSample) -> SkinPixelSet:
    """Union of the three ROI patch pixel matrices, unnormalized."""
    pixels = np.concatenate([c.pixels for c in sample.skin_crops()], axis=0)
    return SkinPixelSet(pixels=pixels, source=PixelSource.PATCH_UNION, normalized=False)


def compute_rsr_star(fit: RsrFit, sample: FaceSample) -> float:
    """Projection of the three-patch union; no background normalization."""
    return project_rsr(fit, patch_union(sample))
