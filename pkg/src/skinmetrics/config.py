"""Run configuration: every tunable of the pipeline in one serializable record.

Geometry factors, filter sizes, solver limits and kernel hyperparameters all
live here so an experiment can vary them without touching code, and so every
output artifact can embed a hash of the exact settings it was produced under.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import SkinMetricsError


@dataclass
class RoiConfig:
    """Rectangle construction from the 68-point landmark set."""

    forehead_width_factor: float = 1.0     # × inter-eye-center distance
    forehead_height_factor: float = 0.5    # × inter-eye-center distance
    cheek_shrink: float = 0.15             # fraction shrunk toward square center
    background_side_frac: float = 0.1      # × min(image dims)
    min_region_size: int = 8               # px, below this a rect is degenerate


@dataclass
class ItaConfig:
    smoothing_size: int = 3                # mean-filter window, odd
    bin_width_deg: float = 1.0             # histogram bin width
    min_valid_pixels: int = 64


@dataclass
class SegmentationConfig:
    ellipse_scale: float = 0.85            # shrink of the landmark-bbox ellipse
    exclusion_dilation_frac: float = 0.10  # × face width, around eyes/mouth
    outlier_sigma: float = 2.0             # luminance outlier threshold
    min_skin_pixels: int = 100
    min_background_pixels: int = 64
    background_min_mean: float = 0.02      # per-channel floor for division
    normalize_background: bool = True


@dataclass
class RsrConfig:
    pixel_cap: int = 200_000               # pooled-pixel subsample ceiling
    min_fit_pixels: int = 1000


@dataclass
class NmfConfig:
    max_iter: int = 500
    tol: float = 1e-6                      # relative residual improvement
    eps: float = 1e-12                     # denominator floor in updates


@dataclass
class KpcaConfig:
    degree: int = 3
    gamma: float = 1.0 / 3.0               # 1 / feature dimension
    coef0: float = 1.0
    fit_cap: int = 2000                    # max bases kept for the kernel matrix
    min_bases: int = 10


@dataclass
class SynthConfig:
    image_size: int = 256
    cos_power: float = 4.0                 # specular falloff vs incidence angle
    max_clip_fraction: float = 0.10
    noise_sigma: float = 0.003
    diffuse_level: float = 0.55
    specular_peak: float = 0.30
    highlight_width: float = 0.25          # Gaussian sigma in normalized coords
    angle_min_deg: float = -45.0
    angle_max_deg: float = 45.0


_SECTIONS = {
    "roi": RoiConfig,
    "ita": ItaConfig,
    "segmentation": SegmentationConfig,
    "rsr": RsrConfig,
    "nmf": NmfConfig,
    "kpca": KpcaConfig,
    "synth": SynthConfig,
}


@dataclass
class RunConfig:
    """All pipeline tunables plus the master seed."""

    roi: RoiConfig = field(default_factory=RoiConfig)
    ita: ItaConfig = field(default_factory=ItaConfig)
    segmentation: SegmentationConfig = field(default_factory=SegmentationConfig)
    rsr: RsrConfig = field(default_factory=RsrConfig)
    nmf: NmfConfig = field(default_factory=NmfConfig)
    kpca: KpcaConfig = field(default_factory=KpcaConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    seed: int = 0

    def validate(self) -> None:
        if self.ita.smoothing_size < 1 or self.ita.smoothing_size % 2 == 0:
            raise SkinMetricsError("ita.smoothing_size must be a positive odd integer")
        if not 0.0 < self.segmentation.ellipse_scale <= 1.0:
            raise SkinMetricsError("segmentation.ellipse_scale must be in (0, 1]")
        if not 0.0 <= self.roi.cheek_shrink < 1.0:
            raise SkinMetricsError("roi.cheek_shrink must be in [0, 1)")
        if self.nmf.max_iter < 1 or self.nmf.tol <= 0:
            raise SkinMetricsError("nmf.max_iter must be >= 1 and nmf.tol > 0")
        if self.kpca.degree < 1:
            raise SkinMetricsError("kpca.degree must be >= 1")
        if self.rsr.pixel_cap < self.rsr.min_fit_pixels:
            raise SkinMetricsError("rsr.pixel_cap must be >= rsr.min_fit_pixels")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        kwargs = {}
        for name, section_cls in _SECTIONS.items():
            section = dict(data.get(name, {}))
            known = {f.name for f in fields(section_cls)}
            unknown = set(section) - known
            if unknown:
                raise SkinMetricsError(f"unknown key(s) in config section '{name}': {sorted(unknown)}")
            kwargs[name] = section_cls(**section)
        cfg = cls(seed=int(data.get("seed", 0)), **kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_path(cls, path: str | Path | None) -> "RunConfig":
        if path is None:
            cfg = cls()
            cfg.validate()
            return cfg
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SkinMetricsError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        """Short stable digest of the effective settings (seed included)."""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()[:12]
