"""Landmark ingest and face-region extraction.

Landmarks follow the Dlib 68-point convention and arrive as JSON sidecar
files; detection itself is out of scope. Region rectangles are a pure
function of the landmark geometry:

* forehead: width = inter-eye-center distance d, height = 0.5 d, centered
  horizontally between the eye centers, bottom edge on the topmost eyebrow
  landmark;
* cheeks: the largest axis-aligned square inside the box spanned by a jaw
  contour point (2 left / 14 right) and the mouth corner on the same side
  (48 / 54), shrunk toward its center to stay off region boundaries;
* background: the first image-corner square (side 0.1 x min dimension, fixed
  corner order) that does not overlap the landmark bounding box, if any.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .config import RoiConfig
from .errors import (
    BackgroundUnavailableError,
    LandmarkFormatError,
    RegionExtractionError,
)

# Dlib 68-point index groups.
JAW = slice(0, 17)
BROWS = slice(17, 27)
LEFT_EYE = slice(36, 42)    # image-left
RIGHT_EYE = slice(42, 48)   # image-right
MOUTH = slice(48, 68)
LEFT_JAW_POINT = 2
RIGHT_JAW_POINT = 14
LEFT_MOUTH_CORNER = 48
RIGHT_MOUTH_CORNER = 54

N_POINTS = 68


class Region(str, Enum):
    FOREHEAD = "forehead"
    LEFT_CHEEK = "left_cheek"
    RIGHT_CHEEK = "right_cheek"
    BACKGROUND = "background"


SKIN_REGIONS = (Region.FOREHEAD, Region.LEFT_CHEEK, Region.RIGHT_CHEEK)


@dataclass
class LandmarkSet:
    """68 (x, y) pixel coordinates, origin top-left."""

    points: np.ndarray  # (68, 2) float64

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.shape != (N_POINTS, 2):
            raise LandmarkFormatError(f"expected {N_POINTS} points, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise LandmarkFormatError("non-finite landmark coordinate")
        bad = np.flatnonzero((pts < 0).any(axis=1))
        if bad.size:
            raise LandmarkFormatError(f"point {bad[0]} at {tuple(pts[bad[0]])} is out of bounds (negative)")
        self.points = pts

    def shifted(self, dx: float, dy: float) -> "LandmarkSet":
        return LandmarkSet(self.points + np.array([dx, dy]))


@dataclass
class RegionCrop:
    """One rectangular crop: rect in pixels plus its flattened pixel matrix."""

    region: Region
    rect: tuple[int, int, int, int]  # x0, y0, width, height
    pixels: np.ndarray               # (width*height, 3) linear RGB, row-major

    @property
    def width(self) -> int:
        return self.rect[2]

    @property
    def height(self) -> int:
        return self.rect[3]

    def grid(self) -> np.ndarray:
        """Pixels reshaped back to (height, width, 3)."""
        return self.pixels.reshape(self.height, self.width, 3)


@dataclass
class FaceSample:
    """One image's crops plus identifiers; background crop is optional."""

    image_id: str
    subject_id: str
    crops: dict[Region, RegionCrop]
    label: str | None = None
    flags: list[str] = field(default_factory=list)

    def skin_crops(self) -> list[RegionCrop]:
        return [self.crops[r] for r in SKIN_REGIONS]

    @property
    def background(self) -> RegionCrop | None:
        return self.crops.get(Region.BACKGROUND)


def load_landmarks(path: str | Path) -> LandmarkSet:
    """Parse a landmark sidecar: {"image": ..., "points": [[x, y] x 68]}."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise LandmarkFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise LandmarkFormatError(f"malformed JSON in {path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict) or "points" not in data:
        raise LandmarkFormatError(f"{path}: missing 'points' field")
    points = data["points"]
    if not isinstance(points, list) or len(points) != N_POINTS:
        raise LandmarkFormatError(
            f"{path}: expected {N_POINTS} points, got {len(points) if isinstance(points, list) else type(points).__name__}"
        )
    for i, pt in enumerate(points):
        if not (isinstance(pt, (list, tuple)) and len(pt) == 2
                and all(isinstance(v, (int, float)) for v in pt)):
            raise LandmarkFormatError(f"{path}: point {i} is not an [x, y] number pair")
    return LandmarkSet(np.array(points, dtype=np.float64))


def eye_centers(landmarks: LandmarkSet) -> tuple[np.ndarray, np.ndarray]:
    pts = landmarks.points
    return pts[LEFT_EYE].mean(axis=0), pts[RIGHT_EYE].mean(axis=0)


def _cut(image: np.ndarray, region: Region, x0: int, y0: int, w: int, h: int,
         min_size: int) -> RegionCrop:
    height, width = image.shape[:2]
    if w < min_size or h < min_size:
        raise RegionExtractionError(region.value, f"rect {w}x{h} below minimum {min_size}x{min_size}")
    if x0 < 0 or y0 < 0 or x0 + w > width or y0 + h > height:
        raise RegionExtractionError(
            region.value, f"rect ({x0},{y0},{w},{h}) outside {width}x{height} image")
    pixels = image[y0:y0 + h, x0:x0 + w].reshape(-1, 3).copy()
    return RegionCrop(region=region, rect=(x0, y0, w, h), pixels=pixels)


def _round(v: float) -> int:
    # Half-up rounding; translation by whole pixels shifts rects exactly.
    return int(np.floor(v + 0.5))


def extract_crops(
    image: np.ndarray,
    landmarks: LandmarkSet,
    cfg: RoiConfig | None = None,
    image_id: str = "",
    subject_id: str = "",
    label: str | None = None,
) -> FaceSample:
    """Cut forehead, cheek and (when available) background crops.

    Raises :class:`RegionExtractionError` when a skin rect is degenerate or
    out of bounds. A missing background is not fatal: the crop is omitted and
    the sample flagged ``background-unavailable``.
    """
    cfg = cfg or RoiConfig()
    pts = landmarks.points
    height, width = image.shape[:2]
    if np.any(pts[:, 0] >= width) or np.any(pts[:, 1] >= height):
        bad = int(np.flatnonzero((pts[:, 0] >= width) | (pts[:, 1] >= height))[0])
        raise LandmarkFormatError(f"point {bad} at {tuple(pts[bad])} outside {width}x{height} image")

    left_eye, right_eye = eye_centers(landmarks)
    d = float(np.linalg.norm(right_eye - left_eye))

    crops: dict[Region, RegionCrop] = {}

    # Forehead: sits fully above the eyebrows, centered between the eyes.
    fw = _round(cfg.forehead_width_factor * d)
    fh = _round(cfg.forehead_height_factor * d)
    cx = (left_eye[0] + right_eye[0]) / 2.0
    brow_top = float(pts[BROWS, 1].min())
    crops[Region.FOREHEAD] = _cut(
        image, Region.FOREHEAD,
        _round(cx - fw / 2.0), _round(brow_top) - fh, fw, fh, cfg.min_region_size)

    # Cheeks: square inscribed between jaw point and mouth corner, shrunk.
    for region, jaw_idx, mouth_idx in (
        (Region.LEFT_CHEEK, LEFT_JAW_POINT, LEFT_MOUTH_CORNER),
        (Region.RIGHT_CHEEK, RIGHT_JAW_POINT, RIGHT_MOUTH_CORNER),
    ):
        a, b = pts[jaw_idx], pts[mouth_idx]
        side = min(abs(a[0] - b[0]), abs(a[1] - b[1])) * (1.0 - cfg.cheek_shrink)
        ccx, ccy = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
        s = _round(side)
        crops[region] = _cut(
            image, region,
            _round(ccx - side / 2.0), _round(ccy - side / 2.0), s, s, cfg.min_region_size)

    sample = FaceSample(image_id=image_id, subject_id=subject_id, crops=crops, label=label)
    try:
        crops[Region.BACKGROUND] = extract_background(image, landmarks, cfg)
    except BackgroundUnavailableError:
        sample.flags.append("background-unavailable")
    return sample


def extract_background(image: np.ndarray, landmarks: LandmarkSet,
                       cfg: RoiConfig | None = None) -> RegionCrop:
    """First image-corner square clear of the face bounding box.

    Raises :class:`BackgroundUnavailableError` when every corner overlaps the
    face; callers treat that as non-fatal (crop omitted, sample flagged).
    """
    cfg = cfg or RoiConfig()
    pts = landmarks.points
    height, width = image.shape[:2]
    side = int(np.floor(cfg.background_side_frac * min(width, height)))
    face_x0, face_y0 = pts.min(axis=0)
    face_x1, face_y1 = pts.max(axis=0)
    corners = [(0, 0), (width - side, 0), (0, height - side), (width - side, height - side)]
    for bx, by in corners:
        overlaps = (bx < face_x1 and bx + side > face_x0
                    and by < face_y1 and by + side > face_y0)
        if not overlaps and side >= cfg.min_region_size:
            return _cut(image, Region.BACKGROUND, bx, by, side, side, cfg.min_region_size)
    raise BackgroundUnavailableError("no image corner is clear of the face bounding box")


__all__ = [
    "Region", "SKIN_REGIONS", "LandmarkSet", "RegionCrop", "FaceSample",
    "load_landmarks", "extract_crops", "extract_background", "eye_centers",
]
