"""Skin-tone metrics from single face images.

Three per-image measures over landmark-derived skin regions:

* ``ita``   — colorimetric angle from CIE-Lab lightness/yellowness;
* ``rsr``   — dataset-relative projection onto the principal axis of pooled
  skin pixels (plus the patch-based ``rsr_star`` variant);
* ``sreds`` — kernel-PCA projection of per-region diffuse bases obtained by
  separating each skin patch into diffuse and specular components with a
  rank-2 non-negative factorization.

Plus a synthetic generator that renders patches and whole datasets from the
two-component reflection model with known ground truth, and an evaluation
harness for intra-subject variability. The ``skinmetrics`` CLI drives batch
runs; see the README.
"""

from ._version import __version__
from .nmf import KERNEL_BACKEND

__all__ = ["__version__", "KERNEL_BACKEND"]
