"""Kernel PCA over diffuse basis colors.

The dataset-level model behind the dichromatic skin measure: a polynomial
kernel (degree 3 in production; degree 1 exists as a test configuration) on
the extracted diffuse bases, double-centered, with the leading eigenvector
kept. Projections of new bases reuse the stored centering statistics, so a
serialized fit reproduces its training projections exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._version import __version__
from .config import KpcaConfig
from .errors import DegenerateFitError, InsufficientDataError, SkinMetricsError

_LUMA = np.array([0.2126, 0.7152, 0.0722])


@dataclass
class KpcaFit:
    """Leading kernel principal component plus centering statistics."""

    fit_points: np.ndarray   # (m, 3) diffuse bases used for the kernel matrix
    degree: int
    gamma: float
    coef0: float
    alpha: np.ndarray        # (m,) coefficients, sign anchor applied
    eigenvalue: float        # of the centered kernel matrix, > 0
    sign_anchor: int         # +1/-1 multiplier applied to the raw eigenvector
    seed: int
    col_means: np.ndarray    # (m,) column means of the uncentered kernel matrix
    grand_mean: float

    @property
    def fit_id(self) -> str:
        return hashlib.sha256(self._payload_json().encode("utf-8")).hexdigest()[:12]

    def _payload_json(self) -> str:
        return json.dumps(
            {
                "kind": "kpca_fit",
                "degree": self.degree,
                "gamma": self.gamma,
                "coef0": self.coef0,
                "fit_points": [[float(v) for v in row] for row in self.fit_points],
                "alpha": [float(v) for v in self.alpha],
                "eigenvalue": float(self.eigenvalue),
                "sign_anchor": self.sign_anchor,
                "seed": self.seed,
                "col_means": [float(v) for v in self.col_means],
                "grand_mean": float(self.grand_mean),
            },
            sort_keys=True,
        )

    def save(self, path: str | Path, config_hash: str = "") -> None:
        doc = json.loads(self._payload_json())
        doc["fit_id"] = self.fit_id
        doc["config_hash"] = config_hash
        doc["tool_version"] = __version__
        Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "KpcaFit":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SkinMetricsError(f"cannot read fit file {path}: {exc}") from exc
        if doc.get("kind") != "kpca_fit":
            raise SkinMetricsError(f"{path} is not a kernel fit file")
        return cls(
            fit_points=np.array(doc["fit_points"], dtype=np.float64),
            degree=int(doc["degree"]),
            gamma=float(doc["gamma"]),
            coef0=float(doc["coef0"]),
            alpha=np.array(doc["alpha"], dtype=np.float64),
            eigenvalue=float(doc["eigenvalue"]),
            sign_anchor=int(doc["sign_anchor"]),
            seed=int(doc["seed"]),
            col_means=np.array(doc["col_means"], dtype=np.float64),
            grand_mean=float(doc["grand_mean"]),
        )


def _kernel(a: np.ndarray, b: np.ndarray, degree: int, gamma: float, coef0: float) -> np.ndarray:
    return (gamma * (a @ b.T) + coef0) ** degree


def fit_kpca(bases: np.ndarray, cfg: KpcaConfig | None = None, seed: int = 0) -> KpcaFit:
    """Fit the leading kernel principal component of a set of 3-vectors.

    Above ``cfg.fit_cap`` points a seeded uniform subsample keeps the kernel
    matrix tractable. Alpha is scaled so the fit-point projection variance
    equals the eigenvalue, and its sign anchored so projections correlate
    positively with fit-point luminance (lighter basis, larger value).
    """
    cfg = cfg or KpcaConfig()
    X = np.asarray(bases, dtype=np.float64).reshape(-1, 3)
    if len(X) < cfg.min_bases:
        raise InsufficientDataError(f"{len(X)} bases < required {cfg.min_bases}")
    if len(X) > cfg.fit_cap:
        rng = np.random.default_rng(seed)
        X = X[np.sort(rng.choice(len(X), size=cfg.fit_cap, replace=False))]
    m = len(X)

    K = _kernel(X, X, cfg.degree, cfg.gamma, cfg.coef0)
    col_means = K.mean(axis=0)
    grand_mean = float(K.mean())
    Kc = K - col_means[None, :] - col_means[:, None] + grand_mean

    eigvals, eigvecs = np.linalg.eigh(Kc)
    eigenvalue = float(eigvals[-1])
    if not np.isfinite(eigenvalue) or eigenvalue <= 1e-12:
        raise DegenerateFitError("centered kernel matrix has no leading variance")
    v = eigvecs[:, -1]

    alpha = v * np.sqrt(m / eigenvalue)
    projections = Kc @ alpha
    lum = X @ _LUMA
    sign = 1
    if np.std(lum) > 0:
        corr = float(np.corrcoef(projections, lum)[0, 1])
        if np.isfinite(corr) and corr < 0:
            sign = -1
    alpha = alpha * sign

    return KpcaFit(
        fit_points=X.copy(), degree=cfg.degree, gamma=cfg.gamma, coef0=cfg.coef0,
        alpha=alpha, eigenvalue=eigenvalue, sign_anchor=sign, seed=seed,
        col_means=col_means, grand_mean=grand_mean)


def project_kpca(fit: KpcaFit, basis: np.ndarray) -> float:
    """Project one 3-vector onto the fitted component."""
    x = np.asarray(basis, dtype=np.float64).reshape(3)
    k = _kernel(fit.fit_points, x[None, :], fit.degree, fit.gamma, fit.coef0).ravel()
    k_centered = k - fit.col_means - k.mean() + fit.grand_mean
    return float(k_centered @ fit.alpha)
