"""Rank-2 non-negative factorization of skin-patch pixel matrices.

A patch of n pixels is an (n, 3) non-negative matrix V, factored as
V ~ W H with W (n, 2) holding per-pixel magnitudes and H (2, 3) holding two
basis colors. Initialization is a double-SVD scheme with positive-part
splitting and mean fill (so no entry starts at zero); the solve is plain
multiplicative updates, which keep iterates non-negative and the residual
non-increasing. Both properties are load-bearing for everything downstream,
so they are kept deliberately boring and fully deterministic.

The update loop itself lives in a compiled extension when available; set
``SKINMETRICS_PURE_PYTHON=1`` to force the numpy fallback. Both backends
share one contract and are compared by ``benchmarks/bench_nmf.py``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .config import NmfConfig
from .errors import NmfInitError, NumericalFailureError, SkinMetricsError

if os.environ.get("SKINMETRICS_PURE_PYTHON"):
    from . import _mu_fallback as _kernel
else:
    try:
        from . import _mu_kernel as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _mu_fallback as _kernel

KERNEL_BACKEND: str = _kernel.BACKEND

MIN_PATCH_PIXELS = 64


@dataclass
class NmfFactors:
    """Factor pair plus solve diagnostics.

    Rows of H are unit Euclidean norm with their scale folded into W, so
    basis colors are comparable across patches of different brightness.
    """

    W: np.ndarray           # (n, 2), >= 0
    H: np.ndarray           # (2, 3), >= 0, unit-norm rows
    residual: float         # ||V - WH||_F
    iterations: int
    converged: bool
    residual_trace: np.ndarray | None = None


def as_patch_matrix(data: np.ndarray, min_pixels: int = MIN_PATCH_PIXELS) -> np.ndarray:
    """Validate an (n, 3) non-negative pixel matrix."""
    V = np.ascontiguousarray(data, dtype=np.float64)
    if V.ndim != 2 or V.shape[1] != 3:
        raise SkinMetricsError(f"patch matrix must be (n, 3), got {V.shape}")
    if V.shape[0] < min_pixels:
        raise SkinMetricsError(f"patch has {V.shape[0]} pixels < minimum {min_pixels}")
    if not np.all(np.isfinite(V)):
        raise SkinMetricsError("patch matrix contains non-finite entries")
    if np.any(V < 0):
        raise SkinMetricsError("patch matrix contains negative entries")
    return V


def _normalize_h_rows(W: np.ndarray, H: np.ndarray) -> None:
    """Fold H row norms into W in place; WH is unchanged."""
    for k in range(H.shape[0]):
        norm = float(np.linalg.norm(H[k]))
        if norm > 1e-12:
            W[:, k] *= norm
            H[k] /= norm
        else:
            # Dead component: direction is arbitrary, magnitude ~0 either way.
            W[:, k] *= norm
            H[k] = 1.0 / np.sqrt(3.0)


def nndsvd_ar_init(V: np.ndarray) -> NmfFactors:
    """Deterministic init from a rank-2 truncated SVD.

    The leading singular pair is non-negative up to sign and taken directly;
    the second pair is split into positive and negative parts and the larger
    side kept. Remaining zeros are filled with the mean of V so multiplicative
    updates start strictly positive everywhere.
    """
    V = as_patch_matrix(V)
    try:
        U, S, Vt = np.linalg.svd(V, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NmfInitError(f"SVD failed: {exc}") from exc
    if S[0] <= 1e-300:
        raise NmfInitError("all-zero patch matrix")

    n = V.shape[0]
    W = np.zeros((n, 2))
    H = np.zeros((2, 3))
    W[:, 0] = np.sqrt(S[0]) * np.abs(U[:, 0])
    H[0] = np.sqrt(S[0]) * np.abs(Vt[0])

    x, y = U[:, 1], Vt[1]
    xp, xn = np.clip(x, 0.0, None), np.clip(-x, 0.0, None)
    yp, yn = np.clip(y, 0.0, None), np.clip(-y, 0.0, None)
    pos = float(np.linalg.norm(xp) * np.linalg.norm(yp))
    neg = float(np.linalg.norm(xn) * np.linalg.norm(yn))
    if pos >= neg and pos > 0:
        u, v, sigma = xp / np.linalg.norm(xp), yp / np.linalg.norm(yp), pos
    elif neg > 0:
        u, v, sigma = xn / np.linalg.norm(xn), yn / np.linalg.norm(yn), neg
    else:
        u, v, sigma = np.zeros(n), np.zeros(3), 0.0
    W[:, 1] = np.sqrt(S[1] * sigma) * u
    H[1] = np.sqrt(S[1] * sigma) * v

    fill = float(V.mean())
    W[W <= 0] = fill
    H[H <= 0] = fill

    residual = float(np.linalg.norm(V - W @ H))
    factors = NmfFactors(W=W, H=H, residual=residual, iterations=0, converged=False)
    _normalize_h_rows(factors.W, factors.H)
    return factors


def solve_nmf(
    V: np.ndarray,
    init: NmfFactors | None = None,
    cfg: NmfConfig | None = None,
    collect_trace: bool = False,
) -> NmfFactors:
    """Multiplicative-update solve from the given (or default) initialization.

    Stops when the relative residual improvement drops below ``cfg.tol`` or
    after ``cfg.max_iter`` iterations; ``converged`` records which. With
    ``collect_trace`` the per-iteration residuals are attached, which is how
    the monotone-objective property is asserted in tests.
    """
    cfg = cfg or NmfConfig()
    V = as_patch_matrix(V)
    if init is None:
        init = nndsvd_ar_init(V)
    if np.any(init.W < 0) or np.any(init.H < 0):
        raise SkinMetricsError("initialization must be non-negative")
    W = np.ascontiguousarray(init.W, dtype=np.float64).copy()
    H = np.ascontiguousarray(init.H, dtype=np.float64).copy()

    trace = np.empty(cfg.max_iter + 1) if collect_trace else None
    try:
        iterations, converged, _ = _kernel.mu_iterate(
            V, W, H, cfg.max_iter, cfg.tol, cfg.eps, trace)
    except ValueError as exc:
        iteration = exc.args[1] if len(exc.args) > 1 else None
        raise NumericalFailureError(str(exc.args[0]), iteration=iteration) from exc

    _normalize_h_rows(W, H)
    residual = float(np.linalg.norm(V - W @ H))
    return NmfFactors(
        W=W, H=H, residual=residual, iterations=iterations, converged=converged,
        residual_trace=trace[: iterations + 1] if trace is not None else None)
