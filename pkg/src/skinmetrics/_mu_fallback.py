"""Pure-numpy multiplicative-update loop; same contract as the compiled kernel.

Used when the Cython extension is unavailable or explicitly disabled via
``SKINMETRICS_PURE_PYTHON=1``. Semantics (update order, denominator flooring,
stopping rule) mirror ``_mu_kernel.pyx`` exactly; only summation order may
differ at the last few ulps.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def mu_iterate(
    V: np.ndarray,
    W: np.ndarray,
    H: np.ndarray,
    max_iter: int,
    tol: float,
    eps: float,
    trace: np.ndarray | None = None,
) -> tuple[int, bool, float]:
    """Minimize ||V - WH||_F by alternating multiplicative updates, in place.

    ``trace``, when given, must hold ``max_iter + 1`` slots and receives the
    residual before the first update and after every completed iteration.
    Returns ``(iterations_run, converged, final_residual)``; raises
    ``ValueError`` when a non-finite residual appears (iteration number is in
    the message).
    """
    if trace is not None and trace.shape[0] < max_iter + 1:
        raise ValueError("trace array too short")
    res = float(np.linalg.norm(V - W @ H))
    if trace is not None:
        trace[0] = res
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        H *= (W.T @ V) / np.maximum(W.T @ W @ H, eps)
        W *= (V @ H.T) / np.maximum(W @ (H @ H.T), eps)
        prev = res
        res = float(np.linalg.norm(V - W @ H))
        if trace is not None:
            trace[it] = res
        if not np.isfinite(res):
            raise ValueError(f"non-finite residual at iteration {it}", it)
        rel = (prev - res) / prev if prev > 0.0 else 0.0
        if rel < tol:
            converged = True
            break
    return it, converged, res
