"""Dense weighted least squares with a conditioning-aware fallback.

The primary route forms the Gram matrix of the design columns and factors
it (fast, and exact for the diagonal norms used everywhere in this
package). Gram matrices of shifted bases grow ill-conditioned with degree,
so past a condition threshold the solve falls back to an orthogonal
factorization of the design matrix itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConditioningError

CHOLESKY = "cholesky"
QR_FALLBACK = "qr_fallback"

DEFAULT_COND_THRESHOLD = 1e10


@dataclass
class LeastSquaresOutcome:
    coefficients: np.ndarray
    residual: float
    gram_condition: float
    method: str


def solve_least_squares(
    design: np.ndarray,
    target: np.ndarray,
    cond_threshold: float = DEFAULT_COND_THRESHOLD,
) -> LeastSquaresOutcome:
    """Minimize ||design @ x - target||_2.

    The reported residual is evaluated directly on the returned x, so it is
    always an achievable objective value.
    """
    design = np.asarray(design, dtype=complex)
    target = np.asarray(target, dtype=complex)
    _, n = design.shape
    if n == 0:
        return LeastSquaresOutcome(
            np.zeros(0, dtype=complex), float(np.linalg.norm(target)), 1.0, CHOLESKY
        )
    gram = design.conj().T @ design
    rhs = design.conj().T @ target
    cond = float(np.linalg.cond(gram))
    x = None
    method = CHOLESKY
    if np.isfinite(cond) and cond <= cond_threshold:
        try:
            factor = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
            x = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
        except (scipy.linalg.LinAlgError, ValueError):
            x = None
    if x is None:
        method = QR_FALLBACK
        x = np.linalg.lstsq(design, target, rcond=None)[0]
    if not np.all(np.isfinite(x)):
        raise ConditioningError("least-squares solve produced non-finite coefficients")
    residual = float(np.linalg.norm(target - design @ x))
    return LeastSquaresOutcome(x, residual, cond, method)
