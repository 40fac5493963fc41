"""Dense linear algebra: PCA, symmetric generalized eigensolve, linear solve.

All operations are pure functions on float64 arrays and deterministic for
fixed input bytes. Eigenvector sign ambiguity is resolved everywhere by
forcing the largest-magnitude entry of each vector positive (first such
entry on ties), so fixtures diff cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailureError,
    DegenerateInputError,
    DimensionError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    SingularSystemError,
)

SYMMETRY_TOL = 1e-10
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class PcaModel:
    """Fitted rotation: mean (d,), orthonormal components (d, d_out),
    explained variances sorted descending (d_out,)."""

    mean: np.ndarray
    components: np.ndarray
    explained_variances: np.ndarray

    @property
    def d_out(self) -> int:
        return self.components.shape[1]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's largest-|.| entry is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            out[:, j] = -col
    return out


def pca_fit(x: np.ndarray, d_out: int) -> PcaModel:
    """Top-d_out principal directions of mean-centered x, via the d x d
    sample covariance (n is assumed >> d at the scales this runs at)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DimensionError(f"need a 2-D matrix with >= 2 rows, got shape {x.shape}")
    n, d = x.shape
    if not (1 <= d_out <= min(n, d)):
        raise DimensionError(f"d_out={d_out} outside [1, min(n={n}, d={d})]")
    mean = x.mean(axis=0)
    xc = x - mean
    cov = (xc.T @ xc) / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    if eigvals[-1] <= 0.0 or not np.isfinite(eigvals[-1]):
        raise DegenerateInputError("input has zero variance in every direction")
    order = np.argsort(eigvals)[::-1][:d_out]
    components = _fix_signs(eigvecs[:, order])
    variances = np.maximum(eigvals[order], 0.0)
    return PcaModel(mean=mean, components=components, explained_variances=variances)


def pca_transform(model: PcaModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.mean.shape[0]:
        raise DimensionError(
            f"expected {model.mean.shape[0]} columns, got shape {x.shape}"
        )
    return (x - model.mean) @ model.components


def sym_generalized_eig(
    a: np.ndarray, b: np.ndarray, m: int
) -> list[tuple[float, np.ndarray]]:
    """m smallest eigenpairs of A g = sigma B g with symmetric A, SPD B.

    Eigenvalues come back ascending; eigenvectors are B-orthonormal with
    signs fixed as in pca_fit. B's positive-definiteness is checked by
    Cholesky; regularization is the caller's job.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"A and B must be square and same shape: {a.shape} vs {b.shape}")
    if not (1 <= m <= a.shape[0]):
        raise DimensionError(f"m={m} outside [1, {a.shape[0]}]")
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise NotSymmetricError("A is not symmetric within 1e-10")
    if np.max(np.abs(b - b.T)) > SYMMETRY_TOL:
        raise NotSymmetricError("B is not symmetric within 1e-10")
    try:
        np.linalg.cholesky(b)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("B is not positive definite") from exc
    try:
        eigvals, eigvecs = scipy.linalg.eigh(a, b, subset_by_index=[0, m - 1])
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise ConvergenceFailureError(str(exc)) from exc
    eigvecs = _fix_signs(eigvecs)
    return [(float(eigvals[j]), eigvecs[:, j]) for j in range(m)]


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for symmetric PSD A, minimizing ||A x - b||.

    Fast path is a Cholesky solve; on semi-definite A falls back to
    least squares (minimum-norm) and raises SingularSystemError when the
    residual shows b is outside A's range.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.shape[0] != a.shape[0]:
        raise DimensionError(f"incompatible shapes A={a.shape}, b={b.shape}")
    try:
        c, low = scipy.linalg.cho_factor(a, check_finite=False)
        x = scipy.linalg.cho_solve((c, low), b, check_finite=False)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError):
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
    residual = np.linalg.norm(a @ x - b)
    if residual > RESIDUAL_TOL * (1.0 + np.linalg.norm(b)):
        raise SingularSystemError(
            f"system inconsistent: residual {residual:.3e} exceeds tolerance"
        )
    return x
