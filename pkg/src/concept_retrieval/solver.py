"""Online label-function solves and modality fusion.

solve_reduced is the O(n k + k^3) production path: project the smoothness
objective onto a k-column basis U with penalty diag(eigenvalues) and fit
the labels through the k x k system

    (Sigma + U^T Lambda U) alpha = U^T Lambda y,   f = U alpha.

exact_dense_solve is the brute-force oracle that solves (L + Lambda) f =
Lambda y on an explicit n x n affinity matrix; tests compare the two.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import DimensionError, MissingModalityError, NoLabelsError

DEFAULT_LAMBDA_REG = 100.0


@dataclass(frozen=True)
class LabelState:
    """Sparse labels (item index -> +/-1) and the shared label weight."""

    labels: dict[int, int] = field(default_factory=dict)
    lambda_reg: float = DEFAULT_LAMBDA_REG

    def __post_init__(self):
        for idx, y in self.labels.items():
            if y not in (-1, 1):
                raise DimensionError(f"label for item {idx} must be +/-1, got {y}")
            if idx < 0:
                raise DimensionError(f"negative item index {idx}")
        if self.lambda_reg <= 0:
            raise DimensionError("lambda_reg must be positive")

    def with_label(self, item: int, label: int) -> "LabelState":
        new = dict(self.labels)
        new[item] = label
        return LabelState(labels=new, lambda_reg=self.lambda_reg)

    @property
    def indices(self) -> np.ndarray:
        return np.fromiter(self.labels.keys(), dtype=np.intp, count=len(self.labels))

    @property
    def values(self) -> np.ndarray:
        return np.fromiter(self.labels.values(), dtype=np.float64, count=len(self.labels))


@dataclass(frozen=True)
class LabelFunction:
    values: np.ndarray
    modality_tag: str

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class FusionWeights:
    weights: dict[str, float]

    def __post_init__(self):
        if any(w < 0 for w in self.weights.values()):
            raise DimensionError("fusion weights must be nonnegative")
        if abs(sum(self.weights.values()) - 1.0) > 1e-12:
            raise DimensionError("fusion weights must sum to 1")


def solve_reduced(
    u: np.ndarray,
    eigenvalues: np.ndarray,
    state: LabelState,
    modality_tag: str = "visual",
) -> LabelFunction:
    """Solve the reduced system for one modality's basis (U, eigenvalues)."""
    if not state.labels:
        raise NoLabelsError("at least one labeled item is required")
    u = np.asarray(u, dtype=np.float64)
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    n, k = u.shape
    if eigenvalues.shape != (k,):
        raise DimensionError(f"eigenvalues shape {eigenvalues.shape} does not match k={k}")
    idx = state.indices
    if idx.size and idx.max() >= n:
        raise DimensionError(f"labeled index {idx.max()} outside collection of {n}")
    ul = u[idx]
    y = state.values
    lam = state.lambda_reg
    a = np.diag(eigenvalues) + lam * (ul.T @ ul)
    b = lam * (ul.T @ y)
    alpha = numerics.solve_linear(a, b)
    return LabelFunction(values=u @ alpha, modality_tag=modality_tag)


def exact_dense_solve(
    w: np.ndarray, state: LabelState, modality_tag: str = "dense"
) -> LabelFunction:
    """Oracle: L = D - W, solve (L + Lambda) f = Lambda y on the full graph."""
    if not state.labels:
        raise NoLabelsError("at least one labeled item is required")
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[0]
    if w.shape != (n, n):
        raise DimensionError(f"W must be square, got {w.shape}")
    idx = state.indices
    if idx.size and idx.max() >= n:
        raise DimensionError(f"labeled index {idx.max()} outside collection of {n}")
    lam_diag = np.zeros(n)
    lam_diag[idx] = state.lambda_reg
    yvec = np.zeros(n)
    yvec[idx] = state.values
    a = np.diag(w.sum(axis=1) + lam_diag) - w
    f = numerics.solve_linear(a, lam_diag * yvec)
    return LabelFunction(values=f, modality_tag=modality_tag)


def fuse(functions: list[LabelFunction], weights: FusionWeights) -> LabelFunction:
    """Pointwise convex combination of per-modality label functions."""
    if not functions:
        raise MissingModalityError("no label functions to fuse")
    by_tag = {f.modality_tag: f for f in functions}
    if set(by_tag) != set(weights.weights):
        raise MissingModalityError(
            f"functions cover {sorted(by_tag)}, weights cover {sorted(weights.weights)}"
        )
    n = len(functions[0])
    if any(len(f) != n for f in functions):
        raise DimensionError("label functions have different lengths")
    out = np.zeros(n)
    for tag, wgt in weights.weights.items():
        out += wgt * by_tag[tag].values
    return LabelFunction(values=out, modality_tag="fused")
