"""Offline eigenfunction machinery for dense features.

Per-dimension marginal histograms, the discretized density-operator
eigensolve over the histogram bins, global selection of the k smallest
eigenfunctions across dimensions, and O(n*k) linear interpolation of all
items through the selected eigenfunctions.

The B x B generalized problem solved per dimension is

    (Dt - P Wt P) g = sigma (P Dh) g

with Wt the RBF affinity between bin centers, P = diag(bin densities),
Dt = diag(column sums of P Wt P) and Dh = diag(column sums of P Wt).
Its smallest eigenvalue is exactly 0 (constant g); callers drop it via
the discard-epsilon rule in select_basis.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DegenerateInputError, DimensionError, NotEnoughEigenfunctionsError

DENSITY_FLOOR = 1e-8
B_RIDGE = 1e-12
DEFAULT_BINS = 500
DEFAULT_DISCARD_EPSILON = 1e-10
DEFAULT_RBF_FACTOR = 0.2

_MAGIC = b"EIGB0001"


@dataclass(frozen=True)
class MarginalHistogram:
    """Equal-width histogram of one rotated feature axis; densities sum to 1."""

    dimension_index: int
    bin_centers: np.ndarray
    densities: np.ndarray
    bin_width: float


@dataclass(frozen=True)
class Eigenfunction1D:
    """One eigenfunction of a single axis: values at that axis' bin centers."""

    dimension_index: int
    eigenvalue: float
    bin_centers: np.ndarray
    values_at_bins: np.ndarray


@dataclass(frozen=True)
class EigenBasis:
    """k eigenfunctions merged across dimensions, eigenvalues ascending."""

    functions: tuple[Eigenfunction1D, ...]
    rbf_sigma: float
    discard_epsilon: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([f.eigenvalue for f in self.functions])

    @property
    def k(self) -> int:
        return len(self.functions)


def build_histogram(column: np.ndarray, bins: int = DEFAULT_BINS,
                    dimension_index: int = 0) -> MarginalHistogram:
    """Histogram the marginal with `bins` equal-width bins spanning the
    column's [min, max], widened by 1e-9 at each end."""
    column = np.asarray(column, dtype=np.float64)
    if column.ndim != 1 or column.size == 0:
        raise DimensionError(f"need a nonempty vector, got shape {column.shape}")
    if not np.all(np.isfinite(column)):
        raise DegenerateInputError("column contains non-finite values")
    if bins < 2:
        raise DimensionError(f"need at least 2 bins, got {bins}")
    lo, hi = float(column.min()), float(column.max())
    if lo == hi:
        raise DegenerateInputError("constant column has no usable marginal")
    lo -= 1e-9
    hi += 1e-9
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(column, bins=edges)
    densities = counts / column.size
    centers = 0.5 * (edges[:-1] + edges[1:])
    return MarginalHistogram(
        dimension_index=dimension_index,
        bin_centers=centers,
        densities=densities,
        bin_width=(hi - lo) / bins,
    )


def operator_matrices(
    centers: np.ndarray, densities: np.ndarray, rbf_sigma: float
) -> tuple[np.ndarray, np.ndarray]:
    """(A, B) of the generalized problem A g = sigma B g over the bins.

    Densities are floored at 1e-8 and renormalized before forming P, and
    B picks up a 1e-12 ridge, so B stays positive definite even with
    empty bins.
    """
    p = np.maximum(np.asarray(densities, dtype=np.float64), DENSITY_FLOOR)
    p = p / p.sum()
    diff = centers[:, None] - centers[None, :]
    wt = np.exp(-(diff * diff) / (2.0 * rbf_sigma * rbf_sigma))
    pwp = np.outer(p, p) * wt
    dt = pwp.sum(axis=0)
    dh = (p[:, None] * wt).sum(axis=0)
    a = np.diag(dt) - pwp
    b = np.diag(p * dh + B_RIDGE)
    return a, b


def solve_eigenfunctions_1d(
    hist: MarginalHistogram, rbf_sigma: float, m: int
) -> list[Eigenfunction1D]:
    """m smallest eigenfunctions of the discretized operator for one axis."""
    bins = hist.bin_centers.size
    if not (1 <= m <= bins):
        raise DimensionError(f"m={m} outside [1, {bins}]")
    a, b = operator_matrices(hist.bin_centers, hist.densities, rbf_sigma)
    pairs = numerics.sym_generalized_eig(a, b, m)
    return [
        Eigenfunction1D(
            dimension_index=hist.dimension_index,
            eigenvalue=val,
            bin_centers=hist.bin_centers,
            values_at_bins=vec,
        )
        for val, vec in pairs
    ]


def select_basis(
    per_dim: list[list[Eigenfunction1D]],
    k: int,
    discard_epsilon: float = DEFAULT_DISCARD_EPSILON,
    rbf_sigma: float = DEFAULT_RBF_FACTOR,
) -> EigenBasis:
    """Merge eigenfunctions across dimensions, drop eigenvalues <= epsilon
    (the constant solutions), sort ascending, keep the first k.

    Ties break to the lower dimension index, then to the earlier position
    within that dimension's list.
    """
    candidates = []
    for functions in per_dim:
        for order, fn in enumerate(functions):
            if fn.eigenvalue > discard_epsilon:
                candidates.append((fn.eigenvalue, fn.dimension_index, order, fn))
    if len(candidates) < k:
        raise NotEnoughEigenfunctionsError(
            f"only {len(candidates)} eigenfunctions survive the {discard_epsilon} cut, need {k}"
        )
    candidates.sort(key=lambda t: (t[0], t[1], t[2]))
    chosen = tuple(t[3] for t in candidates[:k])
    return EigenBasis(functions=chosen, rbf_sigma=rbf_sigma, discard_epsilon=discard_epsilon)


def interpolate(basis: EigenBasis, x_rot: np.ndarray) -> np.ndarray:
    """n x k matrix of eigenfunction values at each item's rotated
    coordinates; out-of-range coordinates clamp to the end bin values."""
    x_rot = np.asarray(x_rot, dtype=np.float64)
    if x_rot.ndim != 2:
        raise DimensionError(f"need a 2-D matrix, got shape {x_rot.shape}")
    max_dim = max(f.dimension_index for f in basis.functions)
    if max_dim >= x_rot.shape[1]:
        raise DimensionError(
            f"basis references dimension {max_dim}, data has {x_rot.shape[1]} columns"
        )
    cols = [
        np.interp(x_rot[:, f.dimension_index], f.bin_centers, f.values_at_bins)
        for f in basis.functions
    ]
    return np.column_stack(cols)


def eq2_residual(fn: Eigenfunction1D, densities: np.ndarray, rbf_sigma: float) -> float:
    """||(Dt - P Wt P) g - sigma (P Dh) g|| for a returned eigenfunction."""
    a, b = operator_matrices(fn.bin_centers, densities, rbf_sigma)
    g = fn.values_at_bins
    return float(np.linalg.norm(a @ g - fn.eigenvalue * (b @ g)))


def save_basis(path, basis: EigenBasis) -> None:
    """Binary container: magic "EIGB0001", then little-endian float64
    [rbf_sigma, discard_epsilon, k] and per-eigenfunction records
    [dimension_index, eigenvalue, B, centers..., values...]."""
    parts = [_MAGIC]
    parts.append(struct.pack("<3d", basis.rbf_sigma, basis.discard_epsilon, float(basis.k)))
    for fn in basis.functions:
        bins = fn.bin_centers.size
        parts.append(struct.pack("<3d", float(fn.dimension_index), fn.eigenvalue, float(bins)))
        parts.append(fn.bin_centers.astype("<f8").tobytes())
        parts.append(fn.values_at_bins.astype("<f8").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def load_basis(path) -> EigenBasis:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != _MAGIC:
        raise DimensionError(f"{path}: bad magic {blob[:8]!r}")
    off = 8
    rbf_sigma, discard_epsilon, k = struct.unpack_from("<3d", blob, off)
    off += 24
    functions = []
    for _ in range(int(k)):
        dim, val, bins = struct.unpack_from("<3d", blob, off)
        off += 24
        bins = int(bins)
        centers = np.frombuffer(blob, dtype="<f8", count=bins, offset=off).copy()
        off += 8 * bins
        values = np.frombuffer(blob, dtype="<f8", count=bins, offset=off).copy()
        off += 8 * bins
        functions.append(
            Eigenfunction1D(
                dimension_index=int(dim),
                eigenvalue=val,
                bin_centers=centers,
                values_at_bins=values,
            )
        )
    return EigenBasis(
        functions=tuple(functions), rbf_sigma=rbf_sigma, discard_epsilon=discard_epsilon
    )
