"""Offline pipelines turning raw inputs into per-modality bases.

Visual: PCA-rotate the features, histogram each rotated axis, solve the
per-axis eigenfunction problem, select the k smallest across axes, and
interpolate every item through them. Semantic: exact class affinity from
the hierarchy, one class-level eigensolve, and per-item row assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import eigenmap, numerics, taxonomy as tx
from .config import EngineConfig
from .errors import DimensionError


@dataclass(frozen=True)
class Modality:
    """What the online solver needs from one modality."""

    tag: str
    u: np.ndarray
    eigenvalues: np.ndarray

    @property
    def k(self) -> int:
        return self.u.shape[1]


@dataclass(frozen=True)
class VisualAssets:
    pca: numerics.PcaModel
    basis: eigenmap.EigenBasis
    sigmas: np.ndarray            # absolute per-dimension RBF bandwidths
    rotated: np.ndarray           # PCA-rotated data the histograms came from
    modality: Modality


@dataclass(frozen=True)
class SemanticAssets:
    class_basis: tx.ClassBasis
    affinity: np.ndarray
    priors: np.ndarray
    modality: Modality


def per_dim_factors(cfg: EngineConfig, d: int) -> np.ndarray:
    factor = cfg.rbf_sigma_factor
    if np.isscalar(factor):
        return np.full(d, float(factor))
    factor = np.asarray(factor, dtype=np.float64)
    if factor.shape != (d,):
        raise DimensionError(f"rbf_sigma_factor has {factor.size} entries for {d} dimensions")
    return factor


def build_visual(features: np.ndarray, cfg: EngineConfig) -> VisualAssets:
    features = np.asarray(features, dtype=np.float64)
    n, d_in = features.shape
    d_out = cfg.pca_dims if cfg.pca_dims is not None else min(d_in, 64)
    d_out = min(d_out, d_in, n)
    pca = numerics.pca_fit(features, d_out)
    rotated = numerics.pca_transform(pca, features)
    factors = per_dim_factors(cfg, d_out)
    m_per_dim = min(cfg.bins, cfg.k_visual + 1)
    per_dim: list[list[eigenmap.Eigenfunction1D]] = []
    sigmas = np.empty(d_out)
    for dim in range(d_out):
        hist = eigenmap.build_histogram(rotated[:, dim], cfg.bins, dimension_index=dim)
        sigma = factors[dim] * hist.bin_width * cfg.bins
        sigmas[dim] = sigma
        per_dim.append(eigenmap.solve_eigenfunctions_1d(hist, sigma, m_per_dim))
    rbf_sigma = float(factors[0]) if np.isscalar(cfg.rbf_sigma_factor) else float(factors.mean())
    basis = eigenmap.select_basis(
        per_dim, cfg.k_visual, discard_epsilon=cfg.discard_epsilon, rbf_sigma=rbf_sigma
    )
    u = eigenmap.interpolate(basis, rotated)
    return VisualAssets(
        pca=pca,
        basis=basis,
        sigmas=sigmas,
        rotated=rotated,
        modality=Modality(tag="visual", u=u, eigenvalues=basis.eigenvalues),
    )


def class_priors(
    taxonomy: tx.Taxonomy, classes: list[str], item_classes: list[str], mode: str
) -> np.ndarray:
    if mode == "uniform":
        return np.full(len(classes), 1.0 / len(classes))
    if mode != "frequency":
        raise DimensionError(f"unknown class prior mode {mode!r}")
    counts = {c: 0 for c in classes}
    for c in item_classes:
        if c in counts:
            counts[c] += 1
    total = sum(counts.values())
    if total == 0:
        raise DimensionError("no item belongs to any of the given classes")
    return np.array([counts[c] / total for c in classes])


def build_semantic(
    taxonomy: tx.Taxonomy, item_classes: list[str], cfg: EngineConfig
) -> SemanticAssets:
    classes = sorted(set(item_classes))
    affinity = tx.class_affinity(
        taxonomy, classes, semantic_sigma=cfg.semantic_sigma, form=cfg.affinity_form
    )
    priors = class_priors(taxonomy, classes, item_classes, cfg.class_prior)
    basis = tx.build_class_basis(
        affinity, priors, classes, cfg.k_semantic, discard_epsilon=cfg.discard_epsilon
    )
    u = tx.assign_item_vectors(basis, item_classes)
    return SemanticAssets(
        class_basis=basis,
        affinity=affinity,
        priors=priors,
        modality=Modality(tag="semantic", u=u, eigenvalues=basis.eigenvalues),
    )
