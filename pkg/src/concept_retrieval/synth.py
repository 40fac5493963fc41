"""Synthetic datasets: clustered features, a class taxonomy, and concepts.

Classes sit at the leaves of a balanced tree; cluster centers follow the
tree (siblings stay close), so the feature geometry and the hierarchy
carry consistent signal. Items are truncated-Gaussian clouds around their
class center — truncation keeps marginal densities compactly supported,
which the histogram-based eigenfunction pipeline needs at desk scale.
Concepts are the leaf sets under tree nodes whose item share stays below
the configured positive prior.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleConceptError, InfeasibleConfigError, InfeasibleSplitError
from .solver import LabelState
from .taxonomy import Taxonomy, TaxonomyNode

DEFAULT_CLIP_SIGMAS = 2.0

# geometry of the class-center random walk down the tree
CENTER_SCALE = 1.8
CENTER_DECAY = 0.7


@dataclass(frozen=True)
class SyntheticConfig:
    n: int = 10_000
    d: int = 64
    num_classes: int = 256
    positive_prior: float = 0.02
    cluster_spread: float = 1.4
    taxonomy_depth: int = 3
    seed: int = 0
    clip_sigmas: float = DEFAULT_CLIP_SIGMAS

    def __post_init__(self):
        if self.positive_prior <= 0 or self.positive_prior > 0.5:
            raise InfeasibleConfigError("positive_prior must be in (0, 0.5]")
        if self.positive_prior * self.n < 10:
            raise InfeasibleConfigError(
                "positive_prior * n must be at least 10 to seed a session"
            )
        if self.cluster_spread <= 0:
            raise InfeasibleConfigError("cluster_spread must be positive")


@dataclass(frozen=True)
class Concept:
    name: str
    positive_classes: frozenset[str]


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    item_classes: list[str]
    taxonomy: Taxonomy
    concepts: list[Concept] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    def concept_mask(self, concept: Concept) -> np.ndarray:
        members = concept.positive_classes
        return np.fromiter(
            (c in members for c in self.item_classes), dtype=bool, count=self.n
        )


def truncated_normal(
    rng: np.random.Generator,
    loc: np.ndarray,
    scale: np.ndarray | float,
    size: tuple[int, int],
    clip_sigmas: float = DEFAULT_CLIP_SIGMAS,
) -> np.ndarray:
    """Gaussian sample with rejection outside clip_sigmas per coordinate,
    so the support is compact and has no boundary atoms."""
    loc = np.asarray(loc, dtype=np.float64)
    scale = np.broadcast_to(np.asarray(scale, dtype=np.float64), (size[1],))
    out = np.empty(size)
    pending = np.ones(size[0], dtype=bool)
    while pending.any():
        candidate = rng.normal(loc=loc, scale=scale, size=(int(pending.sum()), size[1]))
        ok = np.all(np.abs(candidate - loc) <= clip_sigmas * scale, axis=1)
        rows = np.flatnonzero(pending)[ok]
        out[rows] = candidate[ok]
        pending[rows] = False
    return out


def branching_factors(num_classes: int, depth: int) -> list[int]:
    """Factor num_classes into `depth` integer branching factors, each >= 2,
    as balanced as possible; deterministic."""
    if depth < 1 or num_classes < 2:
        raise InfeasibleConfigError(f"cannot build {num_classes} classes at depth {depth}")
    factors: list[int] = []
    remaining = num_classes
    for level in range(depth, 0, -1):
        if level == 1:
            if remaining < 2:
                raise InfeasibleConfigError(
                    f"num_classes={num_classes} does not factor into {depth} levels"
                )
            factors.append(remaining)
            break
        target = round(remaining ** (1.0 / level))
        chosen = None
        for delta in range(remaining):
            for cand in (target - delta, target + delta):
                if cand >= 2 and remaining % cand == 0 and remaining // cand >= 2 ** (level - 1):
                    chosen = cand
                    break
            if chosen:
                break
        if chosen is None:
            raise InfeasibleConfigError(
                f"num_classes={num_classes} does not factor into {depth} levels"
            )
        factors.append(chosen)
        remaining //= chosen
    # widest fan-out at the root, smallest sibling groups at the leaves, so
    # leaf-parent subtrees stay small enough to serve as rare concepts
    return sorted(factors, reverse=True)


def generate_synthetic(config: SyntheticConfig) -> Dataset:
    rng = np.random.default_rng(config.seed)
    factors = branching_factors(config.num_classes, config.taxonomy_depth)

    # tree of node ids: root, then g<level>-<path> internals, c### leaves
    nodes = [TaxonomyNode(id="root", parent=None, count=0)]
    level_nodes = ["root"]
    centers = {"root": np.zeros(config.d)}
    for level, branching in enumerate(factors, start=1):
        scale = CENTER_SCALE * config.cluster_spread * (CENTER_DECAY ** (level - 1))
        next_nodes = []
        for parent in level_nodes:
            for j in range(branching):
                node_id = (
                    f"c{len(next_nodes):03d}" if level == len(factors)
                    else f"g{level}-{parent}-{j}"
                )
                # placeholder count; leaf counts filled below
                next_nodes.append(node_id)
                centers[node_id] = centers[parent] + rng.normal(size=config.d) * scale
                nodes.append(TaxonomyNode(id=node_id, parent=parent, count=0))
        level_nodes = next_nodes
    leaves = level_nodes

    # uneven class sizes: equal counts make the symmetric tree's class-level
    # spectrum exactly degenerate, which turns its eigenvectors into
    # arbitrary rotations
    weights = rng.uniform(0.6, 1.4, size=len(leaves))
    raw = weights / weights.sum() * config.n
    counts_arr = np.maximum(np.floor(raw).astype(int), 1)
    short = config.n - int(counts_arr.sum())
    order_fix = np.argsort(raw - np.floor(raw))[::-1]
    for i in range(abs(short)):
        counts_arr[order_fix[i % len(leaves)]] += 1 if short > 0 else -1
    counts = {leaf: int(c) for leaf, c in zip(leaves, counts_arr)}
    nodes = [
        TaxonomyNode(id=n.id, parent=n.parent, count=counts.get(n.id, 0)) for n in nodes
    ]
    taxonomy = Taxonomy(nodes)

    item_classes: list[str] = []
    blocks = []
    for leaf in leaves:
        m = counts[leaf]
        blocks.append(
            truncated_normal(
                rng, centers[leaf], config.cluster_spread, (m, config.d), config.clip_sigmas
            )
        )
        item_classes.extend([leaf] * m)
    features = np.vstack(blocks)
    order = rng.permutation(config.n)
    features = features[order]
    item_classes = [item_classes[i] for i in order]

    concepts = []
    frontier = ["root"]
    while frontier:
        node = frontier.pop(0)
        children = taxonomy.children(node)
        frontier.extend(children)
        if node == "root":
            continue
        share = taxonomy.prior(node)
        if share <= config.positive_prior:
            concepts.append(
                Concept(name=node, positive_classes=frozenset(taxonomy.leaves_under(node)))
            )
    if not concepts:
        raise InfeasibleConfigError(
            "no tree node stays under the configured positive prior"
        )
    return Dataset(
        features=features, item_classes=item_classes, taxonomy=taxonomy, concepts=concepts
    )


def split(
    dataset: Dataset, test_per_class: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint (pool, test) item indices with test_per_class per class."""
    rng = np.random.default_rng(seed)
    classes = sorted(set(dataset.item_classes))
    item_classes = np.asarray(dataset.item_classes)
    test_parts = []
    for cls in classes:
        members = np.flatnonzero(item_classes == cls)
        if members.size <= test_per_class:
            raise InfeasibleSplitError(
                f"class {cls!r} has {members.size} items, needs > {test_per_class}"
            )
        test_parts.append(rng.choice(members, size=test_per_class, replace=False))
    test_idx = np.sort(np.concatenate(test_parts))
    mask = np.ones(dataset.n, dtype=bool)
    mask[test_idx] = False
    return np.flatnonzero(mask), test_idx


def initial_labels(
    dataset: Dataset,
    concept: Concept,
    pool: np.ndarray,
    seed: int,
    lambda_reg: float,
    positives: int = 9,
    negatives: int = 1,
) -> LabelState:
    """Seed labels sampled uniformly from the pool: 9 in-concept and 1 not,
    by default."""
    rng = np.random.default_rng(seed)
    mask = dataset.concept_mask(concept)
    pos_pool = pool[mask[pool]]
    neg_pool = pool[~mask[pool]]
    if pos_pool.size < positives or neg_pool.size < negatives:
        raise InfeasibleConceptError(
            f"concept {concept.name!r}: pool has {pos_pool.size} positives / "
            f"{neg_pool.size} negatives, need {positives}/{negatives}"
        )
    chosen_pos = rng.choice(pos_pool, size=positives, replace=False)
    chosen_neg = rng.choice(neg_pool, size=negatives, replace=False)
    labels = {int(i): 1 for i in chosen_pos}
    labels.update({int(i): -1 for i in chosen_neg})
    return LabelState(labels=labels, lambda_reg=lambda_reg)
