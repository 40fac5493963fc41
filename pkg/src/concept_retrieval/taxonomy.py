"""Semantic modality: class hierarchy, Lin similarity, class-level basis.

The hierarchy is a rooted tree of nodes with item counts; p(node) is the
fraction of all items inside the node's subtree. Lin similarity between
classes A and B is

    2 * log p(lca(A, B)) / (log p(A) + log p(B))

which is 1 on the diagonal and falls to 0 when the only shared ancestor
covers the whole collection. Class affinity applies an RBF to the Lin
dissimilarity (or uses the similarity directly, behind a switch), and the
class-level eigenvector problem reuses the same discretized operator as
the dense-feature path, with class priors playing the density role.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import (
    CycleDetectedError,
    DimensionError,
    DuplicateNodeError,
    EmptySubtreeError,
    MultipleRootsError,
    NotEnoughEigenfunctionsError,
    RootOperandError,
    UnknownClassError,
    UnknownParentError,
    ZeroTotalItemsError,
)

PRIOR_FLOOR = 1e-8
B_RIDGE = 1e-12
DEFAULT_SEMANTIC_SIGMA = 0.5


@dataclass(frozen=True)
class TaxonomyNode:
    id: str
    parent: str | None
    count: int


class Taxonomy:
    """Validated rooted tree with precomputed subtree occurrence priors."""

    def __init__(self, nodes: list[TaxonomyNode]):
        self._nodes = {n.id: n for n in nodes}
        if len(self._nodes) != len(nodes):
            seen = set()
            for n in nodes:
                if n.id in seen:
                    raise DuplicateNodeError(f"node id {n.id!r} appears twice")
                seen.add(n.id)
        roots = [n.id for n in nodes if n.parent is None]
        if len(roots) != 1:
            raise MultipleRootsError(f"expected exactly one root, found {len(roots)}")
        self.root = roots[0]
        for n in nodes:
            if n.parent is not None and n.parent not in self._nodes:
                raise UnknownParentError(f"node {n.id!r} references missing parent {n.parent!r}")
            if n.count < 0:
                raise ZeroTotalItemsError(f"node {n.id!r} has negative count")
        self._children: dict[str, list[str]] = {n.id: [] for n in nodes}
        for n in nodes:
            if n.parent is not None:
                self._children[n.parent].append(n.id)
        self._depth = self._walk_depths()
        total = sum(n.count for n in nodes)
        if total == 0:
            raise ZeroTotalItemsError("taxonomy holds zero items")
        self._subtree = self._accumulate_subtree_counts()
        for node_id, sub in self._subtree.items():
            if sub == 0:
                raise EmptySubtreeError(f"subtree of {node_id!r} holds zero items")
        self._total = total
        self._prior = {i: self._subtree[i] / total for i in self._nodes}

    def _walk_depths(self) -> dict[str, int]:
        depth = {self.root: 0}
        frontier = [self.root]
        while frontier:
            nxt = []
            for node in frontier:
                for child in self._children[node]:
                    depth[child] = depth[node] + 1
                    nxt.append(child)
            frontier = nxt
        if len(depth) != len(self._nodes):
            raise CycleDetectedError("some nodes are unreachable from the root")
        return depth

    def _accumulate_subtree_counts(self) -> dict[str, int]:
        order = sorted(self._nodes, key=lambda i: self._depth[i], reverse=True)
        sub = {i: self._nodes[i].count for i in self._nodes}
        for node in order:
            parent = self._nodes[node].parent
            if parent is not None:
                sub[parent] += sub[node]
        return sub

    # -- queries -------------------------------------------------------------

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    @property
    def node_ids(self) -> list[str]:
        return list(self._nodes)

    @property
    def total_items(self) -> int:
        return self._total

    def children(self, node_id: str) -> list[str]:
        return list(self._children[node_id])

    def leaves_under(self, node_id: str) -> list[str]:
        out = []
        stack = [node_id]
        while stack:
            node = stack.pop()
            kids = self._children[node]
            if kids:
                stack.extend(reversed(kids))
            else:
                out.append(node)
        return out

    def prior(self, node_id: str) -> float:
        if node_id not in self._nodes:
            raise UnknownClassError(f"unknown node {node_id!r}")
        return self._prior[node_id]

    def lowest_common_ancestor(self, a: str, b: str) -> str:
        da, db = self._depth[a], self._depth[b]
        while da > db:
            a = self._nodes[a].parent
            da -= 1
        while db > da:
            b = self._nodes[b].parent
            db -= 1
        while a != b:
            a = self._nodes[a].parent
            b = self._nodes[b].parent
        return a


def load_taxonomy(document: str | bytes | dict) -> Taxonomy:
    """Parse and validate the JSON taxonomy document
    { "nodes": [ { "id", "parent", "count" } ] }."""
    if isinstance(document, (str, bytes)):
        document = json.loads(document)
    nodes = [
        TaxonomyNode(id=str(row["id"]),
                     parent=None if row["parent"] is None else str(row["parent"]),
                     count=int(row.get("count", 0)))
        for row in document["nodes"]
    ]
    return Taxonomy(nodes)


def load_item_classes(text: str | bytes) -> tuple[list[str], list[str]]:
    """Parse the item-class CSV (header item_id,class_id) preserving order."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or reader.fieldnames[:2] != ["item_id", "class_id"]:
        raise DimensionError(
            f"expected CSV header item_id,class_id, got {reader.fieldnames}"
        )
    item_ids, class_ids = [], []
    for row in reader:
        item_ids.append(row["item_id"])
        class_ids.append(row["class_id"])
    return item_ids, class_ids


def lin_similarity(taxonomy: Taxonomy, a: str, b: str) -> float:
    """Information-theoretic similarity in [0, 1]; exactly 1 for a == b.

    Raises RootOperandError when an operand's prior is 1 (its log is 0, so
    the quotient is ill-posed); an lca with prior 1 yields 0 by the
    formula's own limit.
    """
    pa, pb = taxonomy.prior(a), taxonomy.prior(b)
    if pa >= 1.0 or pb >= 1.0:
        raise RootOperandError(f"operand with occurrence probability 1: {a!r} / {b!r}")
    if a == b:
        return 1.0
    p_lca = taxonomy.prior(taxonomy.lowest_common_ancestor(a, b))
    if p_lca >= 1.0:
        return 0.0
    return 2.0 * math.log(p_lca) / (math.log(pa) + math.log(pb))


def class_affinity(
    taxonomy: Taxonomy,
    classes: list[str],
    semantic_sigma: float = DEFAULT_SEMANTIC_SIGMA,
    form: str = "rbf",
) -> np.ndarray:
    """Symmetric class-affinity matrix with unit diagonal.

    form="rbf" (default): exp(-(1 - lin)^2 / (2 sigma^2)); form="lin" uses
    the similarity itself as the affinity.
    """
    if form not in ("rbf", "lin"):
        raise DimensionError(f"unknown affinity form {form!r}")
    c = len(classes)
    sim = np.ones((c, c))
    for i in range(c):
        for j in range(i + 1, c):
            sim[i, j] = sim[j, i] = lin_similarity(taxonomy, classes[i], classes[j])
    if form == "lin":
        return sim
    d = 1.0 - sim
    return np.exp(-(d * d) / (2.0 * semantic_sigma * semantic_sigma))


@dataclass(frozen=True)
class ClassBasis:
    """Per-class eigenvector rows: vectors is C x k_s, eigenvalues ascending."""

    class_ids: tuple[str, ...]
    vectors: np.ndarray
    eigenvalues: np.ndarray


def build_class_basis(
    affinity: np.ndarray,
    class_priors: np.ndarray,
    class_ids: list[str],
    k_s: int,
    discard_epsilon: float = 1e-10,
) -> ClassBasis:
    """Solve the class-level eigenvector problem exactly (no histogram):
    priors play the bin-density role, the constant solution is discarded
    by the epsilon rule, and the k_s smallest survivors are kept."""
    affinity = np.asarray(affinity, dtype=np.float64)
    c = affinity.shape[0]
    if affinity.shape != (c, c) or len(class_ids) != c or len(class_priors) != c:
        raise DimensionError("affinity, priors and class ids disagree on C")
    p = np.maximum(np.asarray(class_priors, dtype=np.float64), PRIOR_FLOOR)
    p = p / p.sum()
    pwp = np.outer(p, p) * affinity
    dt = pwp.sum(axis=0)
    dh = (p[:, None] * affinity).sum(axis=0)
    a = np.diag(dt) - pwp
    b = np.diag(p * dh + B_RIDGE)
    pairs = numerics.sym_generalized_eig(a, b, c)
    survivors = [(val, vec) for val, vec in pairs if val > discard_epsilon]
    if len(survivors) < k_s:
        raise NotEnoughEigenfunctionsError(
            f"only {len(survivors)} class eigenfunctions survive, need {k_s}"
        )
    kept = survivors[:k_s]
    vectors = np.column_stack([vec for _, vec in kept])
    eigenvalues = np.array([val for val, _ in kept])
    return ClassBasis(class_ids=tuple(class_ids), vectors=vectors, eigenvalues=eigenvalues)


def assign_item_vectors(basis: ClassBasis, item_classes: list[str]) -> np.ndarray:
    """n x k_s matrix whose row i is the basis row of item i's class."""
    index = {cid: row for row, cid in enumerate(basis.class_ids)}
    try:
        rows = np.array([index[c] for c in item_classes], dtype=np.intp)
    except KeyError as exc:
        raise UnknownClassError(f"item class {exc.args[0]!r} absent from basis") from exc
    return basis.vectors[rows]
