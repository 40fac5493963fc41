import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concept_retrieval import taxonomy as tx
from concept_retrieval.errors import (
    CycleDetectedError,
    EmptySubtreeError,
    MultipleRootsError,
    NotEnoughEigenfunctionsError,
    RootOperandError,
    UnknownClassError,
    UnknownParentError,
    ZeroTotalItemsError,
)


def doc(nodes):
    return json.dumps({"nodes": nodes})


def simple_tree():
    """root; A (p=1/2); X, Y under A (p=1/4 each); Z under root (p=1/2)."""
    return tx.load_taxonomy(doc([
        {"id": "root", "parent": None, "count": 0},
        {"id": "A", "parent": "root", "count": 0},
        {"id": "X", "parent": "A", "count": 1},
        {"id": "Y", "parent": "A", "count": 1},
        {"id": "Z", "parent": "root", "count": 2},
    ]))


class TestLoadTaxonomy:
    def test_two_leaf_priors(self):
        t = tx.load_taxonomy(doc([
            {"id": "root", "parent": None, "count": 0},
            {"id": "a", "parent": "root", "count": 1},
            {"id": "b", "parent": "root", "count": 1},
        ]))
        assert t.prior("a") == 0.5
        assert t.prior("b") == 0.5
        assert t.prior("root") == 1.0

    def test_unknown_parent(self):
        with pytest.raises(UnknownParentError):
            tx.load_taxonomy(doc([
                {"id": "root", "parent": None, "count": 1},
                {"id": "a", "parent": "ghost", "count": 1},
            ]))

    def test_chain_concentrated_counts(self):
        t = tx.load_taxonomy(doc([
            {"id": "root", "parent": None, "count": 0},
            {"id": "A", "parent": "root", "count": 0},
            {"id": "X", "parent": "A", "count": 5},
        ]))
        assert t.prior("X") == 1.0
        assert t.prior("A") == 1.0

    def test_multiple_roots(self):
        with pytest.raises(MultipleRootsError):
            tx.load_taxonomy(doc([
                {"id": "r1", "parent": None, "count": 1},
                {"id": "r2", "parent": None, "count": 1},
            ]))

    def test_cycle_detected(self):
        with pytest.raises(CycleDetectedError):
            tx.load_taxonomy(doc([
                {"id": "root", "parent": None, "count": 1},
                {"id": "a", "parent": "b", "count": 1},
                {"id": "b", "parent": "a", "count": 1},
            ]))

    def test_zero_total_items(self):
        with pytest.raises(ZeroTotalItemsError):
            tx.load_taxonomy(doc([
                {"id": "root", "parent": None, "count": 0},
                {"id": "a", "parent": "root", "count": 0},
            ]))

    def test_empty_subtree_rejected(self):
        with pytest.raises(EmptySubtreeError):
            tx.load_taxonomy(doc([
                {"id": "root", "parent": None, "count": 0},
                {"id": "a", "parent": "root", "count": 2},
                {"id": "b", "parent": "root", "count": 0},
            ]))


class TestLinSimilarity:
    def test_identity_is_one(self):
        t = simple_tree()
        for node in ("A", "X", "Y", "Z"):
            assert tx.lin_similarity(t, node, node) == 1.0

    def test_hand_fixture_half(self):
        # lin(X, Y) = 2 log 0.5 / (log 0.25 + log 0.25) = 0.5
        t = simple_tree()
        assert tx.lin_similarity(t, "X", "Y") == pytest.approx(0.5, abs=1e-12)
        # cross-check against an independent evaluation of the formula
        independent = 2 * math.log(0.5) / (math.log(0.25) + math.log(0.25))
        assert tx.lin_similarity(t, "X", "Y") == pytest.approx(independent, abs=1e-15)

    def test_lca_at_root_gives_zero(self):
        t = simple_tree()
        assert tx.lin_similarity(t, "X", "Z") == 0.0

    def test_root_operand_raises(self):
        t = simple_tree()
        with pytest.raises(RootOperandError):
            tx.lin_similarity(t, "root", "X")
        chain = tx.load_taxonomy(doc([
            {"id": "root", "parent": None, "count": 0},
            {"id": "A", "parent": "root", "count": 0},
            {"id": "X", "parent": "A", "count": 5},
        ]))
        with pytest.raises(RootOperandError):
            tx.lin_similarity(chain, "A", "X")

    def test_symmetry(self):
        t = simple_tree()
        assert tx.lin_similarity(t, "X", "Z") == tx.lin_similarity(t, "Z", "X")
        assert tx.lin_similarity(t, "X", "Y") == tx.lin_similarity(t, "Y", "X")


def random_taxonomy(rng):
    """Random two-level tree with nonzero leaf counts."""
    n_groups = int(rng.integers(2, 4))
    nodes = [{"id": "root", "parent": None, "count": 0}]
    leaves = []
    for g in range(n_groups):
        nodes.append({"id": f"g{g}", "parent": "root", "count": 0})
        for l in range(int(rng.integers(1, 4))):
            leaf = f"g{g}x{l}"
            nodes.append({"id": leaf, "parent": f"g{g}", "count": int(rng.integers(1, 9))})
            leaves.append(leaf)
    return tx.load_taxonomy(doc(nodes)), leaves


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_lin_similarity_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    t, leaves = random_taxonomy(rng)
    a, b = rng.choice(leaves, size=2, replace=True)
    try:
        s_ab = tx.lin_similarity(t, str(a), str(b))
        s_ba = tx.lin_similarity(t, str(b), str(a))
    except RootOperandError:
        return  # single-leaf taxonomy puts all mass in one subtree
    assert s_ab == s_ba
    assert 0.0 <= s_ab <= 1.0


class TestClassAffinity:
    def test_diagonal_is_one(self):
        t = simple_tree()
        w = tx.class_affinity(t, ["X", "Y", "Z"], semantic_sigma=0.5)
        np.testing.assert_array_equal(np.diag(w), 1.0)

    def test_zero_similarity_affinity_value(self):
        t = simple_tree()
        w = tx.class_affinity(t, ["X", "Z"], semantic_sigma=1.0)
        assert w[0, 1] == pytest.approx(math.exp(-0.5), abs=1e-12)

    def test_exact_symmetry(self):
        t = simple_tree()
        w = tx.class_affinity(t, ["X", "Y", "Z"], semantic_sigma=0.7)
        np.testing.assert_array_equal(w, w.T)

    def test_lin_form_switch(self):
        t = simple_tree()
        w = tx.class_affinity(t, ["X", "Y"], form="lin")
        assert w[0, 1] == pytest.approx(0.5, abs=1e-12)


def four_leaf_tree():
    return tx.load_taxonomy(doc([
        {"id": "root", "parent": None, "count": 0},
        {"id": "L", "parent": "root", "count": 0},
        {"id": "R", "parent": "root", "count": 0},
        {"id": "a", "parent": "L", "count": 10},
        {"id": "b", "parent": "L", "count": 10},
        {"id": "c", "parent": "R", "count": 10},
        {"id": "d", "parent": "R", "count": 10},
    ]))


class TestBuildClassBasis:
    def test_basic_shape_and_order(self):
        t = four_leaf_tree()
        classes = ["a", "b", "c", "d"]
        w = tx.class_affinity(t, classes)
        priors = np.full(4, 0.25)
        basis = tx.build_class_basis(w, priors, classes, 3)
        assert basis.vectors.shape == (4, 3)
        assert list(basis.eigenvalues) == sorted(basis.eigenvalues)
        assert all(v > 1e-10 for v in basis.eigenvalues)

    def test_duplicate_classes_create_unit_eigenvalue_pair_mode(self):
        # Two identical affinity rows (affinity 1 between the twins) turn
        # the twins' difference vector into an eigenvector with eigenvalue
        # exactly 1: A(e_a - e_b) = Dt(e_a - e_b) and B = P*Dh = Dt. Only
        # the constant mode sits at zero. (Dense-oracle verified.)
        t = four_leaf_tree()
        classes = ["a", "b", "c", "d"]
        w = tx.class_affinity(t, classes)
        w_dup = w.copy()
        w_dup[1] = w_dup[0]
        w_dup[:, 1] = w_dup[:, 0]
        w_dup[1, 1] = 1.0
        w_dup[0, 1] = w_dup[1, 0] = 1.0
        priors = np.full(4, 0.25)
        basis = tx.build_class_basis(w_dup, priors, classes, 3)
        assert len(basis.eigenvalues) == 3
        assert any(abs(v - 1.0) < 1e-9 for v in basis.eigenvalues)
        diff_mode = basis.vectors[:, np.argmin(np.abs(basis.eigenvalues - 1.0))]
        assert diff_mode[0] == pytest.approx(-diff_mode[1], abs=1e-9)
        assert abs(diff_mode[2]) < 1e-9 and abs(diff_mode[3]) < 1e-9

    def test_two_distinct_classes_leave_one_eigenfunction(self):
        t = simple_tree()
        classes = ["X", "Z"]
        w = tx.class_affinity(t, classes)
        basis = tx.build_class_basis(w, np.array([0.5, 0.5]), classes, 1)
        assert basis.vectors.shape == (2, 1)
        with pytest.raises(NotEnoughEigenfunctionsError):
            tx.build_class_basis(w, np.array([0.5, 0.5]), classes, 2)


class TestAssignItemVectors:
    def make_basis(self):
        t = four_leaf_tree()
        classes = ["a", "b", "c", "d"]
        w = tx.class_affinity(t, classes)
        return tx.build_class_basis(w, np.full(4, 0.25), classes, 2)

    def test_same_class_same_row(self):
        basis = self.make_basis()
        u = tx.assign_item_vectors(basis, ["b", "b", "c"])
        np.testing.assert_array_equal(u[0], u[1])
        assert not np.array_equal(u[0], u[2])

    def test_permutation_when_each_class_once(self):
        basis = self.make_basis()
        u = tx.assign_item_vectors(basis, ["d", "a", "c", "b"])
        np.testing.assert_array_equal(np.sort(u, axis=0), np.sort(basis.vectors, axis=0))

    def test_unknown_class(self):
        basis = self.make_basis()
        with pytest.raises(UnknownClassError):
            tx.assign_item_vectors(basis, ["a", "nope"])

    def test_at_most_c_distinct_rows(self):
        basis = self.make_basis()
        u = tx.assign_item_vectors(basis, ["a", "b", "c", "d", "a", "b", "c", "d"])
        assert len({row.tobytes() for row in u}) <= 4


def test_item_class_csv_parsing():
    text = "item_id,class_id\ni0,cat\ni1,dog\n"
    items, classes = tx.load_item_classes(text)
    assert items == ["i0", "i1"]
    assert classes == ["cat", "dog"]
