import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concept_retrieval import eigenmap, numerics
from concept_retrieval.errors import (
    DegenerateInputError,
    DimensionError,
    NotEnoughEigenfunctionsError,
)


def make_basis(columns, bins=32, sigma_factor=0.2, m=6, k=4):
    per_dim = []
    for dim, col in enumerate(columns):
        hist = eigenmap.build_histogram(col, bins, dimension_index=dim)
        sigma = sigma_factor * hist.bin_width * bins
        per_dim.append(eigenmap.solve_eigenfunctions_1d(hist, sigma, m))
    return eigenmap.select_basis(per_dim, k)


class TestBuildHistogram:
    def test_uniform_monte_carlo_densities(self):
        rng = np.random.default_rng(42)
        col = rng.uniform(0.0, 1.0, size=10_000)
        hist = eigenmap.build_histogram(col, 4)
        np.testing.assert_allclose(hist.densities, 0.25, atol=0.02)

    def test_two_points_two_bins(self):
        hist = eigenmap.build_histogram(np.array([0.0, 1.0]), 2)
        np.testing.assert_allclose(hist.densities, [0.5, 0.5])

    def test_densities_sum_to_one(self):
        rng = np.random.default_rng(1)
        hist = eigenmap.build_histogram(rng.normal(size=500), 50)
        assert hist.densities.sum() == pytest.approx(1.0, abs=1e-12)

    def test_bins_span_widened_range(self):
        col = np.array([2.0, 3.0, 4.0])
        hist = eigenmap.build_histogram(col, 10)
        lo = hist.bin_centers[0] - hist.bin_width / 2
        hi = hist.bin_centers[-1] + hist.bin_width / 2
        assert lo == pytest.approx(2.0 - 1e-9, abs=1e-15)
        assert hi == pytest.approx(4.0 + 1e-9, abs=1e-15)

    def test_default_bin_count(self):
        assert eigenmap.DEFAULT_BINS == 500

    def test_constant_column_rejected(self):
        with pytest.raises(DegenerateInputError):
            eigenmap.build_histogram(np.full(10, 3.0), 4)


class TestSolveEigenfunctions1d:
    def test_smallest_eigenvalue_is_trivial_constant(self):
        rng = np.random.default_rng(2)
        hist = eigenmap.build_histogram(rng.normal(size=2000), 40)
        fns = eigenmap.solve_eigenfunctions_1d(hist, 0.5, 3)
        assert abs(fns[0].eigenvalue) <= 1e-10
        g = fns[0].values_at_bins
        assert np.max(np.abs(g - g[0])) <= 1e-6 * max(1.0, abs(g[0]))

    def test_two_bin_problem_matches_hand_solution(self):
        # B=2, densities (1/2, 1/2): second eigenfunction is antisymmetric
        # with eigenvalue 2w/(1+w) and amplitude sqrt(2/(1+w)).
        hist = eigenmap.build_histogram(np.array([0.0, 1.0]), 2)
        sigma = 0.4
        c0, c1 = hist.bin_centers
        w = np.exp(-((c0 - c1) ** 2) / (2 * sigma**2))
        fns = eigenmap.solve_eigenfunctions_1d(hist, sigma, 2)
        assert fns[1].eigenvalue == pytest.approx(2 * w / (1 + w), rel=1e-9)
        amp = np.sqrt(2.0 / (1 + w))
        np.testing.assert_allclose(fns[1].values_at_bins, [amp, -amp], rtol=1e-7)

    def test_two_bump_second_eigenfunction_sign_change(self):
        rng = np.random.default_rng(3)
        col = np.concatenate([rng.normal(-3, 0.4, 1500), rng.normal(3, 0.4, 1500)])
        hist = eigenmap.build_histogram(col, 64)
        fns = eigenmap.solve_eigenfunctions_1d(hist, 1.0, 2)
        g = fns[1].values_at_bins
        signs = np.sign(g[np.abs(g) > 1e-3 * np.abs(g).max()])
        changes = np.sum(np.diff(signs) != 0)
        assert changes == 1
        flip_bin = np.flatnonzero(np.diff(np.sign(g)))[0]
        assert -2 < hist.bin_centers[flip_bin] < 2

    def test_residuals_meet_tolerance(self):
        rng = np.random.default_rng(4)
        hist = eigenmap.build_histogram(rng.normal(size=3000), 100)
        sigma = 0.2 * hist.bin_width * 100
        for fn in eigenmap.solve_eigenfunctions_1d(hist, sigma, 10):
            assert eigenmap.eq2_residual(fn, hist.densities, sigma) <= 1e-8


class TestSelectBasis:
    def test_merge_across_dimensions(self):
        def fn(dim, val):
            return eigenmap.Eigenfunction1D(
                dimension_index=dim,
                eigenvalue=val,
                bin_centers=np.array([0.0, 1.0]),
                values_at_bins=np.array([1.0, -1.0]),
            )

        basis = eigenmap.select_basis([[fn(0, 0.1), fn(0, 0.3)], [fn(1, 0.2)]], 2)
        assert list(basis.eigenvalues) == [0.1, 0.2]
        assert [f.dimension_index for f in basis.functions] == [0, 1]

    def test_discards_trivial_eigenvalues(self):
        def fn(dim, val):
            return eigenmap.Eigenfunction1D(
                dimension_index=dim,
                eigenvalue=val,
                bin_centers=np.array([0.0, 1.0]),
                values_at_bins=np.array([1.0, 1.0]),
            )

        basis = eigenmap.select_basis([[fn(0, 5e-11), fn(0, 0.4)]], 1)
        assert basis.eigenvalues[0] == 0.4

    def test_default_discard_epsilon(self):
        assert eigenmap.DEFAULT_DISCARD_EPSILON == 1e-10

    def test_not_enough_eigenfunctions(self):
        def fn(val):
            return eigenmap.Eigenfunction1D(
                dimension_index=0,
                eigenvalue=val,
                bin_centers=np.array([0.0, 1.0]),
                values_at_bins=np.array([1.0, -1.0]),
            )

        with pytest.raises(NotEnoughEigenfunctionsError):
            eigenmap.select_basis([[fn(1e-12), fn(0.5)]], 2)


class TestInterpolate:
    def setup_method(self):
        rng = np.random.default_rng(5)
        self.cols = [rng.normal(size=800), rng.uniform(-2, 2, size=800)]
        self.basis = make_basis(self.cols)
        self.fn0 = self.basis.functions[0]

    def test_value_at_bin_center(self):
        dim = self.fn0.dimension_index
        x = np.zeros((1, 2))
        x[0, dim] = self.fn0.bin_centers[7]
        u = eigenmap.interpolate(self.basis, x)
        assert u[0, 0] == pytest.approx(self.fn0.values_at_bins[7], rel=1e-12)

    def test_midpoint_is_average(self):
        dim = self.fn0.dimension_index
        x = np.zeros((1, 2))
        x[0, dim] = 0.5 * (self.fn0.bin_centers[3] + self.fn0.bin_centers[4])
        u = eigenmap.interpolate(self.basis, x)
        expected = 0.5 * (self.fn0.values_at_bins[3] + self.fn0.values_at_bins[4])
        assert u[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_clamping_below_and_above(self):
        dim = self.fn0.dimension_index
        x = np.zeros((2, 2))
        x[0, dim] = self.fn0.bin_centers[0] - 100.0
        x[1, dim] = self.fn0.bin_centers[-1] + 100.0
        u = eigenmap.interpolate(self.basis, x)
        assert u[0, 0] == self.fn0.values_at_bins[0]
        assert u[1, 0] == self.fn0.values_at_bins[-1]

    def test_dimension_error(self):
        with pytest.raises(DimensionError):
            eigenmap.interpolate(self.basis, np.zeros((3, 1)))

    def test_output_shape(self):
        x = np.column_stack(self.cols)
        u = eigenmap.interpolate(self.basis, x)
        assert u.shape == (800, self.basis.k)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=-50.0, max_value=50.0, allow_nan=False),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_interpolation_is_convex_combination_of_bracketing_bins(x_query, seed):
    rng = np.random.default_rng(seed)
    hist = eigenmap.build_histogram(rng.normal(size=200), 16)
    sigma = 0.3 * hist.bin_width * 16
    fns = eigenmap.solve_eigenfunctions_1d(hist, sigma, 3)
    basis = eigenmap.select_basis([fns], 2)
    fn = basis.functions[0]
    u = eigenmap.interpolate(basis, np.array([[x_query]]))[0, 0]
    centers = fn.bin_centers
    j = np.searchsorted(centers, x_query)
    if j == 0:
        lo = hi = fn.values_at_bins[0]
    elif j >= len(centers):
        lo = hi = fn.values_at_bins[-1]
    else:
        lo = min(fn.values_at_bins[j - 1], fn.values_at_bins[j])
        hi = max(fn.values_at_bins[j - 1], fn.values_at_bins[j])
    assert lo - 1e-12 <= u <= hi + 1e-12


def test_basis_file_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    basis = make_basis([rng.normal(size=400), rng.uniform(size=400)])
    path = tmp_path / "basis.eigb"
    eigenmap.save_basis(path, basis)
    loaded = eigenmap.load_basis(path)
    assert loaded.k == basis.k
    assert loaded.rbf_sigma == basis.rbf_sigma
    assert loaded.discard_epsilon == basis.discard_epsilon
    for a, b in zip(loaded.functions, basis.functions):
        assert a.dimension_index == b.dimension_index
        assert a.eigenvalue == b.eigenvalue
        np.testing.assert_array_equal(a.bin_centers, b.bin_centers)
        np.testing.assert_array_equal(a.values_at_bins, b.values_at_bins)


def test_basis_file_magic_header(tmp_path):
    rng = np.random.default_rng(10)
    basis = make_basis([rng.normal(size=300)], k=2)
    path = tmp_path / "basis.eigb"
    eigenmap.save_basis(path, basis)
    assert path.read_bytes()[:8] == b"EIGB0001"


def test_identical_inputs_identical_basis_bytes(tmp_path):
    rng = np.random.default_rng(11)
    col = rng.normal(size=500)
    p1, p2 = tmp_path / "a.eigb", tmp_path / "b.eigb"
    eigenmap.save_basis(p1, make_basis([col]))
    eigenmap.save_basis(p2, make_basis([col.copy()]))
    assert p1.read_bytes() == p2.read_bytes()


def test_pipeline_fidelity_against_dense_laplacian():
    """Interpolated eigenfunctions track the dense graph's smallest
    generalized eigenvectors on a smooth 2-D dataset."""
    from concept_retrieval.config import EngineConfig
    from concept_retrieval.modalities import build_visual
    from concept_retrieval.synth import truncated_normal

    rng = np.random.default_rng(20)
    n = 2000
    x = np.vstack([
        truncated_normal(rng, np.array([-1.8, 0.0]), 1.0, (n // 2, 2), 2.2),
        truncated_normal(rng, np.array([1.8, 0.0]), 1.0, (n // 2, 2), 2.2),
    ])
    cfg = EngineConfig(k_visual=4, bins=500, pca_dims=2, rbf_sigma_factor=0.2)
    assets = build_visual(x, cfg)
    s = assets.rotated
    w = np.ones((n, n))
    for dim in range(2):
        diff = s[:, dim][:, None] - s[:, dim][None, :]
        w *= np.exp(-(diff**2) / (2 * assets.sigmas[dim] ** 2))
    degrees = w.sum(axis=1)
    laplacian = np.diag(degrees) - w
    pairs = numerics.sym_generalized_eig(laplacian, np.diag(degrees), 5)
    dense = np.column_stack([vec for _, vec in pairs[1:]])  # skip the constant
    for j in range(3):
        u = assets.modality.u[:, j]
        cosines = [
            abs(u @ dense[:, i]) / (np.linalg.norm(u) * np.linalg.norm(dense[:, i]))
            for i in range(dense.shape[1])
        ]
        assert max(cosines) >= 0.9, f"column {j}: best |cos| {max(cosines):.3f}"
