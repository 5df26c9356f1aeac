import math

import numpy as np
import pytest

from tdir import (
    FiniteMetricSpace,
    cdf_euclidean,
    cdf_poincare,
    di_gromov_hausdorff,
    distance_matrix,
    edge_cdf,
    gromov_hausdorff_bruteforce,
    ks_deviation,
    poincare_diameter,
    sample_circle,
)
from tdir.errors import (
    AsymmetricMatrix,
    EmptyInput,
    InvalidDilation,
    OutsideBall,
    TooLarge,
)


def full_enumeration_gh(X, Y):
    """GH by scanning every surjective relation, no minimality shortcut."""
    dx, dy = X.matrix, Y.matrix
    m, n = X.n, Y.n
    T = np.abs(dx[:, None, :, None] - dy[None, :, None, :])
    best = math.inf
    for mask in range(1, 1 << (m * n)):
        grid = np.array([(mask >> b) & 1 for b in range(m * n)], dtype=bool)
        grid = grid.reshape(m, n)
        if not (grid.any(axis=1).all() and grid.any(axis=0).all()):
            continue
        ii, jj = np.nonzero(grid)
        dist = float(T[ii[:, None], jj[:, None], ii[None, :], jj[None, :]].max())
        best = min(best, dist)
    return 0.5 * best


class TestFiniteMetricSpace:
    def test_validation(self):
        with pytest.raises(AsymmetricMatrix):
            FiniteMetricSpace(np.zeros((2, 3)))
        with pytest.raises(EmptyInput):
            FiniteMetricSpace(np.zeros((0, 0)))
        with pytest.raises(ValueError):
            FiniteMetricSpace(np.array([[0.0, -1.0], [-1.0, 0.0]]))
        with pytest.raises(ValueError):
            FiniteMetricSpace(np.array([[0.0, np.inf], [np.inf, 0.0]]))
        with pytest.raises(AsymmetricMatrix):
            FiniteMetricSpace(np.array([[0.0, 1.0], [1.0 + 1e-15, 0.0]]))
        with pytest.raises(AsymmetricMatrix):
            FiniteMetricSpace(np.array([[0.5, 1.0], [1.0, 0.0]]))

    def test_matrix_is_frozen(self):
        space = FiniteMetricSpace(np.array([[0.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(ValueError):
            space.matrix[0, 1] = 2.0

    def test_n_diameter_scale(self):
        space = FiniteMetricSpace(np.array([[0.0, 2.0], [2.0, 0.0]]))
        assert space.n == 2
        assert space.diameter == 2.0
        assert space.scale(3.0).matrix[0, 1] == 6.0
        with pytest.raises(InvalidDilation):
            space.scale(-1.0)
        with pytest.raises(InvalidDilation):
            space.scale(math.inf)

    def test_check_triangle(self):
        good = distance_matrix([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
        good.check_triangle()
        M = np.array([[0.0, 1.0, 10.0], [1.0, 0.0, 1.0], [10.0, 1.0, 0.0]])
        with pytest.raises(ValueError):
            FiniteMetricSpace(M).check_triangle()


class TestSampleCircle:
    def test_norms_and_determinism(self):
        pts = sample_circle(0.7, 50, 123)
        assert pts.shape == (50, 2)
        norms = np.linalg.norm(pts, axis=1)
        assert np.abs(norms - 0.7).max() <= 1e-12
        again = sample_circle(0.7, 50, 123)
        assert np.array_equal(pts, again)
        assert not np.array_equal(pts, sample_circle(0.7, 50, 124))

    def test_radius_range_enforced(self):
        for r in (0.0, 1.0, -0.5, 1.5):
            with pytest.raises(ValueError):
                sample_circle(r, 10, 0)
        with pytest.raises(EmptyInput):
            sample_circle(0.5, 0, 0)

    def test_angle_differences_uniform(self):
        # pairwise ordered angle gaps mod 1 against Unif[0,1): two-sided
        # KS below 1.36/sqrt(#pairs) for nearly all seeds
        n = 200
        k = n * (n - 1) // 2
        crit = 1.36 / math.sqrt(k)
        hits = 0
        seeds = range(40)
        for seed in seeds:
            pts = sample_circle(0.5, n, seed)
            theta = np.arctan2(pts[:, 1], pts[:, 0]) / (2.0 * np.pi) % 1.0
            iu, ju = np.triu_indices(n, k=1)
            z = np.sort((theta[ju] - theta[iu]) % 1.0)
            upper = np.arange(1, k + 1) / k
            lower = np.arange(0, k) / k
            ks = max(np.abs(z - upper).max(), np.abs(z - lower).max())
            hits += ks < crit
        assert hits >= 36


class TestEdgeCdf:
    def test_two_points(self):
        space = FiniteMetricSpace(np.array([[0.0, 3.0], [3.0, 0.0]]))
        rows = edge_cdf(space)
        assert rows.shape == (1, 2)
        assert tuple(rows[0]) == (1.0, 1.0)

    def test_last_row_and_monotonicity(self):
        rng = np.random.default_rng(80)
        space = distance_matrix(rng.random((12, 2)))
        rows = edge_cdf(space)
        assert rows.shape == (66, 2)
        assert tuple(rows[-1]) == (1.0, 1.0)
        assert np.all(np.diff(rows[:, 0]) >= 0.0)
        assert np.all(np.diff(rows[:, 1]) > 0.0)
        assert np.all(rows[:, 0] <= 1.0)

    def test_degenerate_inputs(self):
        with pytest.raises(EmptyInput):
            edge_cdf(FiniteMetricSpace(np.zeros((1, 1))))
        with pytest.raises(ValueError):
            edge_cdf(FiniteMetricSpace(np.zeros((3, 3))))


class TestTheoreticalCdfs:
    def test_euclidean_known_values(self):
        assert cdf_euclidean(0.0) == 0.0
        assert cdf_euclidean(1.0) == pytest.approx(1.0, abs=1e-15)
        assert cdf_euclidean(0.5) == pytest.approx(1.0 / 3.0, abs=1e-15)
        with pytest.raises(ValueError):
            cdf_euclidean(1.5)
        with pytest.raises(ValueError):
            cdf_euclidean(-0.1)

    def test_poincare_endpoints(self):
        for r in (0.1, 0.5, 0.9, 0.99, 0.999):
            assert cdf_poincare(0.0, r) == 0.0
            # the asin argument is exactly 1 in real arithmetic; float
            # rounding near the endpoint costs ~sqrt(eps)
            assert cdf_poincare(1.0, r) == pytest.approx(1.0, abs=1e-7)
        with pytest.raises(OutsideBall):
            cdf_poincare(0.5, 1.0)
        with pytest.raises(ValueError):
            cdf_poincare(1.5, 0.5)

    def test_poincare_family_decreases_in_r(self):
        vals = [float(cdf_poincare(0.9, r)) for r in (0.5, 0.9, 0.99, 0.999)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_poincare_monotone_in_t(self):
        t = np.linspace(0.0, 1.0, 101)
        for r in (0.3, 0.9):
            vals = cdf_poincare(t, r)
            assert np.all(np.diff(vals) >= 0.0)
            assert np.all((vals >= 0.0) & (vals <= 1.0))

    def test_poincare_approaches_euclidean_for_small_r(self):
        t = np.linspace(0.0, 1.0, 21)
        gap = np.abs(cdf_poincare(t, 0.01) - cdf_euclidean(t)).max()
        assert gap < 1e-3

    def test_diameter_matches_antipodal_distance(self):
        for r in (0.2, 0.5, 0.9):
            space = distance_matrix([(-r, 0.0), (r, 0.0)], metric="poincare")
            assert poincare_diameter(r) == pytest.approx(space.matrix[0, 1], abs=1e-12)

    def test_sampled_circles_match_the_closed_forms(self):
        euclid = distance_matrix(sample_circle(0.7, 300, 11))
        assert ks_deviation(euclid, cdf_euclidean) < 0.05
        small = distance_matrix(sample_circle(0.2, 300, 12))
        assert ks_deviation(small, cdf_euclidean) < 0.05
        hyp = distance_matrix(sample_circle(0.5, 300, 13), metric="poincare")
        assert ks_deviation(hyp, lambda t: cdf_poincare(t, 0.5)) < 0.05


class TestGromovHausdorff:
    def test_identical_spaces(self):
        rng = np.random.default_rng(81)
        X = distance_matrix(rng.random((4, 2)))
        assert gromov_hausdorff_bruteforce(X, X) == 0.0

    def test_two_point_gaps(self):
        X = FiniteMetricSpace(np.array([[0.0, 1.0], [1.0, 0.0]]))
        Y = FiniteMetricSpace(np.array([[0.0, 3.0], [3.0, 0.0]]))
        assert gromov_hausdorff_bruteforce(X, Y) == 1.0

    def test_one_point_spaces(self):
        pt = FiniteMetricSpace(np.zeros((1, 1)))
        assert gromov_hausdorff_bruteforce(pt, pt) == 0.0
        Y = FiniteMetricSpace(np.array([[0.0, 2.0], [2.0, 0.0]]))
        assert gromov_hausdorff_bruteforce(pt, Y) == 1.0

    def test_matches_full_enumeration(self):
        rng = np.random.default_rng(82)
        for _ in range(3):
            X = distance_matrix(rng.random((3, 2)) * 2.0)
            Y = distance_matrix(rng.random((3, 2)) * 2.0)
            assert gromov_hausdorff_bruteforce(X, Y) == full_enumeration_gh(X, Y)
        X = distance_matrix(rng.random((4, 2)) * 2.0)
        Y = distance_matrix(rng.random((4, 2)) * 2.0)
        assert gromov_hausdorff_bruteforce(X, Y) == full_enumeration_gh(X, Y)

    def test_size_cap(self):
        rng = np.random.default_rng(83)
        big = distance_matrix(rng.random((5, 2)))
        small = distance_matrix(rng.random((3, 2)))
        with pytest.raises(TooLarge):
            gromov_hausdorff_bruteforce(big, small)
        with pytest.raises(TooLarge):
            di_gromov_hausdorff(small, big)

    def test_scale_minimized_vanishes_on_rescalings(self):
        rng = np.random.default_rng(84)
        for _ in range(5):
            X = distance_matrix(rng.random((4, 2)) * 3.0)
            c = 0.3 + float(rng.random()) * 3.0
            v = di_gromov_hausdorff(X, X.scale(c))
            assert v <= 0.01 * X.scale(c).diameter

    def test_scale_minimized_positive_on_generic_pairs(self):
        rng = np.random.default_rng(85)
        for _ in range(5):
            X = distance_matrix(rng.random((4, 2)) * 3.0)
            Y = distance_matrix(rng.random((4, 2)) * 3.0)
            assert di_gromov_hausdorff(X, Y) > 0.01

    def test_one_point_target_collapses(self):
        rng = np.random.default_rng(86)
        X = distance_matrix(rng.random((3, 2)))
        pt = FiniteMetricSpace(np.zeros((1, 1)))
        assert di_gromov_hausdorff(X, pt) == 0.0

    def test_bad_steps(self):
        pt = FiniteMetricSpace(np.zeros((1, 1)))
        with pytest.raises(ValueError):
            di_gromov_hausdorff(pt, pt, steps=0)
