import math

import numpy as np
import pytest

from tdir import (
    EMPTY,
    PersistenceDiagram,
    PersistencePoint,
    bottleneck_bruteforce,
    bottleneck_distance,
    candidate_set,
    feasible,
    linf,
    pers,
    scale,
)
from tdir.errors import TooLarge, UnboundedPoint


def random_diagram(rng, max_points=4, max_dim=1):
    n = int(rng.integers(0, max_points + 1))
    dims = rng.integers(0, max_dim + 1, n)
    births = rng.random(n) * 10
    lives = rng.random(n) * 5
    return PersistenceDiagram.from_arrays(dims, births, births + lives)


def test_linf_is_sup_norm():
    p = PersistencePoint(0, 0.0, 2.0)
    q = PersistencePoint(0, 1.0, 5.0)
    assert linf(p, q) == 3.0
    assert linf(p, p) == 0.0


class TestKnownValues:
    def test_identical_diagrams(self):
        d = PersistenceDiagram([(0, 0.0, 2.0), (1, 1.0, 4.0)])
        assert bottleneck_distance(d, d) == 0.0

    def test_single_pair(self):
        a = PersistenceDiagram([(1, 0.0, 2.0)])
        b = PersistenceDiagram([(1, 0.0, 4.0)])
        assert bottleneck_distance(a, b) == 2.0

    def test_matching_beats_diagonal(self):
        a = PersistenceDiagram([(0, 0.0, 10.0)])
        b = PersistenceDiagram([(0, 1.0, 10.0)])
        assert bottleneck_distance(a, b) == 1.0

    def test_diagonal_beats_matching(self):
        a = PersistenceDiagram([(0, 0.0, 10.0)])
        b = PersistenceDiagram([(0, 0.0, 1.0)])
        assert bottleneck_distance(a, b) == 5.0

    def test_empty_diagram_pays_max_persistence(self):
        d = PersistenceDiagram([(0, 0.0, 4.0), (1, 2.0, 3.0)])
        assert bottleneck_distance(EMPTY, d) == 2.0
        assert bottleneck_distance(d, EMPTY) == 2.0
        assert bottleneck_distance(EMPTY, EMPTY) == 0.0

    def test_dims_are_not_mixed_by_default(self):
        a = PersistenceDiagram([(0, 0.0, 10.0)])
        b = PersistenceDiagram([(1, 0.0, 10.0)])
        assert bottleneck_distance(a, b) == 5.0
        assert bottleneck_distance(a, b, mix_dims=True) == 0.0

    def test_unbounded_rejected(self):
        d = PersistenceDiagram([(0, 0.0, math.inf)])
        with pytest.raises(UnboundedPoint):
            bottleneck_distance(d, EMPTY)


class TestOracle:
    def test_matches_bruteforce_on_small_random_pairs(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            a = random_diagram(rng)
            b = random_diagram(rng)
            assert bottleneck_distance(a, b) == bottleneck_bruteforce(a, b)

    def test_matches_bruteforce_with_mixed_dims(self):
        rng = np.random.default_rng(43)
        for _ in range(100):
            a = random_diagram(rng, max_dim=2)
            b = random_diagram(rng, max_dim=2)
            got = bottleneck_distance(a, b, mix_dims=True)
            assert got == bottleneck_bruteforce(a, b, mix_dims=True)

    def test_matches_bruteforce_on_clustered_coordinates(self):
        # near-duplicate coordinates push candidate gaps below the
        # documented 1e-12 feasibility slack, so only agreement within
        # that slack is guaranteed here
        rng = np.random.default_rng(44)
        for _ in range(100):
            n = int(rng.integers(1, 4))
            base = rng.random(n) * 2
            jit = rng.random(n) * 1e-9
            a = PersistenceDiagram.from_arrays(
                np.zeros(n, int), base, base + 1.0
            )
            b = PersistenceDiagram.from_arrays(
                np.zeros(n, int), base + jit, base + jit + 1.0
            )
            got = bottleneck_distance(a, b)
            want = bottleneck_bruteforce(a, b)
            assert abs(got - want) <= 1e-12

    def test_large_diagrams_use_the_same_search(self):
        # above the dense-solver cutoff the scipy path must agree with
        # a downscaled copy of itself through exact dilation
        rng = np.random.default_rng(45)
        n = 80
        births = rng.random(n) * 10
        a = PersistenceDiagram.from_arrays(
            rng.integers(0, 2, n), births, births + rng.random(n)
        )
        b = PersistenceDiagram.from_arrays(*(arr.copy() for arr in a.arrays()))
        assert bottleneck_distance(a, b) == 0.0
        shifted = PersistenceDiagram(
            PersistencePoint(p.dim, p.birth + 0.25, p.death + 0.25) for p in a
        )
        assert bottleneck_distance(a, shifted) == pytest.approx(0.25, abs=1e-12)


class TestMetricProperties:
    def test_symmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a = random_diagram(rng)
            b = random_diagram(rng)
            assert bottleneck_distance(a, b) == bottleneck_distance(b, a)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            a, b, c = (random_diagram(rng) for _ in range(3))
            dab = bottleneck_distance(a, b)
            dbc = bottleneck_distance(b, c)
            dac = bottleneck_distance(a, c)
            assert dac <= dab + dbc + 1e-12

    def test_exact_scale_equivariance(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            a = random_diagram(rng)
            b = random_diagram(rng)
            d = bottleneck_distance(a, b)
            assert bottleneck_distance(scale(a, 2.0), scale(b, 2.0)) == 2.0 * d


class TestCandidates:
    def test_distance_is_always_a_candidate(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            a = random_diagram(rng, max_dim=2)
            b = random_diagram(rng, max_dim=2)
            d = bottleneck_distance(a, b)
            assert d in candidate_set(a, b)

    def test_candidates_include_cross_dimension_costs(self):
        a = PersistenceDiagram([(0, 0.0, 2.0)])
        b = PersistenceDiagram([(1, 0.5, 2.0)])
        cands = candidate_set(a, b)
        assert 0.5 in cands  # pairwise cost even though dims differ
        assert 0.0 in cands
        assert 1.0 in cands and 0.75 in cands  # both persistences

    def test_candidates_sorted_unique(self):
        rng = np.random.default_rng(10)
        a = random_diagram(rng)
        b = random_diagram(rng)
        cands = candidate_set(a, b)
        assert (np.diff(cands) > 0).all()


class TestFeasibility:
    def test_negative_eps_rejected(self):
        d = PersistenceDiagram([(0, 0.0, 1.0)])
        with pytest.raises(ValueError):
            feasible(d, d, -1e-9)

    def test_threshold_behaviour(self):
        a = PersistenceDiagram([(0, 0.0, 2.0)])
        b = PersistenceDiagram([(0, 1.0, 2.0)])
        ok, _ = feasible(a, b, 1.0)
        assert ok
        ok, witness = feasible(a, b, 0.5)
        assert not ok and witness is None

    def test_witness_realises_the_distance(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            a = random_diagram(rng)
            b = random_diagram(rng)
            d, m = bottleneck_distance(a, b, return_matching=True)
            m.validate(a, b)
            cost = m.max_cost(a, b)
            assert cost >= d
            assert cost <= d + 1e-12

    def test_witness_pairs_respect_dimensions(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            a = random_diagram(rng, max_dim=2)
            b = random_diagram(rng, max_dim=2)
            _, m = bottleneck_distance(a, b, return_matching=True)
            for i, j in m.pairs:
                assert a.points[i].dim == b.points[j].dim


def test_bruteforce_size_cap():
    rng = np.random.default_rng(14)
    a = random_diagram(rng, max_points=5)
    while len(a) < 5:
        a = random_diagram(rng, max_points=5)
    b = random_diagram(rng, max_points=4)
    while len(b) < 4:
        b = random_diagram(rng, max_points=4)
    with pytest.raises(TooLarge):
        bottleneck_bruteforce(a, b)
