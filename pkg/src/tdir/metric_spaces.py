"""Finite metric spaces, circle samples, edge-length CDFs, and a small
exact Gromov-Hausdorff toolkit.

The Gromov-Hausdorff routines enumerate correspondences, which is only
tractable for spaces of up to 4 points; they exist as ground truth for
the stability relation between the dilation-invariant diagram
dissimilarity and the scale-minimized Gromov-Hausdorff distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    AsymmetricMatrix,
    EmptyInput,
    InvalidDilation,
    OutsideBall,
    TooLarge,
)


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite metric space given by its distance matrix.

    The matrix must be square, exactly symmetric, with a zero diagonal
    and nonnegative entries.  The triangle inequality is not enforced at
    construction; call check_triangle when it matters.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise AsymmetricMatrix(f"distance matrix must be square, got shape {m.shape}")
        if m.shape[0] == 0:
            raise EmptyInput("a metric space needs at least one point")
        if not np.isfinite(m).all():
            raise ValueError("distance matrix must be finite")
        if (m < 0).any():
            raise ValueError("distance matrix must be nonnegative")
        if (np.diag(m) != 0).any():
            raise AsymmetricMatrix("distance matrix must have a zero diagonal")
        if not (m == m.T).all():
            raise AsymmetricMatrix("distance matrix must be exactly symmetric")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.matrix.max())

    def scale(self, c: float) -> "FiniteMetricSpace":
        """The same point set with all distances multiplied by c >= 0."""
        c = float(c)
        if math.isnan(c) or math.isinf(c) or c < 0:
            raise InvalidDilation(f"scale factor must be finite and >= 0, got {c}")
        return FiniteMetricSpace(c * self.matrix)

    def check_triangle(self, tol: float = 1e-9) -> None:
        """Raise if some triple violates the triangle inequality beyond tol."""
        m = self.matrix
        through = (m[:, :, None] + m[None, :, :]).min(axis=1)
        worst = float((m - through).max())
        if worst > tol:
            raise ValueError(f"triangle inequality violated by {worst}")


def _as_space(X) -> FiniteMetricSpace:
    if isinstance(X, FiniteMetricSpace):
        return X
    return FiniteMetricSpace(np.asarray(X, dtype=np.float64))


def sample_circle(r: float, n: int, seed) -> np.ndarray:
    """n independent uniform points on the circle of radius r about 0.

    Angles are drawn with numpy's default PCG64 generator, so a fixed
    seed reproduces the same points on any platform.
    """
    r = float(r)
    if not 0.0 < r < 1.0:
        raise ValueError(f"radius must lie in (0, 1), got {r}")
    n = int(n)
    if n < 1:
        raise EmptyInput(f"need at least one sample, got {n}")
    rng = np.random.default_rng(seed)
    theta = 2.0 * np.pi * rng.random(n)
    return r * np.column_stack([np.cos(theta), np.sin(theta)])


def edge_cdf(space) -> np.ndarray:
    """Empirical CDF of the normalized pairwise distances of a space.

    Thresholds are distances divided by the largest pairwise distance, so
    the last row is always (1.0, 1.0).  Returns an array of rows
    (threshold, cumulative fraction) sorted by threshold; the fraction at
    a threshold counts the pairs with normalized distance at most that
    threshold.  Needs at least two points and a positive diameter.
    """
    space = _as_space(space)
    if space.n < 2:
        raise EmptyInput("edge CDF needs at least two points")
    iu = np.triu_indices(space.n, k=1)
    d = np.sort(space.matrix[iu])
    if d[-1] == 0.0:
        raise ValueError("edge CDF is undefined when all distances are 0")
    frac = np.arange(1, d.size + 1, dtype=np.float64) / d.size
    return np.column_stack([d / d[-1], frac])


def ks_deviation(space, cdf) -> float:
    """Sup deviation between a space's empirical edge CDF and a model CDF.

    cdf maps a normalized distance in [0, 1] to a probability, matching
    the thresholds of edge_cdf.  Uses the two-sided Kolmogorov-Smirnov
    form, checking the model against both the lower and upper step of the
    empirical CDF at every sample.
    """
    space = _as_space(space)
    if space.n < 2:
        raise EmptyInput("sup deviation needs at least two points")
    iu = np.triu_indices(space.n, k=1)
    d = np.sort(space.matrix[iu])
    if d[-1] == 0.0:
        raise ValueError("sup deviation is undefined when all distances are 0")
    d = d / d[-1]
    k = d.size
    theo = np.asarray([float(cdf(t)) for t in d])
    upper = np.arange(1, k + 1) / k
    lower = np.arange(0, k) / k
    return float(np.maximum(np.abs(theo - upper), np.abs(theo - lower)).max())


_ASIN_SLACK = 1e-12


def _clamped_asin(x):
    x = np.asarray(x, dtype=np.float64)
    if (x < -1.0 - _ASIN_SLACK).any() or (x > 1.0 + _ASIN_SLACK).any():
        raise ValueError("asin argument outside [-1, 1] beyond float slack")
    return np.arcsin(np.clip(x, -1.0, 1.0))


def cdf_euclidean(t):
    """Distance CDF of uniform points on a circle, Euclidean metric.

    t is the chord length normalized by the diameter (so t in [0, 1]);
    for a circle of radius r evaluate at distance / (2 r).  Accepts
    scalars or arrays.
    """
    t = np.asarray(t, dtype=np.float64)
    if (t < -_ASIN_SLACK).any() or (t > 1.0 + _ASIN_SLACK).any():
        raise ValueError("normalized distance must lie in [0, 1]")
    out = (2.0 / np.pi) * _clamped_asin(t)
    return float(out) if out.ndim == 0 else out


def poincare_diameter(r: float) -> float:
    """Hyperbolic diameter of the circle of Euclidean radius r in the disk."""
    r = float(r)
    if not (0.0 < r < 1.0):
        raise OutsideBall(f"radius must lie in (0, 1), got {r}")
    return 2.0 * math.asinh(2.0 / (1.0 / r - r))


def cdf_poincare(t, r: float):
    """Distance CDF of uniform points on a circle, hyperbolic metric.

    The circle has Euclidean radius r inside the unit disk; t is the
    hyperbolic distance normalized by the hyperbolic diameter (t in
    [0, 1]).  Accepts scalars or arrays.
    """
    r = float(r)
    if not (0.0 < r < 1.0):
        raise OutsideBall(f"radius must lie in (0, 1), got {r}")
    t = np.asarray(t, dtype=np.float64)
    if (t < -_ASIN_SLACK).any() or (t > 1.0 + _ASIN_SLACK).any():
        raise ValueError("normalized distance must lie in [0, 1]")
    M = poincare_diameter(r)
    arg = 0.5 * np.sinh(t * M / 2.0) * (1.0 / r - r)
    out = (2.0 / np.pi) * _clamped_asin(arg)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def _minimal_correspondences(m: int, n: int):
    """Index template for all minimal correspondences between [m] and [n].

    A correspondence is a relation covering both sides; it is minimal when
    removing any entry breaks coverage (every entry is alone in its row or
    its column).  The distortion of a superset relation is at least that
    of any subset, so minimizing over minimal correspondences suffices.

    Returns (IU, IV): int arrays of shape (K, T) holding linear indices
    into flattened m*m and n*n distance matrices for every unordered pair
    of entries of every minimal correspondence, padded with index 0
    (a diagonal pair, which contributes distortion 0).
    """
    mn = m * n
    masks = np.arange(1, 1 << mn, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(mn)[None, :]) & 1).astype(bool)
    grid = bits.reshape(-1, m, n)
    rowdeg = grid.sum(axis=2)
    coldeg = grid.sum(axis=1)
    surjective = (rowdeg > 0).all(axis=1) & (coldeg > 0).all(axis=1)
    pendant = (rowdeg[:, :, None] == 1) | (coldeg[:, None, :] == 1)
    minimal = surjective & (~grid | pendant).all(axis=(1, 2))
    chosen = grid[minimal]

    iu_rows, iv_rows = [], []
    for g in chosen:
        ii, jj = np.nonzero(g)
        e = ii.size
        pu, pv = [], []
        for a in range(e):
            for b in range(a + 1, e):
                pu.append(ii[a] * m + ii[b])
                pv.append(jj[a] * n + jj[b])
        iu_rows.append(pu)
        iv_rows.append(pv)
    T = max((len(r) for r in iu_rows), default=0)
    K = len(iu_rows)
    IU = np.zeros((K, max(T, 1)), dtype=np.int64)
    IV = np.zeros((K, max(T, 1)), dtype=np.int64)
    for k, (pu, pv) in enumerate(zip(iu_rows, iv_rows)):
        IU[k, : len(pu)] = pu
        IV[k, : len(pv)] = pv
    return IU, IV


_GH_CAP = 4


def gromov_hausdorff_bruteforce(X, Y) -> float:
    """Exact Gromov-Hausdorff distance by correspondence enumeration.

    Both spaces are capped at 4 points (TooLarge above); the enumeration
    is restricted to minimal correspondences, which is lossless because
    distortion is monotone under adding entries.
    """
    X = _as_space(X)
    Y = _as_space(Y)
    if X.n > _GH_CAP or Y.n > _GH_CAP:
        raise TooLarge(f"brute force capped at {_GH_CAP} points per space")
    IU, IV = _minimal_correspondences(X.n, Y.n)
    dx = X.matrix.ravel()
    dy = Y.matrix.ravel()
    dist = np.abs(dx[IU] - dy[IV]).max(axis=1)
    return 0.5 * float(dist.min())


def di_gromov_hausdorff(X, Y, steps: int = 1000) -> float:
    """Scale-minimized Gromov-Hausdorff distance min_c GH(cX, Y) on a grid.

    The grid spans [0, 2 diam(Y) / diam(X)]: beyond the upper end the
    diameter gap alone already exceeds the value at c = 0.  Exponential
    in point count; both spaces are capped at 4 points.
    """
    X = _as_space(X)
    Y = _as_space(Y)
    if X.n > _GH_CAP or Y.n > _GH_CAP:
        raise TooLarge(f"brute force capped at {_GH_CAP} points per space")
    steps = int(steps)
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if X.diameter == 0.0:
        return gromov_hausdorff_bruteforce(X, Y)
    IU, IV = _minimal_correspondences(X.n, Y.n)
    dx = X.matrix.ravel()
    dy = Y.matrix.ravel()
    du = dx[IU]
    dv = dy[IV]
    best = math.inf
    for c in np.linspace(0.0, 2.0 * Y.diameter / X.diameter, steps + 1):
        dist = np.abs(c * du - dv).max(axis=1)
        best = min(best, float(dist.min()))
    return 0.5 * best
