"""Vietoris-Rips persistent homology for desk-scale inputs.

A simplex enters the filtration at its diameter, so the complex at
threshold r contains exactly the tuples whose pairwise distances are all
at most r.  Homology in dimensions 0..max_dim needs simplices one
dimension higher to observe deaths; zero-persistence pairs are dropped
and never-dying classes get an infinite death coordinate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ._reduction import reduce_columns
from .diagram import PersistenceDiagram
from .errors import OutsideBall, ParseError, TooManySimplices, ZeroVector
from .metric_spaces import FiniteMetricSpace

DEFAULT_MAX_SIMPLICES = 5_000_000
_CHUNK = 4096


@dataclass(frozen=True)
class Filtration:
    """Vietoris-Rips filtration stored as per-dimension simplex arrays.

    vertices[k] is an (m_k, k+1) integer array of ascending vertex ids,
    rows sorted by (filtration value, lexicographic tuple); values[k]
    holds the matching diameters.  In the induced global order by
    (value, dimension, tuple) every face precedes its cofaces.  max_dim
    is the homology target; simplex arrays extend one dimension higher
    so that max_dim-cycles can die.
    """

    vertices: tuple
    values: tuple
    max_dim: int

    @property
    def top_dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def n_points(self) -> int:
        return self.vertices[0].shape[0]

    def counts(self) -> tuple:
        """Number of simplices in each dimension."""
        return tuple(v.shape[0] for v in self.vertices)

    def simplices(self):
        """All (vertex tuple, value) pairs in global filtration order.

        Materializes everything; intended for small complexes and tests.
        """
        items = []
        for k in range(len(self.vertices)):
            for row, val in zip(self.vertices[k], self.values[k]):
                items.append((float(val), k, tuple(int(x) for x in row)))
        items.sort()
        return [(tup, val) for val, _, tup in items]


def _sort_simplices(rows, vals):
    keys = tuple(rows[:, c] for c in range(rows.shape[1] - 1, -1, -1)) + (vals,)
    order = np.lexsort(keys)
    return rows[order], vals[order]


def vr_filtration(
    space,
    max_dim: int = 2,
    max_radius: float = math.inf,
    max_simplices: int = DEFAULT_MAX_SIMPLICES,
) -> Filtration:
    """Enumerate the Vietoris-Rips filtration of a finite metric space.

    space may be a FiniteMetricSpace or a raw square distance matrix
    (validated on the way in).  Simplices are built up to dimension
    max_dim + 1 by extending each simplex with common neighbors above
    its last vertex, pruning at max_radius.  Raises TooManySimplices as
    soon as the running simplex count would exceed max_simplices.
    """
    if not isinstance(space, FiniteMetricSpace):
        space = FiniteMetricSpace(np.asarray(space, dtype=np.float64))
    max_dim = int(max_dim)
    if max_dim < 0:
        raise ValueError(f"max_dim must be >= 0, got {max_dim}")
    max_radius = float(max_radius)
    if math.isnan(max_radius) or max_radius < 0:
        raise ValueError(f"max_radius must be >= 0, got {max_radius}")
    cap = int(max_simplices)

    D = space.matrix
    n = space.n
    total = n
    if total > cap:
        raise TooManySimplices(f"{total} vertices exceed the cap of {cap}")
    all_rows = [np.arange(n, dtype=np.int64)[:, None]]
    all_vals = [np.zeros(n, dtype=np.float64)]

    iu, ju = np.triu_indices(n, k=1)
    ev = D[iu, ju]
    keep = ev <= max_radius
    iu, ju, ev = iu[keep], ju[keep], ev[keep]
    order = np.lexsort((ju, iu, ev))
    rows = np.column_stack([iu, ju]).astype(np.int64)[order]
    vals = ev[order]
    total += rows.shape[0]
    if total > cap:
        raise TooManySimplices(f"{total} simplices through dim 1 exceed the cap of {cap}")
    all_rows.append(rows)
    all_vals.append(vals)

    adj = D <= max_radius
    np.fill_diagonal(adj, False)
    cols = np.arange(n)
    top = max_dim + 1
    for k in range(2, top + 1):
        new_rows = []
        new_vals = []
        for s in range(0, rows.shape[0], _CHUNK):
            sub = rows[s : s + _CHUNK]
            sval = vals[s : s + _CHUNK]
            mask = adj[sub[:, 0]]
            for c in range(1, k):
                mask = mask & adj[sub[:, c]]
            mask &= cols[None, :] > sub[:, -1][:, None]
            r, w = np.nonzero(mask)
            if r.size == 0:
                continue
            total += r.size
            if total > cap:
                raise TooManySimplices(
                    f"{total} simplices through dim {k} exceed the cap of {cap}"
                )
            ext = D[sub[r], w[:, None]].max(axis=1)
            new_rows.append(np.column_stack([sub[r], w]))
            new_vals.append(np.maximum(sval[r], ext))
        if new_rows:
            rows = np.concatenate(new_rows).astype(np.int64)
            vals = np.concatenate(new_vals)
            rows, vals = _sort_simplices(rows, vals)
        else:
            rows = np.empty((0, k + 1), dtype=np.int64)
            vals = np.empty(0, dtype=np.float64)
        all_rows.append(rows)
        all_vals.append(vals)

    return Filtration(tuple(all_rows), tuple(all_vals), max_dim)


def _boundary(simplices, faces, n):
    """Face-rank matrix of each simplex, rows sorted ascending.

    Faces are located by encoding vertex tuples in base n; the encoding
    stays well inside int64 for every size the simplex cap admits.
    """
    m, width = simplices.shape
    pw = n ** np.arange(width - 1, dtype=np.int64)
    face_enc = faces @ pw
    order = np.argsort(face_enc)
    sorted_enc = face_enc[order]
    B = np.empty((m, width), dtype=np.int64)
    keep = np.arange(width)
    for c in range(width):
        enc = simplices[:, keep != c] @ pw
        B[:, c] = order[np.searchsorted(sorted_enc, enc)]
    B.sort(axis=1)
    return B


def persistence(filtration: Filtration, max_dim: int | None = None) -> PersistenceDiagram:
    """Persistence diagram of a filtration via GF(2) column reduction.

    Dimensions are reduced from the top down so that every pivot row
    found clears the matching column one dimension below before it is
    ever touched.  Pairs with equal birth and death are dropped; classes
    alive at the end of the filtration get death = inf.  Reports
    dimensions 0..max_dim (default: the filtration's homology target,
    which is also the largest allowed value).
    """
    hdim = filtration.max_dim if max_dim is None else int(max_dim)
    if hdim < 0:
        raise ValueError(f"max_dim must be >= 0, got {hdim}")
    if hdim > filtration.max_dim:
        raise ValueError(
            f"filtration was built for homology up to {filtration.max_dim}, "
            f"cannot report dimension {hdim}"
        )
    V = filtration.vertices
    F = filtration.values
    top = filtration.top_dim
    n = filtration.n_points

    dims = []
    births = []
    deaths = []
    positive = [None] * (top + 1)
    positive[0] = np.ones(n, dtype=bool)
    paired_row = [np.zeros(V[k].shape[0], dtype=bool) for k in range(top + 1)]
    skip = None
    for k in range(top, 0, -1):
        m = V[k].shape[0]
        n_faces = V[k - 1].shape[0]
        if m == 0:
            positive[k] = np.zeros(0, dtype=bool)
            skip = None
            continue
        B = _boundary(V[k], V[k - 1], n)
        width = k + 1
        indptr = np.arange(0, m * width + 1, width, dtype=np.int64)
        piv = reduce_columns(indptr, B.ravel(), n_faces, skip)
        hit = piv >= 0
        positive[k] = ~hit
        rows = piv[hit]
        paired_row[k - 1][rows] = True
        b = F[k - 1][rows]
        d = F[k][hit]
        live = d > b
        if np.any(live) and k - 1 <= hdim:
            dims.append(np.full(int(live.sum()), k - 1, dtype=np.int64))
            births.append(b[live])
            deaths.append(d[live])
        skip = np.zeros(n_faces, dtype=np.uint8)
        skip[rows] = 1

    for k in range(0, hdim + 1):
        ess = positive[k] & ~paired_row[k]
        if np.any(ess):
            cnt = int(ess.sum())
            dims.append(np.full(cnt, k, dtype=np.int64))
            births.append(F[k][ess])
            deaths.append(np.full(cnt, np.inf))

    if not dims:
        return PersistenceDiagram(())
    return PersistenceDiagram.from_arrays(
        np.concatenate(dims), np.concatenate(births), np.concatenate(deaths)
    )


def distance_matrix(points, metric: str = "euclidean") -> FiniteMetricSpace:
    """Pairwise distance matrix of a point cloud under a named metric.

    euclidean is the plane L2 distance; cosine-dissimilarity is
    1 - cos(angle) clamped at 0; poincare is the hyperbolic distance
    acosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2))) on the open unit ball.
    The result is exactly symmetric with an exactly zero diagonal.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError(f"expected a nonempty 2-d point array, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("points must be finite")

    if metric == "euclidean":
        full = squareform(pdist(X)) if X.shape[0] > 1 else np.zeros((1, 1))
    elif metric == "cosine-dissimilarity":
        norms = np.linalg.norm(X, axis=1)
        bad = np.nonzero(norms == 0.0)[0]
        if bad.size:
            raise ZeroVector(f"point {bad[0]} is the zero vector")
        unit = X / norms[:, None]
        # 1 - cos(angle) computed as |ux - uy|^2 / 2: identical algebra,
        # but exactly zero for equal unit vectors and never negative
        diff = unit[:, None, :] - unit[None, :, :]
        full = 0.5 * (diff ** 2).sum(axis=-1)
    elif metric == "poincare":
        sq = (X ** 2).sum(axis=1)
        bad = np.nonzero(sq >= 1.0)[0]
        if bad.size:
            raise OutsideBall(f"point {bad[0]} has norm >= 1")
        diff = ((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=-1)
        denom = (1.0 - sq)[:, None] * (1.0 - sq)[None, :]
        full = np.arccosh(np.maximum(1.0 + 2.0 * diff / denom, 1.0))
    else:
        raise ValueError(
            f"unknown metric {metric!r}; expected euclidean, "
            "cosine-dissimilarity, or poincare"
        )

    upper = np.triu(full, k=1)
    return FiniteMetricSpace(upper + upper.T)


def vr_diagram(
    points_or_space,
    metric: str = "euclidean",
    max_dim: int = 2,
    max_radius: float = math.inf,
    max_simplices: int = DEFAULT_MAX_SIMPLICES,
) -> PersistenceDiagram:
    """Persistence diagram of a point cloud or finite metric space."""
    if isinstance(points_or_space, FiniteMetricSpace):
        space = points_or_space
    else:
        space = distance_matrix(points_or_space, metric)
    return persistence(
        vr_filtration(space, max_dim=max_dim, max_radius=max_radius,
                      max_simplices=max_simplices)
    )


def read_point_cloud(path) -> np.ndarray:
    """Read a point cloud from CSV, one point per row.

    Blank lines are skipped and ``#`` starts a comment.  All rows must
    have the same number of coordinates.  Raises ParseError with the
    offending line number.
    """
    rows = []
    width = None
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            try:
                vec = [float(f) for f in fields]
            except ValueError:
                raise ParseError(path, line_no, f"bad float in {line!r}") from None
            if any(math.isnan(v) or math.isinf(v) for v in vec):
                raise ParseError(path, line_no, "non-finite coordinate")
            if width is None:
                width = len(vec)
            elif len(vec) != width:
                raise ParseError(
                    path, line_no, f"expected {width} coordinates, got {len(vec)}"
                )
            rows.append(vec)
    if not rows:
        raise ParseError(path, 1, "no points in file")
    return np.asarray(rows, dtype=np.float64)


def read_distance_matrix(path) -> FiniteMetricSpace:
    """Read a full square distance matrix from CSV.

    The file must hold n rows of n entries; the matrix is validated by
    the FiniteMetricSpace constructor (exact symmetry, zero diagonal).
    """
    M = read_point_cloud(path)
    if M.shape[0] != M.shape[1]:
        raise ParseError(path, 1, f"matrix is {M.shape[0]}x{M.shape[1]}, expected square")
    return FiniteMetricSpace(M)
