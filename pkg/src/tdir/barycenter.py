"""2-Wasserstein geometry of persistence diagrams.

The 2-Wasserstein distance matches points across two diagrams, letting
any point fall back to its orthogonal diagonal projection, and charges
squared Euclidean cost.  The Frechet mean minimizes the mean squared
distance to a collection of diagrams by alternating between optimal
matchings and per-point partner averaging; the subsampling constructor
summarizes a large point cloud by the mean of the diagrams of many
small random subsamples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .diagram import PersistenceDiagram, PersistencePoint, drop_essential
from .errors import EmptyInput, UnboundedPoint
from .metric_spaces import FiniteMetricSpace
from .vr_persistence import distance_matrix, persistence, vr_filtration

DEFAULT_MAX_SIMPLICES = 5_000_000


@dataclass(frozen=True)
class WassersteinMatching:
    """Optimal 2-Wasserstein matching between two diagrams.

    pairs holds (i, j) index pairs into A.points and B.points; the two
    unmatched tuples list the indices sent to their diagonal
    projections.  squared_cost is the matching's total squared cost.
    """

    pairs: tuple
    unmatched_a: tuple
    unmatched_b: tuple
    squared_cost: float


def _finite_arrays(diagram, name):
    dims, births, deaths = diagram.arrays()
    if dims.size and np.isinf(deaths).any():
        raise UnboundedPoint(
            f"{name} has an essential point; cap or drop essentials first"
        )
    return dims, births, deaths


def wasserstein2(A: PersistenceDiagram, B: PersistenceDiagram,
                 return_matching: bool = False):
    """2-Wasserstein distance between finite diagrams.

    Solved exactly per dimension as an assignment problem on the
    (|A|+|B|) x (|A|+|B|) augmented cost matrix: each side is padded
    with anonymous diagonal slots, a point pays (death-birth)^2/2 to
    reach its projection, and diagonal-diagonal pairs are free.
    Returns the square root of the minimal total squared cost, or
    (distance, WassersteinMatching) with return_matching.
    """
    adim, ab, ad = _finite_arrays(A, "A")
    bdim, bb, bd_ = _finite_arrays(B, "B")

    costs = []
    pairs = []
    un_a = []
    un_b = []
    for d in np.union1d(adim, bdim):
        ia = np.nonzero(adim == d)[0]
        ib = np.nonzero(bdim == d)[0]
        na, nb = ia.size, ib.size
        C = np.zeros((na + nb, na + nb), dtype=np.float64)
        if na and nb:
            C[:na, :nb] = (
                (ab[ia][:, None] - bb[ib][None, :]) ** 2
                + (ad[ia][:, None] - bd_[ib][None, :]) ** 2
            )
        C[:na, nb:] = (0.5 * (ad[ia] - ab[ia]) ** 2)[:, None]
        C[na:, :nb] = (0.5 * (bd_[ib] - bb[ib]) ** 2)[None, :]
        rows, cols = linear_sum_assignment(C)
        # correctly rounded total, independent of summation order
        costs.extend(float(x) for x in C[rows, cols])
        for r, c in zip(rows, cols):
            if r < na and c < nb:
                pairs.append((int(ia[r]), int(ib[c])))
            elif r < na:
                un_a.append(int(ia[r]))
            elif c < nb:
                un_b.append(int(ib[c]))

    total = math.fsum(costs)
    dist = math.sqrt(total)
    if not return_matching:
        return dist
    matching = WassersteinMatching(
        pairs=tuple(sorted(pairs)),
        unmatched_a=tuple(sorted(un_a)),
        unmatched_b=tuple(sorted(un_b)),
        squared_cost=total,
    )
    return dist, matching


def _frechet_value(Z, diagrams):
    return sum(wasserstein2(Z, D) ** 2 for D in diagrams) / len(diagrams)


def _midpoint(p: PersistencePoint):
    m = 0.5 * (p.birth + p.death)
    return m, m


def frechet_mean(
    diagrams,
    max_iter: int = 100,
    tol: float = 1e-7,
    return_history: bool = False,
):
    """Frechet mean (Lagrangian barycenter) of a list of finite diagrams.

    Alternates two steps: compute optimal 2-Wasserstein matchings from
    the current mean Z to every input, then replace each Z-point by the
    arithmetic mean of its matched partners, counting diagonal
    projections as partners.  When a majority of inputs have an
    off-diagonal point matched only to the diagonal, a candidate mean of
    those points is added and kept only if the functional does not
    increase.  Z-points whose update lands on the diagonal are dropped.
    Starts from the input with median functional value and stops when
    F(Z) = mean of squared distances decreases by less than tol.  The
    recorded F history is nonincreasing by construction.
    """
    diagrams = [
        d if isinstance(d, PersistenceDiagram) else PersistenceDiagram(d)
        for d in diagrams
    ]
    if not diagrams or all(d.is_empty for d in diagrams):
        raise EmptyInput("frechet mean needs at least one nonempty diagram")
    for i, d in enumerate(diagrams):
        _finite_arrays(d, f"diagram {i}")
    nd = len(diagrams)

    f0 = [(_frechet_value(d, diagrams), i) for i, d in enumerate(diagrams)]
    f0.sort()
    f_cur, start = f0[(nd - 1) // 2]
    Z = list(diagrams[start])
    history = [f_cur]

    for _ in range(int(max_iter)):
        ZD = PersistenceDiagram(Z)
        Zp = ZD.points
        matchings = [wasserstein2(ZD, D, True)[1] for D in diagrams]

        partner_sums = {k: [0.0, 0.0] for k in range(len(Zp))}
        for mi, D in zip(matchings, diagrams):
            matched = dict(mi.pairs)
            pts = D.points
            for k in range(len(Zp)):
                if k in matched:
                    q = pts[matched[k]]
                    partner_sums[k][0] += q.birth
                    partner_sums[k][1] += q.death
                else:
                    x, y = _midpoint(Zp[k])
                    partner_sums[k][0] += x
                    partner_sums[k][1] += y

        new_Z = []
        for k, z in enumerate(Zp):
            b = partner_sums[k][0] / nd
            d = partner_sums[k][1] / nd
            if d > b:
                new_Z.append(PersistencePoint(z.dim, b, d))

        # offer one new point per dimension where a majority of inputs
        # left an off-diagonal point unmatched
        for dim in sorted({p.dim for D in diagrams for p in D}):
            leaders = []
            for mi, D in zip(matchings, diagrams):
                cands = [
                    D.points[j]
                    for j in mi.unmatched_b
                    if D.points[j].dim == dim and D.points[j].death > D.points[j].birth
                ]
                if cands:
                    leaders.append(
                        max(cands, key=lambda p: (p.death - p.birth, p.death, p.birth))
                    )
            if len(leaders) * 2 <= nd:
                continue
            qb = sum(p.birth for p in leaders) / len(leaders)
            qd = sum(p.death for p in leaders) / len(leaders)
            mid = 0.5 * (qb + qd)
            b = (sum(p.birth for p in leaders) + (nd - len(leaders)) * mid) / nd
            d = (sum(p.death for p in leaders) + (nd - len(leaders)) * mid) / nd
            if d <= b:
                continue
            base = _frechet_value(PersistenceDiagram(new_Z), diagrams)
            cand = PersistencePoint(dim, b, d)
            if _frechet_value(PersistenceDiagram(new_Z + [cand]), diagrams) <= base:
                new_Z.append(cand)

        f_new = _frechet_value(PersistenceDiagram(new_Z), diagrams)
        if f_new > f_cur:
            break
        Z = new_Z
        history.append(f_new)
        if f_cur - f_new < tol:
            f_cur = f_new
            break
        f_cur = f_new

    result = PersistenceDiagram(Z)
    if return_history:
        return result, tuple(history)
    return result


def subsample_diagram(
    space_or_points,
    m: int,
    B: int,
    seed,
    metric: str = "euclidean",
    max_dim: int = 1,
    max_radius: float = np.inf,
    max_simplices: int = DEFAULT_MAX_SIMPLICES,
) -> PersistenceDiagram:
    """Frechet mean of the diagrams of B random m-point subsamples.

    Essential classes are dropped from each subsample diagram so the
    2-Wasserstein machinery applies; with m equal to the full size and
    B = 1 the result is exactly the full diagram minus its essential
    classes.  Deterministic given seed.
    """
    if isinstance(space_or_points, FiniteMetricSpace):
        space = space_or_points
        M = space.n
    else:
        pts = np.asarray(space_or_points, dtype=np.float64)
        space = None
        M = pts.shape[0]
    m = int(m)
    B = int(B)
    if not 1 <= m <= M:
        raise ValueError(f"subsample size must be in [1, {M}], got {m}")
    if B < 1:
        raise ValueError(f"need at least one subsample, got {B}")

    rng = np.random.default_rng(seed)
    diags = []
    for _ in range(B):
        idx = np.sort(rng.choice(M, size=m, replace=False))
        if space is not None:
            sub = FiniteMetricSpace(space.matrix[np.ix_(idx, idx)])
        else:
            sub = distance_matrix(pts[idx], metric)
        filt = vr_filtration(sub, max_dim=max_dim, max_radius=max_radius,
                             max_simplices=max_simplices)
        diags.append(drop_essential(persistence(filt)))
    if B == 1:
        return diags[0]
    return frechet_mean(diags)
