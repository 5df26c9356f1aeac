"""Exact bottleneck distance between persistence diagrams.

The distance is the smallest eps admitting a partial matching between the
two diagrams whose matched pairs cost at most eps in the sup norm and
whose unmatched points each sit within eps of the diagonal (their
persistence is at most eps).  Points are only matched within the same
homology dimension unless mix_dims is set.

The exact value is found by binary search over the finite candidate set
(pairwise sup-norm costs plus all persistences plus 0); feasibility of a
given eps is decided by a perfect-matching problem on a slot graph that
pairs each point either with a partner or with its own diagonal slot.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .diagram import PersistenceDiagram
from .errors import TooLarge, UnboundedPoint

# absolute slack absorbing float dust in cost comparisons
SLACK = 1e-12

# at or below this many slot-graph vertices the hand-rolled augmenting-path
# matcher beats the sparse-matrix round trip
_SMALL_GRAPH = 64


def linf(a, b) -> float:
    """Sup-norm distance between two points (birth/death coordinates)."""
    return max(abs(a.birth - b.birth), abs(a.death - b.death))


@dataclass(frozen=True)
class Matching:
    """Witness for a bottleneck feasibility decision.

    pairs holds (i, j) index pairs into A.points and B.points; the two
    unmatched tuples list the indices sent to their diagonal projections.
    Every index appears exactly once.
    """

    pairs: tuple
    unmatched_a: tuple
    unmatched_b: tuple

    def max_cost(self, A: PersistenceDiagram, B: PersistenceDiagram) -> float:
        """Largest cost incurred by this matching."""
        cost = 0.0
        for i, j in self.pairs:
            cost = max(cost, linf(A.points[i], B.points[j]))
        for i in self.unmatched_a:
            cost = max(cost, A.points[i].persistence)
        for j in self.unmatched_b:
            cost = max(cost, B.points[j].persistence)
        return cost

    def validate(self, A: PersistenceDiagram, B: PersistenceDiagram) -> None:
        """Check that the matching is a partition of both index sets."""
        a_seen = sorted([i for i, _ in self.pairs] + list(self.unmatched_a))
        b_seen = sorted([j for _, j in self.pairs] + list(self.unmatched_b))
        if a_seen != list(range(len(A))):
            raise ValueError("matching does not partition the A indices")
        if b_seen != list(range(len(B))):
            raise ValueError("matching does not partition the B indices")


def _arrays(diagram: PersistenceDiagram, mix_dims: bool):
    dims, births, deaths = diagram.arrays()
    if np.isinf(deaths).any():
        raise UnboundedPoint(
            "bottleneck distance needs finite diagrams; cap or drop essentials"
        )
    if mix_dims:
        dims = np.zeros_like(dims)
    return dims, births, deaths


def candidate_set(
    A: PersistenceDiagram, B: PersistenceDiagram, mix_dims: bool = False
) -> np.ndarray:
    """Sorted unique candidate values the distance must be drawn from.

    Contains every pairwise sup-norm cost, every point persistence on
    both sides, and 0.  The optimal distance under any dimension policy
    is always a member.
    """
    adim, ax, ay = _arrays(A, mix_dims)
    bdim, bx, by = _arrays(B, mix_dims)
    return _candidates(adim, ax, ay, bdim, bx, by)


def _candidates(adim, ax, ay, bdim, bx, by) -> np.ndarray:
    vals = [np.array([0.0])]
    if ax.size:
        vals.append((ay - ax) / 2.0)
    if bx.size:
        vals.append((by - bx) / 2.0)
    if ax.size and bx.size:
        cost = np.maximum(
            np.abs(ax[:, None] - bx[None, :]), np.abs(ay[:, None] - by[None, :])
        )
        vals.append(cost.ravel())
    return np.unique(np.concatenate(vals))


def _kuhn_perfect(adj, n_left, n_right) -> np.ndarray | None:
    """Perfect matching on a small bipartite graph via augmenting paths.

    adj[i] lists the right neighbours of left vertex i.  Returns the
    right-to-left match array, or None when no perfect matching exists.
    """
    match_r = np.full(n_right, -1, dtype=np.int64)
    match_l = np.full(n_left, -1, dtype=np.int64)

    def augment(i, seen):
        for j in adj[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match_r[j] == -1 or augment(match_r[j], seen):
                match_r[j] = i
                match_l[i] = j
                return True
        return False

    for i in range(n_left):
        if not augment(i, np.zeros(n_right, dtype=bool)):
            return None
    return match_r


def _feasible_arrays(adim, ax, ay, bdim, bx, by, eps, want_witness=False):
    """Decide whether eps is bottleneck-feasible; optionally build a witness.

    Returns (ok, witness_pairs or None).  witness_pairs is a list of
    (original A index, original B index) matched pairs; everything else
    goes to the diagonal.
    """
    thr = eps + SLACK
    pa = (ay - ax) / 2.0
    pb = (by - bx) / 2.0
    req_a = pa > thr
    req_b = pb > thr
    if not req_a.any() and not req_b.any():
        return True, ([] if want_witness else None)

    if ax.size and bx.size:
        same = adim[:, None] == bdim[None, :]
        cost = np.maximum(
            np.abs(ax[:, None] - bx[None, :]), np.abs(ay[:, None] - by[None, :])
        )
        edge = same & (cost <= thr)
    else:
        edge = np.zeros((ax.size, bx.size), dtype=bool)

    # only points that are required, or could serve as a partner of a
    # required point on the other side, can affect feasibility
    rel_a = req_a | (edge[:, req_b].any(axis=1) if req_b.any() else False)
    rel_b = req_b | (edge[req_a, :].any(axis=0) if req_a.any() else False)
    ia = np.nonzero(rel_a)[0]
    ib = np.nonzero(rel_b)[0]
    m, n = ia.size, ib.size
    if (req_a.any() and n == 0) or (req_b.any() and m == 0):
        return False, None

    sub = edge[np.ix_(ia, ib)]
    free_a = pa[ia] <= thr
    free_b = pb[ib] <= thr

    # slot graph: left = A points then B diagonal slots, right = B points
    # then A diagonal slots; a perfect matching covers everything
    if m + n <= _SMALL_GRAPH:
        adj = []
        for i in range(m):
            nbrs = list(np.nonzero(sub[i])[0])
            if free_a[i]:
                nbrs.append(n + i)
            adj.append(nbrs)
        for j in range(n):
            nbrs = list(range(n, n + m))
            if free_b[j]:
                nbrs.append(j)
            adj.append(nbrs)
        match_r = _kuhn_perfect(adj, m + n, n + m)
        if match_r is None:
            return False, None
    else:
        ei, ej = np.nonzero(sub)
        rows = [ei]
        cols = [ej]
        fa = np.nonzero(free_a)[0]
        rows.append(fa)
        cols.append(n + fa)
        fb = np.nonzero(free_b)[0]
        rows.append(m + fb)
        cols.append(fb)
        gj, gi = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
        rows.append(m + gj.ravel())
        cols.append(n + gi.ravel())
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        graph = csr_matrix(
            (np.ones(rows.size, dtype=np.uint8), (rows, cols)),
            shape=(m + n, n + m),
        )
        perm = maximum_bipartite_matching(graph, perm_type="column")
        if (perm >= 0).sum() != m + n:
            return False, None
        match_r = np.full(n + m, -1, dtype=np.int64)
        match_r[perm[perm >= 0]] = np.nonzero(perm >= 0)[0]

    if not want_witness:
        return True, None
    pairs = []
    for j in range(n):
        i = match_r[j]
        if 0 <= i < m:
            pairs.append((int(ia[i]), int(ib[j])))
    return True, pairs


def feasible(
    A: PersistenceDiagram,
    B: PersistenceDiagram,
    eps: float,
    mix_dims: bool = False,
):
    """Decide whether the diagrams admit a matching of cost at most eps.

    Returns (ok, Matching or None); the witness realises a cost within
    the comparison slack of eps.
    """
    eps = float(eps)
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    adim, ax, ay = _arrays(A, mix_dims)
    bdim, bx, by = _arrays(B, mix_dims)
    ok, pairs = _feasible_arrays(
        adim, ax, ay, bdim, bx, by, float(eps), want_witness=True
    )
    if not ok:
        return False, None
    return True, _complete_matching(pairs, len(A), len(B))


def _complete_matching(pairs, na, nb) -> Matching:
    used_a = {i for i, _ in pairs}
    used_b = {j for _, j in pairs}
    return Matching(
        pairs=tuple(sorted(pairs)),
        unmatched_a=tuple(i for i in range(na) if i not in used_a),
        unmatched_b=tuple(j for j in range(nb) if j not in used_b),
    )


def _search_arrays(adim, ax, ay, bdim, bx, by, lo=None, hi=None, want_witness=False):
    """Binary search over the candidate set for the minimal feasible eps.

    lo/hi optionally bracket the answer; the bracket is advisory, and the
    search falls back to the full candidate set when it proves stale.
    """
    cand = _candidates(adim, ax, ay, bdim, bx, by)
    sl = cand
    i0 = 0
    if lo is not None:
        i0 = int(np.searchsorted(cand, lo - SLACK, side="left"))
        i1 = int(np.searchsorted(cand, hi + SLACK, side="right"))
        sl = cand[i0:i1]
        if sl.size == 0:
            sl = cand
            i0 = 0

    def run(c):
        ok0, w0 = _feasible_arrays(
            adim, ax, ay, bdim, bx, by, c[0], want_witness=want_witness
        )
        if ok0:
            return c[0], w0
        lo_i, hi_i = 0, c.size - 1
        ok_top, w_top = _feasible_arrays(
            adim, ax, ay, bdim, bx, by, c[hi_i], want_witness=want_witness
        )
        if not ok_top:
            return None
        best_w = w_top
        while hi_i - lo_i > 1:
            mid = (lo_i + hi_i) // 2
            ok, w = _feasible_arrays(
                adim, ax, ay, bdim, bx, by, c[mid], want_witness=want_witness
            )
            if ok:
                hi_i = mid
                best_w = w
            else:
                lo_i = mid
        return c[hi_i], best_w

    out = run(sl)
    # rerun unbracketed when the bracket proved stale: no feasible value in
    # the slice, or the answer landed on the slice's trimmed left edge (the
    # true minimum could then sit below it)
    if out is None or (sl is not cand and i0 > 0 and out[0] == sl[0]):
        out = run(cand)
        if out is None:
            raise RuntimeError("no feasible candidate; this should be impossible")
    return out


def bottleneck_distance(
    A: PersistenceDiagram,
    B: PersistenceDiagram,
    mix_dims: bool = False,
    return_matching: bool = False,
):
    """Exact bottleneck distance between two finite diagrams.

    With return_matching=True also returns a witness Matching attaining
    the distance.  The empty diagram is at distance max-persistence from
    any diagram.
    """
    adim, ax, ay = _arrays(A, mix_dims)
    bdim, bx, by = _arrays(B, mix_dims)
    val, pairs = _search_arrays(
        adim, ax, ay, bdim, bx, by, want_witness=return_matching
    )
    if return_matching:
        return float(val), _complete_matching(pairs, len(A), len(B))
    return float(val)


def bottleneck_bruteforce(
    A: PersistenceDiagram, B: PersistenceDiagram, mix_dims: bool = False
) -> float:
    """Reference implementation enumerating all partial matchings.

    Exponential; restricted to |A| + |B| <= 8 (raises TooLarge above).
    """
    if len(A) + len(B) > 8:
        raise TooLarge(f"brute force capped at 8 points total, got {len(A) + len(B)}")
    adim, ax, ay = _arrays(A, mix_dims)
    bdim, bx, by = _arrays(B, mix_dims)
    pa = (ay - ax) / 2.0
    pb = (by - bx) / 2.0
    na, nb = ax.size, bx.size
    best = math.inf

    def rec(i, used, cur):
        nonlocal best
        if cur >= best:
            return
        if i == na:
            rest = cur
            for j in range(nb):
                if not (used >> j) & 1:
                    rest = max(rest, pb[j])
                    if rest >= best:
                        return
            best = rest
            return
        rec(i + 1, used, max(cur, pa[i]))
        for j in range(nb):
            if (used >> j) & 1 or adim[i] != bdim[j]:
                continue
            c = max(abs(ax[i] - bx[j]), abs(ay[i] - by[j]))
            rec(i + 1, used | (1 << j), max(cur, c))

    rec(0, 0, 0.0)
    return float(best)
