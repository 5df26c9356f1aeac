"""Template-based shape retrieval over dilation-invariant comparisons.

Each class is summarized by one template diagram built from repeated
subsampling; a query point cloud is classified by computing its own
diagram and ranking the templates by dissimilarity.  The default
comparison dilates the query onto each template's scale, so queries
measured in arbitrary units still rank correctly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .barycenter import subsample_diagram
from .bottleneck import bottleneck_distance
from .diagram import PersistenceDiagram, drop_essential
from .dilation import di_dissimilarity
from .errors import ClassTooSmall, EmptyInput
from .metric_spaces import FiniteMetricSpace
from .vr_persistence import DEFAULT_MAX_SIMPLICES, distance_matrix, persistence, vr_filtration

BENCHMARK_SEED = 20240601
PROPORTIONS = (0.2, 0.4, 0.6, 0.8)


@dataclass(frozen=True)
class ClassTemplate:
    """Per-class summary diagram with its construction parameters."""

    label: str
    diagram: PersistenceDiagram
    provenance: tuple  # (m, B, seed)


@dataclass(frozen=True)
class RetrievalResult:
    """Ranked (label, dissimilarity) pairs for one query.

    Sorted ascending by dissimilarity, ties broken by label.  proportion
    and seed record how the query was drawn when that applies.
    """

    ranking: tuple
    proportion: float | None = None
    seed: int | None = None

    @property
    def top_label(self) -> str:
        return self.ranking[0][0]

    def top_k(self, k: int) -> tuple:
        return tuple(label for label, _ in self.ranking[:k])


def make_benchmark(n_points: int = 500, seed: int = BENCHMARK_SEED) -> dict:
    """Three synthetic classes: circle, two disjoint circles, gaussian blob.

    Each class is one n_points 2-d cloud.  Child generators are spawned
    from a single seed, so the whole benchmark is reproducible from one
    integer.
    """
    kids = np.random.SeedSequence(seed).spawn(3)

    rng = np.random.default_rng(kids[0])
    t = rng.random(n_points) * 2.0 * np.pi
    circle = np.column_stack([np.cos(t), np.sin(t)])

    rng = np.random.default_rng(kids[1])
    t = rng.random(n_points) * 2.0 * np.pi
    side = rng.integers(0, 2, n_points)
    centers = np.where(side[:, None] == 0, [-2.0, 0.0], [2.0, 0.0])
    two = centers + np.column_stack([np.cos(t), np.sin(t)])

    rng = np.random.default_rng(kids[2])
    blob = 0.7 * rng.standard_normal((n_points, 2))

    return {"blob": blob, "circle": circle, "two-circles": two}


def _as_points_or_space(data):
    if isinstance(data, (FiniteMetricSpace, PersistenceDiagram)):
        return data
    return np.asarray(data, dtype=np.float64)


def _query_diagram(query, metric, max_dim, max_radius, max_simplices):
    if isinstance(query, PersistenceDiagram):
        return drop_essential(query)
    if isinstance(query, FiniteMetricSpace):
        space = query
    else:
        space = distance_matrix(np.asarray(query, dtype=np.float64), metric)
    filt = vr_filtration(space, max_dim=max_dim, max_radius=max_radius,
                         max_simplices=max_simplices)
    return drop_essential(persistence(filt))


def build_templates(
    dataset: dict,
    m: int,
    B: int,
    seed,
    metric: str = "euclidean",
    max_dim: int = 1,
    max_simplices: int = DEFAULT_MAX_SIMPLICES,
) -> list:
    """One ClassTemplate per dataset entry via repeated subsampling.

    dataset maps label -> point array or FiniteMetricSpace.  Labels are
    processed in sorted order with independently spawned child seeds, so
    the output is deterministic and independent of dict ordering.
    """
    if not dataset:
        raise EmptyInput("dataset has no classes")
    labels = sorted(dataset)
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    kids = seed.spawn(len(labels))
    out = []
    for label, kid in zip(labels, kids):
        data = _as_points_or_space(dataset[label])
        size = data.n if isinstance(data, FiniteMetricSpace) else data.shape[0]
        if size < m:
            raise ClassTooSmall(f"class {label!r} has {size} points, needs >= {m}")
        dgm = subsample_diagram(data, m, B, kid, metric=metric, max_dim=max_dim,
                                max_simplices=max_simplices)
        out.append(ClassTemplate(label=label, diagram=dgm,
                                 provenance=(m, B, seed.entropy)))
    return out


def classify(
    query,
    templates,
    direction: str = "query-to-template",
    partitions: int = 100,
    distance: str = "di",
    metric: str = "euclidean",
    max_dim: int = 1,
    max_radius: float = math.inf,
    max_simplices: int = DEFAULT_MAX_SIMPLICES,
    proportion: float | None = None,
    seed: int | None = None,
) -> RetrievalResult:
    """Rank templates by dissimilarity to a query.

    query may be a point array, a FiniteMetricSpace, or a precomputed
    PersistenceDiagram; essential classes are dropped.  With the default
    direction the query is the dilated first argument, so every
    comparison happens on the template's own scale and the ranking is
    invariant to rescaling the query.  distance selects the
    dilation-invariant dissimilarity ("di") or the plain bottleneck
    distance ("bottleneck").
    """
    templates = list(templates)
    if not templates:
        raise EmptyInput("need at least one template")
    if direction not in ("query-to-template", "template-to-query"):
        raise ValueError(f"unknown direction {direction!r}")
    if distance not in ("di", "bottleneck"):
        raise ValueError(f"unknown distance {distance!r}")

    q = _query_diagram(query, metric, max_dim, max_radius, max_simplices)
    scored = []
    for tpl in templates:
        if distance == "bottleneck":
            val = bottleneck_distance(q, tpl.diagram)
        elif direction == "query-to-template":
            val = di_dissimilarity(q, tpl.diagram, partitions=partitions).value
        else:
            val = di_dissimilarity(tpl.diagram, q, partitions=partitions).value
        scored.append((float(val), tpl.label))
    scored.sort()
    ranking = tuple((label, val) for val, label in scored)
    return RetrievalResult(ranking=ranking, proportion=proportion, seed=seed)


def evaluate(
    dataset: dict,
    proportions=PROPORTIONS,
    trials: int = 50,
    seed: int = 0,
    m: int = 150,
    B: int = 5,
    partitions: int = 100,
    metric: str = "euclidean",
    max_dim: int = 1,
    max_simplices: int = DEFAULT_MAX_SIMPLICES,
    query_scale: float = 1.0,
    direction: str = "query-to-template",
) -> list:
    """Top-1/top-2 accuracy per proportion for both distances.

    Builds one template per class, then runs `trials` queries per
    proportion: trial t queries the class at position t mod k in label
    order with a fresh random subset of that class's points, scaled by
    query_scale.  Each query diagram is computed once and scored under
    both the dilation-invariant dissimilarity and the plain bottleneck
    distance.  Returns rows of dicts with keys proportion, distance,
    top1, top2, trials; all randomness descends from seed.
    """
    if not dataset:
        raise EmptyInput("dataset has no classes")
    labels = sorted(dataset)
    data = {lab: _as_points_or_space(dataset[lab]) for lab in labels}
    root = np.random.SeedSequence(seed)
    tpl_seed, query_root = root.spawn(2)
    templates = build_templates(data, m, B, tpl_seed, metric=metric,
                                max_dim=max_dim, max_simplices=max_simplices)

    proportions = tuple(float(p) for p in proportions)
    trials = int(trials)
    query_seeds = query_root.spawn(len(proportions) * trials)
    hits = {(p, dist): [0, 0] for p in proportions for dist in ("di", "bottleneck")}
    for pi, p in enumerate(proportions):
        for t in range(trials):
            true_label = labels[t % len(labels)]
            cloud = data[true_label]
            M = cloud.n if isinstance(cloud, FiniteMetricSpace) else cloud.shape[0]
            k = max(2, int(round(p * M)))
            rng = np.random.default_rng(query_seeds[pi * trials + t])
            idx = np.sort(rng.choice(M, size=min(k, M), replace=False))
            if isinstance(cloud, FiniteMetricSpace):
                space = FiniteMetricSpace(cloud.matrix[np.ix_(idx, idx)])
            else:
                space = distance_matrix(cloud[idx], metric)
            if query_scale != 1.0:
                space = space.scale(query_scale)
            q = _query_diagram(space, metric, max_dim, math.inf, max_simplices)
            for dist in ("di", "bottleneck"):
                res = classify(q, templates, direction=direction,
                               partitions=partitions, distance=dist,
                               proportion=p, seed=seed)
                top = res.top_k(2)
                hits[(p, dist)][0] += top[0] == true_label
                hits[(p, dist)][1] += true_label in top
    rows = []
    for p in proportions:
        for dist in ("di", "bottleneck"):
            h1, h2 = hits[(p, dist)]
            rows.append({
                "proportion": p,
                "distance": dist,
                "top1": h1 / trials,
                "top2": h2 / trials,
                "trials": trials,
            })
    return rows
