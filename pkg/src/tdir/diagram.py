"""Persistence diagrams: point/diagram types, summary statistics, rescaling
maps, and a plain CSV interchange format.

A diagram is a finite multiset of points (dim, birth, death) with
death >= birth.  Deaths may be infinite; births may be negative (the log
map produces them).  The empty diagram stands for the diagonal alone.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyDiagram,
    InvalidDilation,
    NegativePersistence,
    ParseError,
    SmallLogImageWarning,
    UnboundedPoint,
)

INFINITE = math.inf

LOG_IMAGE_FLOOR = -50.0


@dataclass(frozen=True, order=True)
class PersistencePoint:
    """One off-diagonal feature: homology dimension, birth, and death."""

    dim: int
    birth: float
    death: float

    def __post_init__(self):
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 0):
            raise ValueError(f"dim must be a nonnegative integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        b = float(self.birth)
        d = float(self.death)
        if math.isnan(b) or math.isnan(d):
            raise ValueError("birth and death must not be NaN")
        if math.isinf(b):
            raise ValueError("birth must be finite")
        if d < b:
            raise NegativePersistence(f"death {d} < birth {b}")
        object.__setattr__(self, "birth", b)
        object.__setattr__(self, "death", d)

    @property
    def persistence(self) -> float:
        """Half-lifetime (death - birth) / 2; raises on infinite death."""
        if math.isinf(self.death):
            raise UnboundedPoint(f"point {self} has infinite death")
        return (self.death - self.birth) / 2.0


class PersistenceDiagram:
    """Immutable multiset of persistence points.

    Points are stored in a canonical sorted order, so two diagrams holding
    the same multiset compare equal regardless of construction order.
    """

    __slots__ = ("_points", "_cache")

    def __init__(self, points=()):
        pts = []
        for p in points:
            if not isinstance(p, PersistencePoint):
                p = PersistencePoint(*p)
            pts.append(p)
        self._points = tuple(sorted(pts))
        self._cache = {}

    @classmethod
    def from_arrays(cls, dims, births, deaths) -> "PersistenceDiagram":
        dims = np.asarray(dims)
        births = np.asarray(births, dtype=float)
        deaths = np.asarray(deaths, dtype=float)
        if not (dims.shape == births.shape == deaths.shape):
            raise ValueError("dims, births, deaths must have matching shapes")
        return cls(
            PersistencePoint(int(q), float(b), float(d))
            for q, b, d in zip(dims, births, deaths)
        )

    @property
    def points(self) -> tuple:
        return self._points

    def __len__(self) -> int:
        return len(self._points)

    def __iter__(self):
        return iter(self._points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self._points == other._points

    def __hash__(self) -> int:
        return hash(self._points)

    def __repr__(self) -> str:
        if len(self._points) > 6:
            inner = ", ".join(repr(p) for p in self._points[:6])
            return f"PersistenceDiagram([{inner}, ... {len(self)} points])"
        inner = ", ".join(repr(p) for p in self._points)
        return f"PersistenceDiagram([{inner}])"

    @property
    def is_empty(self) -> bool:
        return not self._points

    @property
    def dims(self) -> tuple:
        """Sorted homology dimensions present in the diagram."""
        return tuple(sorted({p.dim for p in self._points}))

    def arrays(self):
        """(dims, births, deaths) as numpy arrays, cached per instance."""
        if "arr" not in self._cache:
            n = len(self._points)
            dims = np.empty(n, dtype=np.int64)
            births = np.empty(n, dtype=np.float64)
            deaths = np.empty(n, dtype=np.float64)
            for i, p in enumerate(self._points):
                dims[i] = p.dim
                births[i] = p.birth
                deaths[i] = p.death
            self._cache["arr"] = (dims, births, deaths)
        return self._cache["arr"]

    def restrict(self, dim: int) -> "PersistenceDiagram":
        """Sub-multiset of points in one homology dimension."""
        return PersistenceDiagram(p for p in self._points if p.dim == dim)

    @property
    def has_unbounded(self) -> bool:
        return any(math.isinf(p.death) for p in self._points)


EMPTY = PersistenceDiagram(())


@dataclass(frozen=True)
class DiagramStats:
    """Scale summary of a finite diagram.

    pers           max half-lifetime over all points (0 for the empty diagram)
    bd             largest death value (0 for the empty diagram)
    chi            sub-multiset of points attaining the max persistence
    y_max_of_chi   member of chi with the largest death, ties broken toward
                   the larger birth; None for the empty diagram
    """

    pers: float
    bd: float
    chi: PersistenceDiagram
    y_max_of_chi: PersistencePoint | None


def pers_point(p: PersistencePoint) -> float:
    """Persistence (death - birth) / 2 of a finite point."""
    return p.persistence


def pers(x) -> float:
    """Persistence of a point, or the maximal persistence of a diagram.

    The empty diagram has persistence 0.  Raises UnboundedPoint when an
    infinite death is involved.
    """
    if isinstance(x, PersistencePoint):
        return x.persistence
    if x.is_empty:
        return 0.0
    return max(p.persistence for p in x)


def bd(diagram: PersistenceDiagram) -> float:
    """Largest death value of a diagram; 0 for the empty diagram."""
    if diagram.is_empty:
        return 0.0
    if diagram.has_unbounded:
        raise UnboundedPoint("max death undefined for unbounded diagrams")
    return max(p.death for p in diagram)


def stats(diagram: PersistenceDiagram) -> DiagramStats:
    """Scale summary (max persistence, max death, argmax points).

    The empty diagram yields pers 0, bd 0, empty chi.
    """
    if diagram.is_empty:
        return DiagramStats(pers=0.0, bd=0.0, chi=EMPTY, y_max_of_chi=None)
    m = pers(diagram)
    chi = PersistenceDiagram(p for p in diagram if p.persistence == m)
    # ties toward larger death, then larger birth
    top = max(chi, key=lambda p: (p.death, p.birth))
    return DiagramStats(pers=m, bd=bd(diagram), chi=chi, y_max_of_chi=top)


def scale(diagram: PersistenceDiagram, c: float) -> PersistenceDiagram:
    """Dilate every point by a factor c >= 0.

    Scaling by 0 collapses every point onto the diagonal, so the result
    is the empty diagram.
    """
    c = float(c)
    if math.isnan(c) or math.isinf(c) or c < 0:
        raise InvalidDilation(f"dilation factor must be finite and >= 0, got {c}")
    if c == 0.0:
        return EMPTY
    return PersistenceDiagram(
        PersistencePoint(p.dim, c * p.birth, c * p.death) for p in diagram
    )


def shift(diagram: PersistenceDiagram, s: float) -> PersistenceDiagram:
    """Translate every point by (s, s); infinite deaths stay infinite."""
    s = float(s)
    if math.isnan(s) or math.isinf(s):
        raise ValueError(f"shift must be finite, got {s}")
    return PersistenceDiagram(
        PersistencePoint(p.dim, p.birth + s, p.death + s) for p in diagram
    )


def log_map(diagram: PersistenceDiagram, epsilon: float = 1e-10) -> PersistenceDiagram:
    """Map every point (x, y) to (ln(x + epsilon), ln(y + epsilon)).

    epsilon guards against zero births; epsilon=0 is allowed when every
    birth is strictly positive.  Coordinates below -50 trigger a warning
    but are kept.
    """
    epsilon = float(epsilon)
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    if diagram.has_unbounded:
        raise UnboundedPoint("log map needs finite deaths; cap essentials first")
    out = []
    low = 0
    for p in diagram:
        xb = p.birth + epsilon
        xd = p.death + epsilon
        if xb <= 0 or xd <= 0:
            raise ValueError(
                f"log map undefined at {p}: coordinate + epsilon is <= 0"
            )
        lb = math.log(xb)
        ld = math.log(xd)
        if lb < LOG_IMAGE_FLOOR or ld < LOG_IMAGE_FLOOR:
            low += 1
        out.append(PersistencePoint(p.dim, lb, ld))
    if low:
        warnings.warn(
            f"log map produced {low} point(s) with coordinates below "
            f"{LOG_IMAGE_FLOOR}; consider cropping low births",
            SmallLogImageWarning,
            stacklevel=2,
        )
    return PersistenceDiagram(out)


def exp_map(diagram: PersistenceDiagram, epsilon: float = 0.0) -> PersistenceDiagram:
    """Inverse of the log map: (x, y) -> (exp(x) - epsilon, exp(y) - epsilon)."""
    return PersistenceDiagram(
        PersistencePoint(p.dim, math.exp(p.birth) - epsilon, math.exp(p.death) - epsilon)
        for p in diagram
    )


def cap_essential(diagram: PersistenceDiagram, value="max") -> PersistenceDiagram:
    """Replace infinite deaths by a finite cap.

    value is a number, or "max" for the largest finite death in the
    diagram.  Raises NegativePersistence if the cap falls below the birth
    of an unbounded point, and EmptyDiagram when "max" is requested but no
    finite death exists.
    """
    if not diagram.has_unbounded:
        return diagram
    if value == "max":
        finite = [p.death for p in diagram if not math.isinf(p.death)]
        if not finite:
            raise EmptyDiagram("no finite death available to cap with")
        cap = max(finite)
    else:
        cap = float(value)
        if math.isinf(cap) or math.isnan(cap):
            raise ValueError(f"cap must be finite, got {cap}")
    out = []
    for p in diagram:
        if math.isinf(p.death):
            if cap < p.birth:
                raise NegativePersistence(
                    f"cap {cap} is below the birth {p.birth} of an unbounded point"
                )
            p = PersistencePoint(p.dim, p.birth, cap)
        out.append(p)
    return PersistenceDiagram(out)


def drop_essential(diagram: PersistenceDiagram) -> PersistenceDiagram:
    """Remove all points with infinite death."""
    return PersistenceDiagram(p for p in diagram if not math.isinf(p.death))


def _format_float(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return format(x, ".17g")


def write_diagram(diagram: PersistenceDiagram, path) -> None:
    """Write a diagram as CSV lines ``dim,birth,death`` (death may be inf).

    Floats use %.17g, so a write/read round trip is lossless.
    """
    with open(path, "w") as fh:
        fh.write("# dim,birth,death\n")
        for p in diagram:
            fh.write(f"{p.dim},{_format_float(p.birth)},{_format_float(p.death)}\n")


def read_diagram(path) -> PersistenceDiagram:
    """Read a diagram from CSV lines ``dim,birth,death``.

    Blank lines are skipped and ``#`` starts a comment (full-line or
    trailing).  Deaths may be ``inf``.  Raises ParseError with the
    offending line number, or NegativePersistence when death < birth.
    """
    pts = []
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != 3:
                raise ParseError(
                    path, line_no, f"expected 3 fields dim,birth,death, got {len(fields)}"
                )
            try:
                dim = int(fields[0])
            except ValueError:
                raise ParseError(path, line_no, f"bad dimension {fields[0]!r}") from None
            try:
                birth = float(fields[1])
                death = float(fields[2])
            except ValueError:
                raise ParseError(
                    path, line_no, f"bad float in {fields[1]!r},{fields[2]!r}"
                ) from None
            if dim < 0:
                raise ParseError(path, line_no, f"negative dimension {dim}")
            if math.isnan(birth) or math.isnan(death):
                raise ParseError(path, line_no, "NaN coordinate")
            if death < birth:
                raise NegativePersistence(
                    f"{path}:{line_no}: death {death} < birth {birth}"
                )
            pts.append(PersistencePoint(dim, birth, death))
    return PersistenceDiagram(pts)
