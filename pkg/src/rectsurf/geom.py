"""Exact rational plane primitives: points, rectangles, grid overlays,
rectilinear loops and winding numbers.

Every coordinate is a ``fractions.Fraction``; all predicates are exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction


class PointOnCurve(Exception):
    """Raised when a winding-number query point lies on the curve itself."""


class NegativeWinding(Exception):
    """Raised when a loop region has negative winding number."""


def _rat(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    return Fraction(v)


@dataclass(frozen=True, order=True)
class RatPoint:
    """A point of the plane with exact rational coordinates."""

    x: Fraction
    y: Fraction

    def __init__(self, x, y):
        object.__setattr__(self, "x", _rat(x))
        object.__setattr__(self, "y", _rat(y))

    def __add__(self, other: "RatPoint") -> "RatPoint":
        return RatPoint(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "RatPoint") -> "RatPoint":
        return RatPoint(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "RatPoint":
        return RatPoint(-self.x, -self.y)


ORIGIN = RatPoint(0, 0)


@dataclass(frozen=True, order=True)
class RatRect:
    """A closed axis-aligned rectangle [x_lo, x_hi] x [y_lo, y_hi], nondegenerate."""

    x_lo: Fraction
    x_hi: Fraction
    y_lo: Fraction
    y_hi: Fraction

    def __init__(self, x_lo, x_hi, y_lo, y_hi):
        x_lo, x_hi, y_lo, y_hi = map(_rat, (x_lo, x_hi, y_lo, y_hi))
        if not (x_lo < x_hi and y_lo < y_hi):
            raise ValueError(f"degenerate rectangle [{x_lo},{x_hi}]x[{y_lo},{y_hi}]")
        object.__setattr__(self, "x_lo", x_lo)
        object.__setattr__(self, "x_hi", x_hi)
        object.__setattr__(self, "y_lo", y_lo)
        object.__setattr__(self, "y_hi", y_hi)

    def contains_point(self, p: RatPoint) -> bool:
        return self.x_lo <= p.x <= self.x_hi and self.y_lo <= p.y <= self.y_hi

    def contains_point_interior(self, p: RatPoint) -> bool:
        return self.x_lo < p.x < self.x_hi and self.y_lo < p.y < self.y_hi

    def overlap_bounds(self, other: "RatRect"):
        """Bounds (x_lo, x_hi, y_lo, y_hi) of the closed intersection, or None.

        The bounds may be degenerate (a segment or a point of contact).
        """
        x_lo, x_hi = max(self.x_lo, other.x_lo), min(self.x_hi, other.x_hi)
        y_lo, y_hi = max(self.y_lo, other.y_lo), min(self.y_hi, other.y_hi)
        if x_lo > x_hi or y_lo > y_hi:
            return None
        return (x_lo, x_hi, y_lo, y_hi)

    def overlaps_interior(self, other: "RatRect") -> bool:
        return (
            max(self.x_lo, other.x_lo) < min(self.x_hi, other.x_hi)
            and max(self.y_lo, other.y_lo) < min(self.y_hi, other.y_hi)
        )

    def touches(self, other: "RatRect") -> bool:
        """True when the closed rectangles intersect at all (possibly edge/corner only)."""
        return (
            max(self.x_lo, other.x_lo) <= min(self.x_hi, other.x_hi)
            and max(self.y_lo, other.y_lo) <= min(self.y_hi, other.y_hi)
        )

    def translate(self, v: RatPoint) -> "RatRect":
        return RatRect(self.x_lo + v.x, self.x_hi + v.x, self.y_lo + v.y, self.y_hi + v.y)

    @property
    def area(self) -> Fraction:
        return (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)

    def corners(self) -> tuple[RatPoint, ...]:
        return (
            RatPoint(self.x_lo, self.y_lo),
            RatPoint(self.x_hi, self.y_lo),
            RatPoint(self.x_hi, self.y_hi),
            RatPoint(self.x_lo, self.y_hi),
        )


class RectiLoop:
    """A closed rectilinear curve: cyclic corner list, edges alternating H/V.

    The vertex list may revisit positions (the curve can traverse a segment
    several times); orientation is given by the listing order.
    """

    def __init__(self, vertices: Sequence[RatPoint]):
        verts = [v if isinstance(v, RatPoint) else RatPoint(*v) for v in vertices]
        if len(verts) >= 2 and verts[0] == verts[-1]:
            verts = verts[:-1]
        if len(verts) < 4 or len(verts) % 2 != 0:
            raise ValueError("rectilinear loop needs an even number (>= 4) of corners")
        for a, b in zip(verts, verts[1:] + verts[:1]):
            dx, dy = b.x - a.x, b.y - a.y
            if (dx == 0) == (dy == 0):
                raise ValueError("consecutive corners must differ in exactly one coordinate")
        # alternation: horizontal edges at even positions or odd, consistently
        first_horizontal = verts[1].y == verts[0].y
        cyc = verts + verts[:1]
        for i, (a, b) in enumerate(zip(cyc, cyc[1:])):
            if (b.y == a.y) != (first_horizontal == (i % 2 == 0)):
                raise ValueError("edge directions must alternate horizontal/vertical")
        self.vertices: tuple[RatPoint, ...] = tuple(verts)

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, RectiLoop) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        pts = ", ".join(f"({v.x},{v.y})" for v in self.vertices)
        return f"RectiLoop[{pts}]"

    def edges(self) -> list[tuple[RatPoint, RatPoint]]:
        cyc = list(self.vertices) + [self.vertices[0]]
        return list(zip(cyc, cyc[1:]))

    def reversed(self) -> "RectiLoop":
        return RectiLoop(tuple(reversed(self.vertices)))

    def rotated(self, k: int) -> "RectiLoop":
        n = len(self.vertices)
        k %= n
        return RectiLoop(self.vertices[k:] + self.vertices[:k])

    def translate(self, v: RatPoint) -> "RectiLoop":
        return RectiLoop(tuple(p + v for p in self.vertices))

    def signed_area(self) -> Fraction:
        """Shoelace signed area (positive for counterclockwise loops)."""
        s = Fraction(0)
        for a, b in self.edges():
            s += a.x * b.y - b.x * a.y
        return s / 2

    def point_on_trace(self, p: RatPoint) -> bool:
        for a, b in self.edges():
            if a.x == b.x:
                if p.x == a.x and min(a.y, b.y) <= p.y <= max(a.y, b.y):
                    return True
            else:
                if p.y == a.y and min(a.x, b.x) <= p.x <= max(a.x, b.x):
                    return True
        return False

    def xs(self) -> list[Fraction]:
        return sorted({v.x for v in self.vertices})

    def ys(self) -> list[Fraction]:
        return sorted({v.y for v in self.vertices})


def winding_number(loop: RectiLoop, p: RatPoint) -> int:
    """Signed winding number of the oriented loop about p (exact ray crossing).

    Raises PointOnCurve when p lies on the trace of the loop.
    """
    if loop.point_on_trace(p):
        raise PointOnCurve(f"point ({p.x},{p.y}) lies on the curve")
    w = 0
    for a, b in loop.edges():
        if a.x != b.x:
            continue  # horizontal edges never cross the rightward ray properly
        if a.x <= p.x:
            continue
        if a.y < b.y:  # upward
            if a.y <= p.y < b.y:
                w += 1
        else:  # downward
            if b.y <= p.y < a.y:
                w -= 1
    return w


@dataclass(frozen=True)
class Arrangement:
    """Grid refinement of a rectangle family.

    ``faces`` are the open grid cells covered by at least one input, each with
    the sorted tuple of input indices containing it.  ``edges`` and
    ``vertices`` are the grid cells of lower dimension covered by the union.
    ``adjacency`` maps each interior edge to the pair of faces it separates.
    """

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]
    faces: tuple[tuple[RatRect, tuple[int, ...]], ...]
    edges: tuple[tuple[RatPoint, RatPoint], ...]
    vertices: tuple[RatPoint, ...]
    adjacency: tuple[tuple[int, int, int], ...]  # (edge_index, face_index, face_index)


def overlay(rects: Sequence[RatRect]) -> Arrangement:
    """Full grid refinement of the inputs by all their x- and y-coordinates."""
    if not rects:
        raise ValueError("overlay requires a nonempty rectangle list")
    xs = sorted({c for r in rects for c in (r.x_lo, r.x_hi)})
    ys = sorted({c for r in rects for c in (r.y_lo, r.y_hi)})
    faces: list[tuple[RatRect, tuple[int, ...]]] = []
    face_index: dict[tuple[int, int], int] = {}
    for ix in range(len(xs) - 1):
        for iy in range(len(ys) - 1):
            cell = RatRect(xs[ix], xs[ix + 1], ys[iy], ys[iy + 1])
            owners = tuple(
                i
                for i, r in enumerate(rects)
                if r.x_lo <= cell.x_lo and cell.x_hi <= r.x_hi
                and r.y_lo <= cell.y_lo and cell.y_hi <= r.y_hi
            )
            if owners:
                face_index[(ix, iy)] = len(faces)
                faces.append((cell, owners))

    def covered(seg_a: RatPoint, seg_b: RatPoint) -> bool:
        return any(
            r.x_lo <= min(seg_a.x, seg_b.x) and max(seg_a.x, seg_b.x) <= r.x_hi
            and r.y_lo <= min(seg_a.y, seg_b.y) and max(seg_a.y, seg_b.y) <= r.y_hi
            for r in rects
        )

    edges: list[tuple[RatPoint, RatPoint]] = []
    adjacency: list[tuple[int, int, int]] = []
    for ix in range(len(xs)):
        for iy in range(len(ys) - 1):
            a, b = RatPoint(xs[ix], ys[iy]), RatPoint(xs[ix], ys[iy + 1])
            if covered(a, b):
                ei = len(edges)
                edges.append((a, b))
                left, right = face_index.get((ix - 1, iy)), face_index.get((ix, iy))
                if left is not None and right is not None:
                    adjacency.append((ei, left, right))
    for iy in range(len(ys)):
        for ix in range(len(xs) - 1):
            a, b = RatPoint(xs[ix], ys[iy]), RatPoint(xs[ix + 1], ys[iy])
            if covered(a, b):
                ei = len(edges)
                edges.append((a, b))
                below, above = face_index.get((ix, iy - 1)), face_index.get((ix, iy))
                if below is not None and above is not None:
                    adjacency.append((ei, below, above))
    vertices = [
        RatPoint(x, y)
        for x in xs
        for y in ys
        if any(r.contains_point(RatPoint(x, y)) for r in rects)
    ]
    return Arrangement(tuple(xs), tuple(ys), tuple(faces), tuple(edges), tuple(vertices), tuple(adjacency))


def loop_region_decomposition(loop: RectiLoop) -> list[tuple[RatRect, int]]:
    """Partition the bounded complement of the loop into grid rectangles with
    winding multiplicities.

    Raises NegativeWinding when some region has winding number < 0.
    """
    xs, ys = loop.xs(), loop.ys()
    out: list[tuple[RatRect, int]] = []
    for ix in range(len(xs) - 1):
        for iy in range(len(ys) - 1):
            cell = RatRect(xs[ix], xs[ix + 1], ys[iy], ys[iy + 1])
            center = RatPoint((cell.x_lo + cell.x_hi) / 2, (cell.y_lo + cell.y_hi) / 2)
            w = winding_number(loop, center)
            if w < 0:
                raise NegativeWinding(f"cell about ({center.x},{center.y}) has winding {w}")
            if w > 0:
                out.append((cell, w))
    return out
