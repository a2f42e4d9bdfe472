"""Basepoint changes, embedding radii, ball charts and the affine action.

Embedding radii are exact: the largest open Euclidean ball about a point
embeds iff every straight ray of that length lifts, so the radius equals the
intrinsic distance to the frontier of the surface.  Radii are square roots of
rationals and all comparisons happen on the squares.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .geom import RatPoint, RatRect
from .morphism import InvalidSubUnion, find_immersion
from .surface import (
    FACE,
    HEDGE,
    VEDGE,
    VERT,
    InvalidPoint,
    Surface,
    SurfacePoint,
)


class KTouchesBoundary(Exception):
    """Raised when a compact sub-union touches the boundary of its surface."""


class RadiusTooLarge(Exception):
    """Raised when a requested ball radius exceeds the embedding radius."""


class PreconditionViolated(Exception):
    """Raised when a perturbation lemma hypothesis fails."""


class _InfiniteRadius:
    def __repr__(self) -> str:  # pragma: no cover
        return "Infinite"


#: Sentinel for the embedding radius of the full plane.  Rectangular unions
#: are never the plane, so no operation here ever returns it.
Infinite = _InfiniteRadius()


def _sqrt_exact(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True, order=True)
class ERValue:
    """An exact nonnegative radius, stored by its square."""

    squared: Fraction

    def __post_init__(self):
        if self.squared < 0:
            raise ValueError("negative squared radius")

    @property
    def exact(self) -> Optional[Fraction]:
        """The radius as a rational, when it is one."""
        return _sqrt_exact(self.squared)

    def __float__(self) -> float:
        return math.sqrt(float(self.squared))

    def __str__(self) -> str:
        e = self.exact
        return str(e) if e is not None else f"sqrt({self.squared})"

    def leq_rational(self, r: Fraction) -> bool:
        return r >= 0 and self.squared <= r * r

    def geq_rational(self, r: Fraction) -> bool:
        return r < 0 or self.squared >= r * r


def dist_sq(p: RatPoint, q: RatPoint) -> Fraction:
    return (p.x - q.x) ** 2 + (p.y - q.y) ** 2


def surd_diff_leq(a_sq: Fraction, b_sq: Fraction, c_sq: Fraction) -> bool:
    """Exact test of |sqrt(a_sq) - sqrt(b_sq)| <= sqrt(c_sq)."""
    lhs = a_sq + b_sq - c_sq
    if lhs <= 0:
        return True
    return lhs * lhs <= 4 * a_sq * b_sq


class TranslationMap:
    """The basepoint-changing isomorphism: a cell-level translation."""

    def __init__(self, source: Surface, target: Surface, offset: RatPoint):
        self.source = source
        self.target = target
        self.offset = offset  # dev(target point) = dev(source point) - offset
        self.injective = True

    def map_point(self, p: SurfacePoint) -> SurfacePoint:
        pos = p.pos - self.offset
        cpx = self.target.complex()
        cell = cpx.locate_cell(pos)
        for r in self.source.complex().members[p.cls]:
            c = cpx.class_of(r, *cell)
            if c is not None:
                return SurfacePoint(self.target, c, pos)
        raise InvalidPoint("point not found after translation")  # pragma: no cover

    def inverse(self) -> "TranslationMap":
        return TranslationMap(self.target, self.source, -self.offset)


def rebase(s: Surface, p: SurfacePoint) -> tuple[Surface, TranslationMap]:
    """The surface with basepoint moved to p, plus the translation isomorphism."""
    s.require_valid()
    if p.surface != s:
        raise InvalidPoint("point does not belong to this surface")
    v = p.pos
    rect = min(s.complex().members[p.cls])
    moved = Surface(
        [r.translate(-v) for r in s.rects],
        s.glue,
        (rect, RatPoint(0, 0)),
        s.is_open,
    )
    return moved, TranslationMap(s, moved, v)


def _frontier_positions(cpx) -> list[tuple[int, RatPoint]]:
    """Vertex positions of frontier cells plus frontier-edge data for feet."""
    verts = []
    edges = []
    for c in range(cpx.n_classes):
        if cpx.interiorish(c):
            continue
        kind, ix, iy = cpx.cell[c]
        if kind == VERT:
            verts.append(RatPoint(cpx.xs[ix], cpx.ys[iy]))
        elif kind == VEDGE:
            edges.append(("v", cpx.xs[ix], cpx.ys[iy], cpx.ys[iy + 1]))
        elif kind == HEDGE:
            edges.append(("h", cpx.ys[iy], cpx.xs[ix], cpx.xs[ix + 1]))
    return verts, edges


def embedding_radius(s: Surface, p: SurfacePoint) -> Union[ERValue, _InfiniteRadius]:
    """Largest r with the open Euclidean r-ball embedding about p.

    Equals the intrinsic distance from p to the frontier: the nearest frontier
    point is reached by a straight segment, and every shorter ball lifts ray
    by ray (ball charts are automatically injective since their developing map
    is).  Computed by walking straight segments to candidate frontier
    positions in order of distance; the first clean frontier hit is exact.
    """
    s.require_valid()
    if p.surface != s:
        raise InvalidPoint("point does not belong to this surface")
    cpx = s.complex()
    if not cpx.interiorish(p.cls):
        raise InvalidPoint("embedding radius requires an interior point")
    verts, edges = _frontier_positions(cpx)
    targets: set[RatPoint] = set(verts)
    for kind, c0, lo, hi in edges:
        if kind == "v" and lo < p.pos.y < hi:
            targets.add(RatPoint(c0, p.pos.y))
        elif kind == "h" and lo < p.pos.x < hi:
            targets.add(RatPoint(p.pos.x, c0))
    order = sorted(targets, key=lambda t: (dist_sq(p.pos, t), t.x, t.y))
    for t in order:
        if t == p.pos:
            continue
        res = cpx.lift(p.cls, p.pos, t - p.pos)
        if res is not None and not cpx.interiorish(res[0]):
            return ERValue(dist_sq(p.pos, t))
    raise InvalidPoint("no frontier is visible: is this the plane?")  # pragma: no cover


def _image_point(imm, pos: RatPoint, src_grid_cls: int) -> SurfacePoint:
    t = imm.cell_map[src_grid_cls]
    tnative = imm.target.complex()
    cell = tnative.locate_cell(pos)
    for r in imm.target_cpx.members[t]:
        c = tnative.class_of(r, *cell)
        if c is not None:
            return SurfacePoint(imm.target, c, pos)
    raise InvalidPoint("image point not locatable")  # pragma: no cover


def min_embedding_radius(s: Surface, k: Surface) -> ERValue:
    """Exact minimum of the embedding radius over a closed sub-union k of s.

    The minimum is attained at a vertex of the joint refinement, since every
    frontier feature of s sits on grid lines of the joint grid.
    """
    s.require_valid()
    k.require_valid()
    if k.is_open:
        raise InvalidSubUnion("k must be a closed sub-union")
    e = find_immersion(k, s)
    if not e or not e.injective:
        raise InvalidSubUnion("k does not embed in s")
    tgt = e.target_cpx
    for c in e.cell_map.values():
        if not tgt.interiorish(c):
            raise KTouchesBoundary("k touches the boundary of s")
    best: Optional[ERValue] = None
    src = e.source_cpx
    for c in range(src.n_classes):
        if src.cell[c][0] != VERT or not src.admissible(c):
            continue
        pos = src.vertex_position(c)
        q = _image_point(e, pos, c)
        er = embedding_radius(s, q)
        if best is None or er < best:
            best = er
    assert best is not None
    return best


@dataclass(frozen=True)
class BallChart:
    """An embedded metric ball: center, radius, and the cells it meets."""

    surface: Surface
    center: SurfacePoint
    radius: Fraction
    cells: tuple[int, ...]

    def locate(self, w: RatPoint) -> SurfacePoint:
        """The surface point at ball coordinate w (|w| < radius)."""
        if dist_sq(w, RatPoint(0, 0)) >= self.radius * self.radius:
            raise RadiusTooLarge("coordinate outside the open ball")
        cpx = self.surface.complex()
        res = cpx.lift(self.center.cls, self.center.pos, w)
        if res is None:  # pragma: no cover
            raise InvalidPoint("ball coordinate fails to lift")
        return SurfacePoint(self.surface, res[0], res[1])


def _inward_probe(cpx, c: int, base: RatPoint, d2_bound: Fraction) -> Optional[RatPoint]:
    """A point of the open cell c within sqrt(d2_bound) of base, if one exists."""
    x0, x1, y0, y1 = cpx.footprint(c)
    kind = cpx.cell[c][0]
    clamp = RatPoint(min(max(base.x, x0), x1), min(max(base.y, y0), y1))
    if dist_sq(base, clamp) >= d2_bound:
        return None
    if kind == VERT:
        return clamp
    mid = RatPoint((x0 + x1) / 2, (y0 + y1) / 2)
    probe = clamp
    for _ in range(64):
        inside = (
            (kind == FACE and x0 < probe.x < x1 and y0 < probe.y < y1)
            or (kind == VEDGE and y0 < probe.y < y1)
            or (kind == HEDGE and x0 < probe.x < x1)
        )
        if inside and dist_sq(base, probe) < d2_bound:
            return probe
        probe = RatPoint((probe.x + mid.x) / 2, (probe.y + mid.y) / 2)
    return None  # pragma: no cover


def ball_embed(s: Surface, p: SurfacePoint, r: Fraction) -> BallChart:
    """The chart of the open r-ball about p (requires r <= embedding radius)."""
    r = Fraction(r)
    er = embedding_radius(s, p)
    if isinstance(er, ERValue) and not er.geq_rational(r):
        raise RadiusTooLarge(f"radius {r} exceeds the embedding radius {er}")
    cpx = s.complex()
    r2 = r * r
    cells = {p.cls}
    for c in range(cpx.n_classes):
        if not cpx.interiorish(c) or c == p.cls:
            continue
        probe = _inward_probe(cpx, c, p.pos, r2)
        if probe is None:
            continue
        res = cpx.lift(p.cls, p.pos, probe - p.pos)
        if res is not None and res[0] == c:
            cells.add(c)
    return BallChart(s, p, r, tuple(sorted(cells)))


def perturb_embed_check(s: Surface, k: Surface, p: SurfacePoint) -> bool:
    """Check the perturbation construction: k embeds into s rebased at p.

    Requires d(basepoint, p) < min embedding radius over k.  The embedding is
    built by sliding every point of k along the straight segment dev(p) and
    compared against the unique immersion; the result should always be True.
    """
    s.require_valid()
    s.require_normalized()
    k.require_normalized()
    eps = min_embedding_radius(s, k)
    v = p.pos
    if not ERValue(dist_sq(RatPoint(0, 0), v)) < eps:
        raise PreconditionViolated("p is not closer to the basepoint than ER(k)")
    o = s.basepoint()
    cpx = s.complex()
    reached = cpx.lift(o.cls, o.pos, v)
    if reached is None or reached[0] != p.cls or reached[1] != p.pos:
        raise PreconditionViolated("p is not in the exponential ball about the basepoint")
    moved, beta = rebase(s, p)
    imm = find_immersion(k, moved)
    if not imm or not imm.injective:
        return False
    kcpx = imm.source_cpx
    e_k = find_immersion(k, s)
    if not e_k:
        return False
    for c in range(kcpx.n_classes):
        if kcpx.cell[c][0] != FACE or not kcpx.admissible(c):
            continue
        x0, x1, y0, y1 = kcpx.footprint(c)
        x = SurfacePoint(k, _native_cls(k, c, kcpx), RatPoint((x0 + x1) / 2, (y0 + y1) / 2))
        y = e_k.map_point(x)
        res = s.complex().lift(y.cls, y.pos, v)
        if res is None:
            return False
        slid = beta.map_point(SurfacePoint(s, res[0], res[1]))
        direct = imm.map_point(x)
        if slid.cls != direct.cls or slid.pos != direct.pos:
            return False
    return True


def _native_cls(s: Surface, grid_cls: int, grid_cpx) -> int:
    native = s.complex()
    kind, ix, iy = grid_cpx.cell[grid_cls]
    x0, x1, y0, y1 = grid_cpx.footprint(grid_cls)
    pos = RatPoint((x0 + x1) / 2, (y0 + y1) / 2)
    cell = native.locate_cell(pos)
    for r in grid_cpx.members[grid_cls]:
        c = native.class_of(r, *cell)
        if c is not None:
            return c
    raise InvalidPoint("cell not locatable on the native grid")  # pragma: no cover


@dataclass(frozen=True)
class AxisAffine:
    """A signed permutation of the axes composed with positive rational scaling.

    The matrix ((a, b), (c, d)) has exactly one nonzero entry per row and
    column; this is the largest affine group preserving axis-aligned rational
    rectangles.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        ok = ((self.a != 0) != (self.b != 0)) and ((self.c != 0) != (self.d != 0)) and (
            (self.a != 0) != (self.c != 0)
        )
        if not ok:
            raise ValueError("matrix must be a signed permutation times a diagonal")

    @classmethod
    def identity(cls) -> "AxisAffine":
        return cls(Fraction(1), Fraction(0), Fraction(0), Fraction(1))

    @classmethod
    def diagonal(cls, dx, dy) -> "AxisAffine":
        return cls(Fraction(dx), Fraction(0), Fraction(0), Fraction(dy))

    @classmethod
    def from_matrix(cls, a, b, c, d) -> "AxisAffine":
        return cls(Fraction(a), Fraction(b), Fraction(c), Fraction(d))

    @classmethod
    def signed_permutations(cls) -> list["AxisAffine"]:
        out = []
        for s1 in (1, -1):
            for s2 in (1, -1):
                out.append(cls(Fraction(s1), Fraction(0), Fraction(0), Fraction(s2)))
                out.append(cls(Fraction(0), Fraction(s1), Fraction(s2), Fraction(0)))
        return out

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def orientation_reversing(self) -> bool:
        return self.det < 0

    def compose(self, other: "AxisAffine") -> "AxisAffine":
        return AxisAffine(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "AxisAffine":
        det = self.det
        return AxisAffine(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def apply(self, p: RatPoint) -> RatPoint:
        return RatPoint(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)

    def apply_rect(self, r: RatRect) -> RatRect:
        p = self.apply(RatPoint(r.x_lo, r.y_lo))
        q = self.apply(RatPoint(r.x_hi, r.y_hi))
        return RatRect(min(p.x, q.x), max(p.x, q.x), min(p.y, q.y), max(p.y, q.y))


def act(h: AxisAffine, s: Surface) -> Surface:
    """The affine action on surfaces; gluing combinatorics are unchanged."""
    return Surface(
        [h.apply_rect(r) for r in s.rects],
        s.glue,
        (s.base[0], h.apply(s.base[1])),
        s.is_open,
    )


def act_pointed(h: AxisAffine, s: Surface, p: SurfacePoint) -> tuple[Surface, SurfacePoint]:
    out = act(h, s)
    pos = h.apply(p.pos)
    cpx = out.complex()
    cell = cpx.locate_cell(pos)
    for r in s.complex().members[p.cls]:
        c = cpx.class_of(r, *cell)
        if c is not None:
            return out, SurfacePoint(out, c, pos)
    raise InvalidPoint("point lost under the action")  # pragma: no cover
