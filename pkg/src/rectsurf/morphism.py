"""Immersions and embeddings between surfaces, and the derived predicates.

An immersion is a basepoint-preserving, developing-map-respecting continuous
map; it is unique when it exists and is found by breadth-first continuation
over a common grid refinement of the two surfaces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .geom import RatPoint
from .surface import (
    FACE,
    CellComplex,
    Classification,
    InvalidSurface,
    Surface,
    SurfacePoint,
)


class InvalidSubUnion(Exception):
    """Raised when a claimed sub-union does not embed where required."""


class InvalidProbe(Exception):
    """Raised when a convergence probe is not a valid closed disk."""


@dataclass(frozen=True)
class NoImmersion:
    """Witness for the failure of analytic continuation.

    ``at`` names the already-matched source cell from which continuation was
    attempted, ``crossing`` the adjacent source cell that could not be matched.
    """

    at: str
    crossing: str
    reason: str

    def __bool__(self) -> bool:
        return False


class ImmersionMap:
    """The unique immersion between two surfaces, as a map of grid cells."""

    def __init__(
        self,
        source: Surface,
        target: Surface,
        source_cpx: CellComplex,
        target_cpx: CellComplex,
        cell_map: dict[int, int],
    ):
        self.source = source
        self.target = target
        self.source_cpx = source_cpx
        self.target_cpx = target_cpx
        self.cell_map = cell_map
        faces = [c for c in cell_map if source_cpx.kind[c] == FACE]
        self.injective = len({cell_map[c] for c in faces}) == len(faces)

    def __bool__(self) -> bool:
        return True

    def __repr__(self) -> str:
        inj = "embedding" if self.injective else "immersion"
        return f"<{inj}: {self.source!r} -> {self.target!r}, {len(self.cell_map)} cells>"

    def image_cells(self) -> set[int]:
        return set(self.cell_map.values())

    def grid_class(self, p: SurfacePoint) -> int:
        """Class of p in the refined source complex."""
        cpx = self.source_cpx
        cell = cpx.locate_cell(p.pos)
        native = self.source.complex()
        for r in native.members[p.cls]:
            c = cpx.class_of(r, *cell)
            if c is not None:
                return c
        raise InvalidSurface("point not locatable on the refined grid")

    def map_point(self, p: SurfacePoint) -> SurfacePoint:
        """Image of a source point under the immersion."""
        src = self.grid_class(p)
        t = self.cell_map.get(src)
        if t is None:
            raise InvalidSubUnion("point lies outside the immersed cells")
        tnative = self.target.complex()
        cell = tnative.locate_cell(p.pos)
        for r in self.target_cpx.members[t]:
            c = tnative.class_of(r, *cell)
            if c is not None:
                return SurfacePoint(self.target, c, p.pos)
        raise InvalidSurface("image point not locatable")  # pragma: no cover


def _translation(src: Sequence[Fraction], dst: Sequence[Fraction]) -> dict[int, int]:
    pos = {x: i for i, x in enumerate(dst)}
    return {i: pos[x] for i, x in enumerate(src) if x in pos}


def find_immersion(
    a: Surface,
    b: Surface,
    extra_x: Iterable[Fraction] = (),
    extra_y: Iterable[Fraction] = (),
) -> Union[ImmersionMap, NoImmersion]:
    """The unique immersion a -> b, or a NoImmersion witness.

    Both surfaces are refined to a common grid (plus any extra coordinates,
    which lets immersions built on a shared refinement compose cell-wise);
    continuation then walks the source complex from the basepoint cell.
    """
    a.require_valid()
    b.require_valid()
    a.require_normalized()
    b.require_normalized()
    ax, ay = a.own_coords()
    bx, by = b.own_coords()
    ex, ey = set(extra_x), set(extra_y)
    ca = a.complex(sorted(set(bx) | ex), sorted(set(by) | ey))
    cb = b.complex(sorted(set(ax) | ex), sorted(set(ay) | ey))
    tx = _translation(ca.xs, cb.xs)
    ty = _translation(ca.ys, cb.ys)

    def translate(cell):
        kind, ix, iy = cell
        jx, jy = tx.get(ix), ty.get(iy)
        if jx is None or jy is None:
            return None
        return (kind, jx, jy)

    start_s, start_t = ca.base_class, cb.base_class
    if translate(ca.cell[start_s]) != cb.cell[start_t]:
        return NoImmersion(
            ca.describe(start_s), ca.describe(start_s), "basepoint cells do not match"
        )
    if ca.interiorish(start_s) and not cb.interiorish(start_t):
        return NoImmersion(
            ca.describe(start_s), ca.describe(start_s), "basepoint lands on the boundary"
        )
    mapping = {start_s: start_t}
    queue = [start_s]
    while queue:
        s = queue.pop()
        t = mapping[s]
        for cell, s2 in ca.neighbors(s):
            if not ca.admissible(s2):
                continue
            tcell = translate(cell)
            t2 = cb.class_at(t, *tcell) if tcell is not None else None
            if t2 is None or not cb.admissible(t2):
                return NoImmersion(
                    ca.describe(s), ca.describe(s2), "no matching cell in the target"
                )
            if ca.interiorish(s2) and not cb.interiorish(t2):
                return NoImmersion(
                    ca.describe(s), ca.describe(s2), "interior cell lands on the boundary"
                )
            prev = mapping.get(s2)
            if prev is None:
                mapping[s2] = t2
                queue.append(s2)
            elif prev != t2:
                return NoImmersion(
                    ca.describe(s), ca.describe(s2), "continuation is inconsistent"
                )
    return ImmersionMap(a, b, ca, cb, mapping)


def immerses(a: Surface, b: Surface) -> bool:
    return bool(find_immersion(a, b))


def embeds(a: Surface, b: Surface) -> bool:
    res = find_immersion(a, b)
    return bool(res) and res.injective


def subbasis_membership(kind: str, test_set: Surface, q: Surface) -> bool:
    """Membership in the four subbasis families of the immersive topology.

    kind is one of M_imm, M_emb (closed test sets) and M_not_imm, M_not_emb
    (open test sets).
    """
    if kind in ("M_imm", "M_emb"):
        if test_set.is_open:
            raise ValueError(f"{kind} requires a closed rectangular union")
        return immerses(test_set, q) if kind == "M_imm" else embeds(test_set, q)
    if kind in ("M_not_imm", "M_not_emb"):
        if not test_set.is_open:
            raise ValueError(f"{kind} requires an open rectangular union")
        return not immerses(test_set, q) if kind == "M_not_imm" else not embeds(test_set, q)
    raise ValueError(f"unknown subbasis kind {kind!r}")


def _coords_of(*surfaces: Surface) -> tuple[set[Fraction], set[Fraction]]:
    xs: set[Fraction] = set()
    ys: set[Fraction] = set()
    for s in surfaces:
        sx, sy = s.own_coords()
        xs.update(sx)
        ys.update(sy)
    return xs, ys


def _sub_union_image(
    sub: Surface, ambient: Surface, target: Surface
) -> tuple[ImmersionMap, ImmersionMap]:
    """Embedding sub -> ambient and immersion ambient -> target on one grid."""
    xs, ys = _coords_of(sub, ambient, target)
    e = find_immersion(sub, ambient, xs, ys)
    if not e or not e.injective:
        raise InvalidSubUnion("the claimed sub-union does not embed in its ambient surface")
    i = find_immersion(ambient, target, xs, ys)
    if i and i.source_cpx is not e.target_cpx:  # pragma: no cover
        raise RuntimeError("refinements out of sync")
    return e, i


def bundle_membership_plus(
    K: Surface, U: Surface, target: Surface, q: SurfacePoint
) -> bool:
    """Does the unique immersion of K carry a point of the open U to q?"""
    if not U.is_open:
        raise InvalidSubUnion("U must be an open sub-union of K")
    e, i = _sub_union_image(U, K, target)
    for c in e.cell_map.values():
        if not e.target_cpx.interiorish(c):
            raise InvalidSubUnion("U must lie in the interior of K")
    if not i:
        return False
    image = set()
    for u, kcell in e.cell_map.items():
        if e.source_cpx.admissible(u):
            image.add(i.cell_map[kcell])
    return _grid_class(i.target_cpx, q) in image


def bundle_membership_minus(
    K2: Surface, K1: Surface, target: Surface, q: SurfacePoint
) -> bool:
    """Does K2 immerse with q avoiding the image of the closed K1?"""
    if K1.is_open:
        raise InvalidSubUnion("K1 must be a closed rectangular sub-union")
    e, i = _sub_union_image(K1, K2, target)
    if not i:
        return False
    image = {i.cell_map[kcell] for kcell in e.cell_map.values()}
    return _grid_class(i.target_cpx, q) not in image


def _grid_class(cpx: CellComplex, q: SurfacePoint) -> int:
    cell = cpx.locate_cell(q.pos)
    native = q.surface.complex()
    for r in native.members[q.cls]:
        c = cpx.class_of(r, *cell)
        if c is not None:
            return c
    raise InvalidSurface("point not locatable on the refined grid")


@dataclass(frozen=True)
class ProbeReport:
    probe: int
    immerses_from: Optional[int]  # first index whose whole tail immerses
    a_ok: bool
    still_embeds_at_end: bool
    immerses_limit: Optional[bool]
    b_ok: bool


@dataclass(frozen=True)
class CertificateReport:
    passed: bool
    items: tuple[ProbeReport, ...]
    note: str = (
        "finite-prefix certificate: evidence for convergence, not a proof; "
        "criterion B samples only the supplied probes"
    )

    def __bool__(self) -> bool:
        return self.passed


def convergence_certificate(
    seq: Sequence[Surface], limit: Surface, probes: Sequence[Surface]
) -> CertificateReport:
    """Check the two convergence criteria on a finite prefix of a sequence.

    (A) each closed-disk probe immerses into all but finitely many sampled
    terms; (B) each probe still embedding at the end of the prefix immerses
    into the claimed limit.
    """
    from .surface import classify

    if not seq:
        raise ValueError("empty sequence prefix")
    limit.require_valid()
    limit.require_normalized()
    for s in seq:
        s.require_valid()
        s.require_normalized()
    items = []
    for k, d in enumerate(probes):
        d.require_valid()
        d.require_normalized()
        if d.is_open or not classify(d).is_disk:
            raise InvalidProbe(f"probe {k} is not a closed disk")
        goods = [immerses(d, p) for p in seq]
        if goods[-1]:
            first = len(goods)
            while first > 0 and goods[first - 1]:
                first -= 1
            a_ok, immerses_from = True, first
        else:
            a_ok, immerses_from = False, None
        still = embeds(d, seq[-1])
        if still:
            to_limit = immerses(d, limit)
            b_ok = to_limit
        else:
            to_limit, b_ok = None, True
        items.append(ProbeReport(k, immerses_from, a_ok, still, to_limit, b_ok))
    passed = all(it.a_ok and it.b_ok for it in items)
    return CertificateReport(passed, tuple(items))
