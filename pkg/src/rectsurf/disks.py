"""Disk-centric constructions: assembling disks bounded by rectilinear loops,
hole filling, immersed-image enumeration, nested unions, and the countable
stream of rational rectangular-union classes.
"""
from __future__ import annotations

import itertools
from bisect import bisect_left
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .geom import (
    NegativeWinding,
    RatPoint,
    RatRect,
    RectiLoop,
    loop_region_decomposition,
)
from .lattice import fuse
from .morphism import InvalidSubUnion, find_immersion, immerses
from .present import (
    Quotient,
    closure_complete,
    link_components,
    present,
    quotient_connected,
    sub_quotient,
    vertex_links_connected,
)
from .surface import (
    FACE,
    HEDGE,
    VEDGE,
    VERT,
    InvalidSurface,
    Surface,
    SurfacePoint,
    classify,
    isomorphic,
)
from .transform import rebase

# edge sides and vertex corners of a face copy, in local slot order
_W, _E, _S, _N = 0, 1, 2, 3
_SW, _SE, _NW, _NE = 0, 1, 2, 3


class NotContainedInS(Exception):
    """Raised when a filling does not fit inside the ambient surface."""


def _loop_unit_seq(loop: RectiLoop, xs: Sequence[Fraction], ys: Sequence[Fraction]):
    """The loop as a cyclic list of directed unit grid edges (axis, ix, iy, sign)."""
    seq = []
    for a, b in loop.edges():
        if a.x == b.x:
            ix = bisect_left(xs, a.x)
            ia, ib = bisect_left(ys, a.y), bisect_left(ys, b.y)
            if b.y > a.y:
                seq.extend(("v", ix, iy, 1) for iy in range(ia, ib))
            else:
                seq.extend(("v", ix, iy, -1) for iy in range(ib, ia)[::-1])
        else:
            iy = bisect_left(ys, a.y)
            ia, ib = bisect_left(xs, a.x), bisect_left(xs, b.x)
            if b.x > a.x:
                seq.extend(("h", ix, iy, 1) for ix in range(ia, ib))
            else:
                seq.extend(("h", ix, iy, -1) for ix in range(ib, ia)[::-1])
    return seq


def _boundary_unit_seq(s: Surface, xs, ys):
    """Boundary cycles of a closed surface as unit sequences on the given grid,
    with the owning edge class and start position of every unit step."""
    cpx = s.complex()
    out = []
    for cyc in cpx.boundary_cycles():
        seq = []
        info = []
        for e, d, v, w in cyc:
            x0, x1, y0, y1 = cpx.footprint(e)
            if d in ("N", "S"):
                ix = bisect_left(xs, x0)
                ia, ib = bisect_left(ys, y0), bisect_left(ys, y1)
                rng = range(ia, ib) if d == "N" else range(ib - 1, ia - 1, -1)
                for iy in rng:
                    seq.append(("v", ix, iy, 1 if d == "N" else -1))
                    start_iy = iy if d == "N" else iy + 1
                    info.append((e, RatPoint(xs[ix], ys[start_iy])))
            else:
                iy = bisect_left(ys, y0)
                ia, ib = bisect_left(xs, x0), bisect_left(xs, x1)
                rng = range(ia, ib) if d == "E" else range(ib - 1, ia - 1, -1)
                for ix in rng:
                    seq.append(("h", ix, iy, 1 if d == "E" else -1))
                    start_ix = ix if d == "E" else ix + 1
                    info.append((e, RatPoint(xs[start_ix], ys[iy])))
        out.append((seq, info))
    return out


def _cyclic_matches(seq: list, target: list) -> list[int]:
    """Rotations r with seq[r:] + seq[:r] == target."""
    if len(seq) != len(target):
        return []
    doubled = seq + seq
    return [r for r in range(len(seq)) if doubled[r : r + len(seq)] == target]


def _assembly_quotient(
    xs, ys, sheets: dict[tuple[int, int], int], pairings
) -> Optional[Quotient]:
    """Quotient of face copies glued along the chosen edge pairings.

    ``pairings`` lists (axis, ix, iy, left_sheet, right_sheet) identifications
    across interior grid edges.  Returns None when the gluing forces two
    sheets through one slot (a non-manifold assembly).
    """
    faces = sorted((ix, iy, s) for (ix, iy), w in sheets.items() for s in range(w))
    fid = {f: i for i, f in enumerate(faces)}
    nf = len(faces)
    parent = list(range(8 * nf))  # edge slots then vertex slots

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    def eslot(f, side):
        return 4 * fid[f] + side

    def vslot(f, corner):
        return 4 * nf + 4 * fid[f] + corner

    for axis, ix, iy, ls, rs in pairings:
        if axis == "v":
            L, R = (ix - 1, iy, ls), (ix, iy, rs)
            union(eslot(L, _E), eslot(R, _W))
            union(vslot(L, _SE), vslot(R, _SW))
            union(vslot(L, _NE), vslot(R, _NW))
        else:
            D, U = (ix, iy - 1, ls), (ix, iy, rs)
            union(eslot(D, _N), eslot(U, _S))
            union(vslot(D, _NW), vslot(U, _SW))
            union(vslot(D, _NE), vslot(U, _SE))

    ecell = {
        _W: lambda ix, iy: (VEDGE, ix, iy),
        _E: lambda ix, iy: (VEDGE, ix + 1, iy),
        _S: lambda ix, iy: (HEDGE, ix, iy),
        _N: lambda ix, iy: (HEDGE, ix, iy + 1),
    }
    vcell = {
        _SW: lambda ix, iy: (VERT, ix, iy),
        _SE: lambda ix, iy: (VERT, ix + 1, iy),
        _NW: lambda ix, iy: (VERT, ix, iy + 1),
        _NE: lambda ix, iy: (VERT, ix + 1, iy + 1),
    }
    nodes: list[tuple[int, int, int]] = [(FACE, ix, iy) for (ix, iy, _s) in faces]
    node_of_root: dict[int, int] = {}
    for f in faces:
        for side in range(4):
            root = find(eslot(f, side))
            if root not in node_of_root:
                node_of_root[root] = len(nodes)
                nodes.append(ecell[side](f[0], f[1]))
        for corner in range(4):
            root = find(vslot(f, corner))
            if root not in node_of_root:
                node_of_root[root] = len(nodes)
                nodes.append(vcell[corner](f[0], f[1]))
    nbrs: list[dict] = [dict() for _ in nodes]

    def add(a: int, b: int) -> bool:
        cb = nodes[b]
        prev = nbrs[a].get(cb)
        if prev is not None and prev != b:
            return False
        nbrs[a][cb] = b
        ca = nodes[a]
        prev = nbrs[b].get(ca)
        if prev is not None and prev != a:
            return False
        nbrs[b][ca] = a
        return True

    edge_corners = {_W: (_SW, _NW), _E: (_SE, _NE), _S: (_SW, _SE), _N: (_NW, _NE)}
    for f in faces:
        fi = fid[f]
        for side in range(4):
            en = node_of_root[find(eslot(f, side))]
            if not add(fi, en):
                return None
            for corner in edge_corners[side]:
                vn = node_of_root[find(vslot(f, corner))]
                if not add(fi, vn) or not add(en, vn):
                    return None
    return Quotient(tuple(xs), tuple(ys), nodes, nbrs, 0)


def _pairing_choices(slots, sheets):
    """DFS over per-edge partial matchings with first-occurrence canonicalization.

    Sheets of one cell are interchangeable until first used, so a sheet index
    may only be used if all smaller indices of its cell are already touched.
    This collapses the per-cell relabeling symmetry of the search.
    """
    touched = {cell: 0 for cell in sheets}  # number of sheets already used

    def allowed(cell):
        w = sheets[cell]
        t = touched[cell]
        return range(min(t + 1, w))

    def slot_matchings(si, chosen):
        if si == len(slots):
            yield list(chosen)
            return
        axis, jx, jy, lcell, rcell, k = slots[si]

        def pick(pairs, used_l, used_r, min_l):
            if len(pairs) == k:
                yield from slot_matchings(si + 1, chosen + pairs)
                return
            for l in allowed(lcell):
                if l in used_l or l < min_l:
                    continue
                tl = touched[lcell]
                touched[lcell] = max(tl, l + 1)
                for r in allowed(rcell):
                    if r in used_r:
                        continue
                    tr = touched[rcell]
                    touched[rcell] = max(tr, r + 1)
                    yield from pick(
                        pairs + [(axis, jx, jy, l, r)], used_l | {l}, used_r | {r}, l + 1
                    )
                    touched[rcell] = tr
                touched[lcell] = tl

        yield from pick([], set(), set(), 0)

    yield from slot_matchings(0, [])


def _try_assembly(loop, xs, ys, sheets, pairings, gamma_seq) -> Optional[tuple[Surface, list]]:
    q = _assembly_quotient(xs, ys, sheets, pairings)
    if q is None or not quotient_connected(q) or not vertex_links_connected(q):
        return None
    # temporary basepoint: center of the first face
    x0, x1, y0, y1 = q.footprint(0)
    surf, _ = present(q, RatPoint((x0 + x1) / 2, (y0 + y1) / 2))
    if not surf.is_valid or not classify(surf).is_disk:
        return None
    cycles = _boundary_unit_seq(surf, xs, ys)
    if len(cycles) != 1:
        return None
    seq, info = cycles[0]
    rots = _cyclic_matches(seq, gamma_seq)
    if not rots:
        return None
    cpx = surf.complex()
    anchors = []
    for r in sorted(rots):
        e, pos = info[r]
        anchors.append((min(cpx.members[e]), pos))
    rect, pos = anchors[0]
    anchored = Surface(surf.rects, surf.glue, (rect, pos), surf.is_open)
    return anchored, anchors


def disks_bounded_by(loop: RectiLoop) -> list[Surface]:
    """All isomorphism classes of immersed disks whose boundary develops to loop.

    Face multiplicities are forced by winding numbers and the number of
    interior pairings per grid edge is forced by the loop's traversal counts;
    the choices are which sheets pair up.  Returned disks are anchored at a
    boundary vertex matching the loop's start and are not normalized.
    """
    try:
        decomp = loop_region_decomposition(loop)
    except NegativeWinding:
        return []
    if not decomp:
        return []
    xs, ys = loop.xs(), loop.ys()
    xi = {x: i for i, x in enumerate(xs)}
    yi = {y: i for i, y in enumerate(ys)}
    sheets: dict[tuple[int, int], int] = {}
    for rect, w in decomp:
        sheets[(xi[rect.x_lo], yi[rect.y_lo])] = w
    gamma_seq = _loop_unit_seq(loop, xs, ys)
    traversals: dict[tuple, int] = {}
    for axis, ix, iy, _sign in gamma_seq:
        traversals[(axis, ix, iy)] = traversals.get((axis, ix, iy), 0) + 1

    slots = []
    for (ix, iy), w in sorted(sheets.items()):
        for axis, jx, jy, lcell, rcell in (
            ("v", ix + 1, iy, (ix, iy), (ix + 1, iy)),
            ("h", ix, iy + 1, (ix, iy), (ix, iy + 1)),
        ):
            wl, wr = w, sheets.get(rcell, 0)
            t = traversals.get((axis, jx, jy), 0)
            k2 = wl + wr - t
            if k2 < 0 or k2 % 2:
                return []
            k = k2 // 2
            if k > min(wl, wr):
                return []
            if k:
                slots.append((axis, jx, jy, lcell, rcell, k))
    # isolated traversed edges outside the decomposition bound nothing
    for (axis, ix, iy), t in traversals.items():
        if axis == "v":
            wl = sheets.get((ix - 1, iy), 0)
            wr = sheets.get((ix, iy), 0)
        else:
            wl = sheets.get((ix, iy - 1), 0)
            wr = sheets.get((ix, iy), 0)
        if wl + wr - t < 0 or (wl + wr - t) % 2:
            return []

    found: list[tuple[Surface, list]] = []
    for pairings in _pairing_choices(slots, sheets):
        res = _try_assembly(loop, xs, ys, sheets, pairings, gamma_seq)
        if res is None:
            continue
        surf, anchors = res
        if not any(_same_anchored_disk(surf, anchors, prev) for prev, _ in found):
            found.append((surf, anchors))
    return [s for s, _ in found]


def _same_anchored_disk(a: Surface, a_anchors, b: Surface) -> bool:
    """Translation-isomorphism of boundary-anchored disks: some anchor matches."""
    bn = b.normalize()
    for rect, pos in a_anchors:
        cand = Surface(a.rects, a.glue, (rect, pos), a.is_open).normalize()
        if immerses(cand, bn) and immerses(bn, cand):
            return True
    return False


def _fill_components(cpx, inside: set[int]) -> list[set[int]]:
    """Components of the complement of `inside`, by full cell incidence."""
    comp = []
    seen: set[int] = set()
    for c in range(cpx.n_classes):
        if c in inside or c in seen or not cpx.admissible(c):
            continue
        stack = [c]
        seen.add(c)
        cells = {c}
        while stack:
            u = stack.pop()
            for _, n in cpx.neighbors(u):
                if cpx.admissible(n) and n not in inside and n not in seen:
                    seen.add(n)
                    cells.add(n)
                    stack.append(n)
        comp.append(cells)
    return comp


def smallest_closed_disk(s: Surface, k: Surface) -> Surface:
    """The smallest closed disk of s containing the sub-union k.

    Fills every complementary component of k's image that stays away from the
    boundary of s; raises NotContainedInS when the result is not a disk.
    """
    s.require_valid()
    k.require_valid()
    if k.is_open or s.is_open:
        raise InvalidSubUnion("smallest_closed_disk operates on closed unions")
    e = find_immersion(k, s)
    if not e or not e.injective:
        raise InvalidSubUnion("k does not embed in s")
    tgt = e.target_cpx
    inside = set(e.cell_map.values())
    for comp in _fill_components(tgt, inside):
        if all(tgt.is_manifold_interior[c] for c in comp):
            inside |= comp
    q = sub_quotient(tgt, inside, tgt.base_class)
    out, _ = present(q, RatPoint(0, 0))
    if not out.is_valid or not classify(out).is_disk:
        raise NotContainedInS("the filled region is not a disk inside s")
    return out


def smallest_open_disk(s: Surface, u: Surface) -> Surface:
    """The open union u plus all compact complementary components inside s."""
    s.require_valid()
    u.require_valid()
    if not u.is_open:
        raise InvalidSubUnion("u must be an open sub-union")
    e = find_immersion(u, s)
    if not e or not e.injective:
        raise InvalidSubUnion("u does not embed in s")
    tgt = e.target_cpx
    inside = set(e.cell_map.values())
    for comp in _fill_components(tgt, inside):
        if all(tgt.is_manifold_interior[c] for c in comp):
            inside |= comp
    q = sub_quotient(tgt, inside, tgt.base_class)
    out, _ = present(q, RatPoint(0, 0), is_open=True)
    if not out.is_valid:  # pragma: no cover
        raise RuntimeError("open filling produced an invalid surface")
    return out


def _complex_ok_surface(s: Surface) -> Optional[Surface]:
    """Re-present a gluing whose complex is a legal surface, else None.

    Accepts gluing data with degenerate (edge or corner) contact pairs, which
    the Surface type itself does not allow.
    """
    cpx = s.complex()
    if cpx._problems_local:
        return None
    cells = [c for c in range(cpx.n_classes) if cpx.admissible(c)]
    if not cells or cpx.base_class is None:
        return None
    if s.is_open and not cpx.is_active[cpx.base_class]:
        return None
    if not cpx.connected(cells):
        return None
    q = sub_quotient(cpx, cells, cpx.base_class)
    out, _ = present(q, s.base[1], s.is_open)
    return out if out.is_valid else None


def immersed_images(k: Surface) -> list[Surface]:
    """All immersion images of k up to isomorphism.

    Enumerates gluing supergraphs over contact pairs (including edge and
    corner contacts, which identify just the shared boundary) and keeps the
    quotients that are legal surfaces.
    """
    k.require_valid()
    k.require_normalized()
    n = len(k.rects)
    existing = set(k.glue)
    if k.is_open:
        contact = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if (i, j) not in existing and k.rects[i].overlaps_interior(k.rects[j])
        ]
    else:
        contact = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if (i, j) not in existing and k.rects[i].touches(k.rects[j])
        ]
    out: list[Surface] = []
    for bits in range(1 << len(contact)):
        extra = [contact[t] for t in range(len(contact)) if bits >> t & 1]
        cand = Surface(k.rects, list(k.glue) + extra, k.base, k.is_open)
        surf = _complex_ok_surface(cand)
        if surf is None:
            continue
        surf = surf.normalize()
        if not any(isomorphic(surf, prev) for prev in out):
            out.append(surf)
    return out


def smallest_open_disks_of_embeddings(u: Surface) -> list[Surface]:
    """Smallest open disks of embedded images of u, up to isomorphism.

    Every such disk is a fusion of u with an open disk bounded by u's outer
    boundary curve; the list is complete but may contain extra legal disks.
    """
    u.require_valid()
    u.require_normalized()
    if not u.is_open:
        raise InvalidSubUnion("the input must be an open union")
    cls = classify(u)
    if cls.kind not in ("disk", "punctured_disk"):
        raise InvalidSurface("input must be a disk or punctured disk")
    closed = Surface(u.rects, u.glue, u.base, is_open=False)
    closed.require_valid()
    cpx = closed.complex()
    outer = None
    for cyc in cpx.boundary_cycles():
        turning = _cycle_turning(cyc)
        if turning == 4:
            outer = cyc
            break
    if outer is None:  # pragma: no cover
        raise RuntimeError("no outer boundary cycle found")
    loop = _cycle_to_loop(cpx, outer)
    out: list[Surface] = []
    for v in disks_bounded_by(loop):
        vc = v.complex()
        anchor_cells = sorted(
            c
            for c in range(vc.n_classes)
            if vc.interiorish(c) and _cell_contains(vc, c, RatPoint(0, 0))
        )
        for c in anchor_cells:
            vd = Surface(v.rects, v.glue, (min(vc.members[c]), RatPoint(0, 0)), is_open=True)
            if not vd.is_valid:
                continue
            try:
                w = fuse([u, vd]).surface
            except (ValueError, InvalidSurface):
                continue
            if classify(w).is_disk and not any(isomorphic(w, p) for p in out):
                out.append(w)
    return out


def _cell_contains(cpx, c: int, p: RatPoint) -> bool:
    x0, x1, y0, y1 = cpx.footprint(c)
    return x0 <= p.x <= x1 and y0 <= p.y <= y1


def _cycle_turning(cyc) -> int:
    """Total turning of a boundary cycle in quarter turns (+4 outer, -4 holes)."""
    left = {"N": "W", "W": "S", "S": "E", "E": "N"}
    turn = 0
    dirs = [d for _, d, _, _ in cyc]
    for a, b in zip(dirs, dirs[1:] + dirs[:1]):
        if b == left[a]:
            turn += 1
        elif a == left[b]:
            turn -= 1
        elif a != b:  # pragma: no cover
            raise RuntimeError("boundary reverses direction")
    return turn


def _cycle_to_loop(cpx, cyc) -> RectiLoop:
    corners = []
    dirs = [d for _, d, _, _ in cyc]
    k = next((i for i in range(len(cyc)) if dirs[i] != dirs[i - 1]), 0)
    cyc = cyc[k:] + cyc[:k]
    prev = None
    for e, d, v, w in cyc:
        if d != prev:
            corners.append(cpx.vertex_position(v))
            prev = d
    return RectiLoop(corners)


def nested_rational_union(
    k1: Surface, k3: Surface, witness=None
) -> Surface:
    """A closed rational union strictly between k1 and the interior of k3.

    Built by covering k1's image with half-grid cells of k3, repairing corner
    contacts, and (when k3 is a disk) filling holes so the result is a disk.
    """
    k1.require_valid()
    k3.require_valid()
    if k1.is_open or k3.is_open:
        raise InvalidSubUnion("nested unions are built from closed inputs")
    if witness is not None and (witness.source != k1 or witness.target != k3):
        raise InvalidSubUnion("witness does not relate k1 and k3")
    xs0, ys0 = k3.own_coords()
    mx, my = list(xs0), list(ys0)
    for _ in range(8):
        mx = sorted(set(mx) | set(_midpoints(mx)))
        my = sorted(set(my) | set(_midpoints(my)))
        e = find_immersion(k1, k3, mx, my)
        if not e or not e.injective:
            raise InvalidSubUnion("k1 does not embed in k3")
        tgt = e.target_cpx
        image = set(e.cell_map.values())
        if any(not tgt.interiorish(c) for c in image):
            raise InvalidSubUnion("k1 does not lie in the interior of k3")
        faces = set()
        for f in range(tgt.n_classes):
            if tgt.kind[f] != FACE:
                continue
            if f in image or any(n in image for _, n in tgt.neighbors(f)):
                faces.add(f)
        cells = closure_complete(tgt, faces)
        # the expansion layer must stay clear of the boundary of k3;
        # otherwise bisect the grid further and retry
        if any(not tgt.interiorish(c) for c in cells):
            continue
        # repair corner-only contacts by adding all quadrant faces there
        for _round in range(tgt.n_classes):
            bad = None
            for v in sorted(cells):
                if tgt.kind[v] != VERT:
                    continue
                nv = {cell: n for cell, n in tgt.neighbors(v) if n in cells}
                if len(link_components(nv, tgt.cell[v])) > 1:
                    bad = v
                    break
            if bad is None:
                break
            for cell, n in tgt.neighbors(bad):
                if tgt.kind[n] == FACE:
                    faces.add(n)
            cells = closure_complete(tgt, faces)
        q = sub_quotient(tgt, cells, tgt.base_class)
        out, _ = present(q, RatPoint(0, 0))
        if not out.is_valid:  # pragma: no cover
            raise RuntimeError("nested union construction failed")
        if classify(k3).is_disk and not classify(out).is_disk:
            out = smallest_closed_disk(k3, out)
        return out
    raise RuntimeError("refinement limit reached")  # pragma: no cover


def _midpoints(coords) -> list[Fraction]:
    return [(a + b) / 2 for a, b in zip(coords, coords[1:])]


def _coord_pool(denom_bound: int, window: int) -> list[Fraction]:
    vals = set()
    for qd in range(1, denom_bound + 1):
        for num in range(-window * qd, window * qd + 1):
            vals.add(Fraction(num, qd))
    return sorted(vals)


def enumerate_subbasis(max_rects: int, denom_bound: int) -> Iterator[Surface]:
    """Deterministic stream of all valid pointed closed rational rectangular
    unions with at most max_rects rectangles, coordinates with denominators at
    most denom_bound inside the window [-max_rects*denom_bound, ...], with the
    basepoint interior, deduplicated by isomorphism.

    The stream is lazy; consumers take prefixes.
    """
    if max_rects < 1 or denom_bound < 1:
        raise ValueError("bounds must be at least 1")
    window = max_rects * denom_bound
    coords = _coord_pool(denom_bound, window)
    neg = [c for c in coords if c < 0]
    pos = [c for c in coords if c > 0]
    seen: dict[tuple, list[Surface]] = {}

    def fresh(s: Surface) -> Optional[Surface]:
        if not s.is_valid:
            return None
        cpx = s.complex()
        if not cpx.interiorish(cpx.base_class):
            return None
        area = Fraction(0)
        for c in range(cpx.n_classes):
            if cpx.kind[c] == FACE:
                x0, x1, y0, y1 = cpx.footprint(c)
                area += (x1 - x0) * (y1 - y0)
        hull = (
            min(r.x_lo for r in s.rects),
            max(r.x_hi for r in s.rects),
            min(r.y_lo for r in s.rects),
            max(r.y_hi for r in s.rects),
        )
        key = (cpx.euler_characteristic(), area, hull, len(cpx.boundary_cycles()))
        bucket = seen.setdefault(key, [])
        if any(isomorphic(prev, s) for prev in bucket):
            return None
        bucket.append(s)
        return s

    base_rects = [
        RatRect(x0, x1, y0, y1)
        for x0 in neg
        for x1 in pos
        for y0 in neg
        for y1 in pos
    ]
    for r in base_rects:
        s = fresh(Surface([r], [], (0, RatPoint(0, 0))))
        if s is not None:
            yield s
    if max_rects < 2:
        return

    all_rects = [
        RatRect(x0, x1, y0, y1)
        for x0, x1 in itertools.combinations(coords, 2)
        for y0, y1 in itertools.combinations(coords, 2)
    ]

    def extend(rects: list[RatRect], depth: int):
        for r2 in all_rects:
            if not any(r2.overlaps_interior(r) for r in rects):
                continue
            new = rects + [r2]
            pairs = [
                (i, j)
                for i in range(len(new))
                for j in range(i + 1, len(new))
                if new[i].overlaps_interior(new[j])
            ]
            for bits in range(1, 1 << len(pairs)):
                glue = [pairs[t] for t in range(len(pairs)) if bits >> t & 1]
                s = fresh(Surface(new, glue, (0, RatPoint(0, 0))))
                if s is not None:
                    yield s
            if depth + 1 < max_rects:
                yield from extend(new, depth + 1)

    for r in base_rects:
        yield from extend([r], 1)
