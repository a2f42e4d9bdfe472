"""Re-presenting quotient cell structures as rectangle-glue surfaces.

Fusions, fiber products and sub-complexes all produce bare quotient cell
structures.  To hand them back as Surfaces we cover their faces with maximal
single-sheet rectangles, bridge rectangle seams with dominoes (rectangles can
only be glued along overlaps with interior), and verify that the rebuilt
surface's own quotient reproduces the input structure exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .geom import RatPoint, RatRect
from .surface import FACE, HEDGE, VEDGE, VERT, CellComplex, Surface


@dataclass
class Quotient:
    """A quotient cell structure on a grid: cells, closure incidences, basepoint."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]
    cells: list[tuple[int, int, int]]  # node -> (kind, ix, iy)
    nbrs: list[dict[tuple[int, int, int], int]]  # node -> incident cell -> node
    base: int

    def faces(self) -> list[int]:
        return [n for n, c in enumerate(self.cells) if c[0] == FACE]

    def footprint(self, n: int) -> tuple:
        kind, ix, iy = self.cells[n]
        xs, ys = self.xs, self.ys
        if kind == FACE:
            return (xs[ix], xs[ix + 1], ys[iy], ys[iy + 1])
        if kind == VEDGE:
            return (xs[ix], xs[ix], ys[iy], ys[iy + 1])
        if kind == HEDGE:
            return (xs[ix], xs[ix + 1], ys[iy], ys[iy])
        return (xs[ix], xs[ix], ys[iy], ys[iy])

    def edge_faces(self, n: int) -> list[int]:
        kind, ix, iy = self.cells[n]
        if kind == VEDGE:
            sides = ((FACE, ix - 1, iy), (FACE, ix, iy))
        elif kind == HEDGE:
            sides = ((FACE, ix, iy - 1), (FACE, ix, iy))
        else:
            return []
        return [self.nbrs[n][c] for c in sides if c in self.nbrs[n]]


def link_components(nbrs_v: dict, vcell: tuple) -> list[set[int]]:
    """Components of a vertex link, each as the set of incident cell nodes.

    The link graph has the four direction slots as nodes and the quadrant
    corners as edges; a legal vertex has a connected link (one fan or cycle).
    """
    _, ix, iy = vcell
    quads = {
        "NE": (FACE, ix, iy),
        "NW": (FACE, ix - 1, iy),
        "SW": (FACE, ix - 1, iy - 1),
        "SE": (FACE, ix, iy - 1),
    }
    dirs = {
        "N": (VEDGE, ix, iy),
        "S": (VEDGE, ix, iy - 1),
        "E": (HEDGE, ix, iy),
        "W": (HEDGE, ix - 1, iy),
    }
    corner_links = {"NE": ("N", "E"), "NW": ("N", "W"), "SW": ("S", "W"), "SE": ("S", "E")}
    left = {q for q in quads if quads[q] in nbrs_v}
    comps = []
    while left:
        start = left.pop()
        comp_q = {start}
        comp_d = set(corner_links[start])
        grew = True
        while grew:
            grew = False
            for q2 in list(left):
                if set(corner_links[q2]) & comp_d:
                    left.discard(q2)
                    comp_q.add(q2)
                    comp_d.update(corner_links[q2])
                    grew = True
        cellset = {nbrs_v[quads[q]] for q in comp_q}
        cellset.update(nbrs_v[dirs[d]] for d in comp_d if dirs[d] in nbrs_v)
        comps.append(cellset)
    return comps


def vertex_links_connected(q: Quotient) -> bool:
    for v, c in enumerate(q.cells):
        if c[0] == VERT and len(link_components(q.nbrs[v], c)) > 1:
            return False
    return True


def quotient_connected(q: Quotient) -> bool:
    if not q.cells:
        return False
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for n in q.nbrs[u].values():
            if n not in seen:
                seen.add(n)
                stack.append(n)
    return len(seen) == len(q.cells)


def sub_quotient(cpx: CellComplex, cells: Iterable[int], base_cls: int) -> Quotient:
    """The quotient structure induced on a closure-complete set of classes."""
    subset = sorted(set(cells))
    index = {c: n for n, c in enumerate(subset)}
    if base_cls not in index:
        raise ValueError("basepoint class is not in the sub-complex")
    nbrs: list[dict] = []
    for c in subset:
        d = {}
        for cell, n in cpx.neighbors(c):
            if n in index:
                d[cell] = index[n]
        nbrs.append(d)
    return Quotient(
        cpx.xs, cpx.ys, [cpx.cell[c] for c in subset], nbrs, index[base_cls]
    )


def closure_complete(cpx: CellComplex, faces: Iterable[int]) -> set[int]:
    """Faces plus all their edge and vertex closure cells."""
    out = set(faces)
    for f in list(out):
        for _, n in cpx.neighbors(f):
            if cpx.kind[n] != FACE:
                out.add(n)
    return out


class _Candidate:
    __slots__ = ("rect", "cells")

    def __init__(self, rect: RatRect, cells: dict[tuple[int, int, int], int]):
        self.rect = rect
        self.cells = cells


def _block_candidates(q: Quotient) -> list[_Candidate]:
    """Cover the faces of q with maximal single-sheet rectangle blocks."""
    faces = sorted(q.faces(), key=lambda n: (q.cells[n][2], q.cells[n][1], n))

    def step(f: int, axis: int) -> Optional[int]:
        kind, ix, iy = q.cells[f]
        if axis == 0:
            e = q.nbrs[f].get((VEDGE, ix + 1, iy))
            return None if e is None else q.nbrs[e].get((FACE, ix + 1, iy))
        e = q.nbrs[f].get((HEDGE, ix, iy + 1))
        return None if e is None else q.nbrs[e].get((FACE, ix, iy + 1))

    unused = set(faces)
    runs: list[list[int]] = []
    for f in faces:
        if f not in unused:
            continue
        run = [f]
        unused.discard(f)
        while True:
            nxt = step(run[-1], 0)
            if nxt is None or nxt not in unused:
                break
            run.append(nxt)
            unused.discard(nxt)
        runs.append(run)

    def stackable(top: list[int], run: list[int]) -> bool:
        if any(step(top[k], 1) != run[k] for k in range(len(run))):
            return False
        # interior vertices between columns must exist (no hidden punctures)
        for k in range(len(run) - 1):
            _, ixk, iyk = q.cells[top[k]]
            if (VERT, ixk + 1, iyk + 1) not in q.nbrs[top[k]]:
                return False
        return True

    blocks: list[list[list[int]]] = []
    open_blocks: dict[tuple, tuple[int, list[int]]] = {}
    for run in runs:
        _, ix0, iy = q.cells[run[0]]
        span = (ix0, len(run))
        prev = open_blocks.get(span)
        merged = False
        if prev is not None:
            bi, top = prev
            _, _, piy = q.cells[top[0]]
            if piy + 1 == iy and stackable(top, run):
                blocks[bi].append(run)
                open_blocks[span] = (bi, run)
                merged = True
        if not merged:
            blocks.append([run])
            open_blocks[span] = (len(blocks) - 1, run)

    out = []
    for block in blocks:
        cells: dict[tuple[int, int, int], int] = {}
        for run in block:
            for f in run:
                cells[q.cells[f]] = f
                for cell, n in q.nbrs[f].items():
                    if q.cells[n][0] != FACE:
                        prev = cells.get(cell)
                        if prev is not None and prev != n:
                            raise RuntimeError("block is not single-sheeted")
                        cells[cell] = n
        _, ix0, iy0 = q.cells[block[0][0]]
        _, ixl, iyl = q.cells[block[-1][-1]]
        rect = RatRect(q.xs[ix0], q.xs[ixl + 1], q.ys[iy0], q.ys[iyl + 1])
        out.append(_Candidate(rect, cells))
    return out


def _domino(q: Quotient, e: int, f1: int, f2: int) -> _Candidate:
    """The two-face block straddling a seam edge."""
    cells: dict[tuple[int, int, int], int] = {q.cells[e]: e}
    for f in (f1, f2):
        cells[q.cells[f]] = f
        for cell, n in q.nbrs[f].items():
            if q.cells[n][0] != FACE:
                cells[cell] = n
    fx = [q.cells[f] for f in (f1, f2)]
    ix0 = min(c[1] for c in fx)
    iy0 = min(c[2] for c in fx)
    ix1 = max(c[1] for c in fx) + 1
    iy1 = max(c[2] for c in fx) + 1
    rect = RatRect(q.xs[ix0], q.xs[ix1], q.ys[iy0], q.ys[iy1])
    return _Candidate(rect, cells)


def _quad_block(q: Quotient, v: int) -> Optional[_Candidate]:
    """The 2x2 face block around an interior vertex (all four quadrants)."""
    kind, ix, iy = q.cells[v]
    quads = [
        (FACE, ix - 1, iy - 1),
        (FACE, ix, iy - 1),
        (FACE, ix - 1, iy),
        (FACE, ix, iy),
    ]
    fs = [q.nbrs[v].get(c) for c in quads]
    if any(f is None for f in fs):
        return None
    cells: dict[tuple[int, int, int], int] = {q.cells[v]: v}
    for f in fs:
        cells[q.cells[f]] = f
        for cell, n in q.nbrs[f].items():
            if q.cells[n][0] != FACE:
                prev = cells.get(cell)
                if prev is not None and prev != n:
                    return None
                cells[cell] = n
    rect = RatRect(q.xs[ix - 1], q.xs[ix + 1], q.ys[iy - 1], q.ys[iy + 1])
    return _Candidate(rect, cells)


def present(
    q: Quotient, base_pos: RatPoint, is_open: bool = False
) -> tuple[Surface, dict[int, int]]:
    """Build a Surface realizing q; also return the node -> class correspondence.

    The returned mapping sends each node of q to the class of the rebuilt
    surface's complex on the grid of q.
    """
    candidates = _block_candidates(q)

    def covered_by(*nodes: int) -> bool:
        return any(all(n in c.cells.values() for n in nodes) for c in candidates)

    face_in: dict[int, list[int]] = {}
    for i, c in enumerate(candidates):
        for cell, n in c.cells.items():
            if cell[0] == FACE:
                face_in.setdefault(n, []).append(i)

    for e, c in enumerate(q.cells):
        if c[0] not in (VEDGE, HEDGE):
            continue
        fs = q.edge_faces(e)
        if len(fs) != 2:
            continue
        f1, f2 = fs
        if set(face_in.get(f1, ())) & set(face_in.get(f2, ())):
            continue
        dom = _domino(q, e, f1, f2)
        face_in.setdefault(f1, []).append(len(candidates))
        face_in.setdefault(f2, []).append(len(candidates))
        candidates.append(dom)

    if is_open:
        for v, c in enumerate(q.cells):
            if c[0] != VERT:
                continue
            kind, ix, iy = c
            interiorized = any(
                cand.cells.get((VERT, ix, iy)) == v
                and cand.rect.x_lo < q.xs[ix] < cand.rect.x_hi
                and cand.rect.y_lo < q.ys[iy] < cand.rect.y_hi
                for cand in candidates
            )
            if not interiorized:
                blk = _quad_block(q, v)
                if blk is not None:
                    candidates.append(blk)

    # dedupe exact duplicates
    seen = {}
    kept: list[_Candidate] = []
    for c in candidates:
        key = (c.rect, tuple(sorted(c.cells.items())))
        if key not in seen:
            seen[key] = len(kept)
            kept.append(c)
    candidates = kept

    glue = []
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            a, b = candidates[i], candidates[j]
            if not a.rect.overlaps_interior(b.rect):
                continue
            shared = [cell for cell in a.cells if cell in b.cells]
            agree = sum(1 for cell in shared if a.cells[cell] == b.cells[cell])
            if agree == 0:
                continue  # distinct sheets over a common developed region
            if agree != len(shared):
                raise RuntimeError("candidates agree only on part of their overlap")
            glue.append((i, j))

    base_cell = q.cells[q.base]
    base_idx = next(
        (i for i, c in enumerate(candidates) if c.cells.get(base_cell) == q.base), None
    )
    if base_idx is None:
        raise RuntimeError("basepoint cell not covered by any candidate")

    surface = Surface(
        [c.rect for c in candidates],
        glue,
        (base_idx, base_pos),
        is_open,
    )

    # verify: the rebuilt surface's quotient must match q exactly
    cpx = surface.complex(q.xs, q.ys)
    tx = {x: i for i, x in enumerate(q.xs)}
    ty = {y: i for i, y in enumerate(q.ys)}
    mx = {i: tx[x] for i, x in enumerate(cpx.xs)}
    my = {i: ty[y] for i, y in enumerate(cpx.ys)}
    node_of_class: dict[int, int] = {}
    checked = 0
    for c in range(cpx.n_classes):
        if not cpx.admissible(c):
            continue
        checked += 1
        kind, ix, iy = cpx.cell[c]
        qcell = (kind, mx[ix], my[iy])
        node = None
        for r in cpx.members[c]:
            n = candidates[r].cells.get(qcell)
            if n is None:
                raise RuntimeError("rebuilt surface has a cell outside the quotient")
            if node is None:
                node = n
            elif node != n:
                raise RuntimeError("rebuilt surface merges distinct quotient cells")
        node_of_class[c] = node
    realized = set(node_of_class.values())
    if len(realized) != checked:
        raise RuntimeError("rebuilt surface splits a quotient cell")
    if len(realized) != len(q.cells):
        raise RuntimeError("rebuilt surface misses quotient cells")
    class_of_node = {n: c for c, n in node_of_class.items()}
    return surface, class_of_node
