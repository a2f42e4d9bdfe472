"""Surfaces presented as gluings of closed rational rectangles.

A Surface is a list of developed rectangle images, a glue graph identifying
rectangles along their full closed overlaps, and a basepoint anchor.  The
derived CellComplex is the grid refinement of all rectangle copies quotiented
by the gluing, and is the substrate for every traversal, validity check and
matching algorithm in the package.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .geom import RatPoint, RatRect, RectiLoop

Rat = Fraction

FACE, VEDGE, HEDGE, VERT = 0, 1, 2, 3


class InvalidPoint(Exception):
    """Raised when a point does not lie on the surface it is claimed to."""


class InvalidSurface(Exception):
    """Raised when an operation requires a valid surface and the input is not."""


class NotNormalized(Exception):
    """Raised when an operation requires the basepoint to develop to the origin."""


class InconsistentEncoding(Exception):
    """Raised when (rects, glue, S) data does not reconstruct a pointed surface."""


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Classification:
    kind: str  # "disk" | "punctured_disk" | "not_planar"
    punctures: int = 0

    @property
    def is_disk(self) -> bool:
        return self.kind == "disk"

    def __repr__(self) -> str:
        if self.kind == "punctured_disk":
            return f"PuncturedDisk({self.punctures})"
        return {"disk": "Disk", "not_planar": "NotAPlanarPiece"}[self.kind]


DISK = Classification("disk")
NOT_PLANAR = Classification("not_planar")


def punctured_disk(k: int) -> Classification:
    return Classification("punctured_disk", k) if k else DISK


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


# offsets of the four cell kinds inside a rectangle's local enumeration are
# derived from the rectangle's cell-range width W and height H:
#   faces W*H, vertical edges (W+1)*H, horizontal edges W*(H+1), verts (W+1)*(H+1)


class CellComplex:
    """Quotient cell complex of a Surface on a (possibly refined) grid."""

    def __init__(self, surface: "Surface", xs: Sequence[Fraction], ys: Sequence[Fraction]):
        self.surface = surface
        self.xs = tuple(xs)
        self.ys = tuple(ys)
        self._build()
        self._analyze()

    # -- construction -----------------------------------------------------

    def _build(self) -> None:
        s = self.surface
        xs, ys = self.xs, self.ys
        xi = {x: i for i, x in enumerate(xs)}
        yi = {y: i for i, y in enumerate(ys)}
        self._range = []  # per rect: (ax, bx, ay, by) grid index bounds
        self._offset = []
        total = 0
        for r in s.rects:
            ax, bx, ay, by = xi[r.x_lo], xi[r.x_hi], yi[r.y_lo], yi[r.y_hi]
            self._range.append((ax, bx, ay, by))
            self._offset.append(total)
            w, h = bx - ax, by - ay
            total += w * h + (w + 1) * h + w * (h + 1) + (w + 1) * (h + 1)
        self._total_copies = total

        uf = _UnionFind(total)
        for i, j in s.glue:
            if not (0 <= i < len(s.rects) and 0 <= j < len(s.rects)) or i == j:
                continue
            ob = s.rects[i].overlap_bounds(s.rects[j])
            if ob is None:
                continue
            gx0, gx1 = xi[ob[0]], xi[ob[1]]
            gy0, gy1 = yi[ob[2]], yi[ob[3]]
            for kind, x0, x1, y0, y1 in (
                (FACE, gx0, gx1 - 1, gy0, gy1 - 1),
                (VEDGE, gx0, gx1, gy0, gy1 - 1),
                (HEDGE, gx0, gx1 - 1, gy0, gy1),
                (VERT, gx0, gx1, gy0, gy1),
            ):
                for ix in range(x0, x1 + 1):
                    for iy in range(y0, y1 + 1):
                        uf.union(self._copy_id(i, kind, ix, iy), self._copy_id(j, kind, ix, iy))

        # compact classes
        root_to_cls: dict[int, int] = {}
        self.cell: list[tuple[int, int, int]] = []  # class -> (kind, ix, iy)
        self.members: list[list[int]] = []  # class -> rect indices
        self._cls_of_copy = [0] * total
        for r in range(len(s.rects)):
            for kind, ix, iy in self._iter_cells(r):
                cid = self._copy_id(r, kind, ix, iy)
                root = uf.find(cid)
                c = root_to_cls.get(root)
                if c is None:
                    c = len(self.cell)
                    root_to_cls[root] = c
                    self.cell.append((kind, ix, iy))
                    self.members.append([])
                self._cls_of_copy[cid] = c
                self.members[c].append(r)
        self.n_classes = len(self.cell)

    def _iter_cells(self, r: int):
        ax, bx, ay, by = self._range[r]
        for ix in range(ax, bx):
            for iy in range(ay, by):
                yield (FACE, ix, iy)
        for ix in range(ax, bx + 1):
            for iy in range(ay, by):
                yield (VEDGE, ix, iy)
        for ix in range(ax, bx):
            for iy in range(ay, by + 1):
                yield (HEDGE, ix, iy)
        for ix in range(ax, bx + 1):
            for iy in range(ay, by + 1):
                yield (VERT, ix, iy)

    def _copy_id(self, r: int, kind: int, ix: int, iy: int) -> int:
        ax, bx, ay, by = self._range[r]
        w, h = bx - ax, by - ay
        dx, dy = ix - ax, iy - ay
        if kind == FACE:
            local = dx * h + dy
        elif kind == VEDGE:
            local = w * h + dx * h + dy
        elif kind == HEDGE:
            local = w * h + (w + 1) * h + dx * (h + 1) + dy
        else:
            local = w * h + (w + 1) * h + w * (h + 1) + dx * (h + 1) + dy
        return self._offset[r] + local

    def _contains(self, r: int, kind: int, ix: int, iy: int) -> bool:
        ax, bx, ay, by = self._range[r]
        if kind == FACE:
            return ax <= ix < bx and ay <= iy < by
        if kind == VEDGE:
            return ax <= ix <= bx and ay <= iy < by
        if kind == HEDGE:
            return ax <= ix < bx and ay <= iy <= by
        return ax <= ix <= bx and ay <= iy <= by

    def class_of(self, r: int, kind: int, ix: int, iy: int) -> Optional[int]:
        if not self._contains(r, kind, ix, iy):
            return None
        return self._cls_of_copy[self._copy_id(r, kind, ix, iy)]

    def class_at(self, c: int, kind: int, ix: int, iy: int) -> Optional[int]:
        """The class of the cell (kind, ix, iy) seen from any member of class c."""
        for r in self.members[c]:
            cls = self.class_of(r, kind, ix, iy)
            if cls is not None:
                return cls
        return None

    # -- analysis ----------------------------------------------------------

    def _analyze(self) -> None:
        """Per-class structure: interiority, sides, links, activity."""
        n = self.n_classes
        self.kind = [c[0] for c in self.cell]
        self.is_active = [False] * n  # belongs to the union of open rectangles
        self.face_sides: list[Optional[tuple]] = [None] * n  # edge -> (side_classes...)
        self.is_manifold_interior = [False] * n
        self.is_boundary_edge = [False] * n
        self.vertex_slots: list[Optional[dict]] = [None] * n
        self._problems_local: list[str] = []

        for c in range(n):
            kind, ix, iy = self.cell[c]
            for r in self.members[c]:
                ax, bx, ay, by = self._range[r]
                if kind == FACE:
                    inner = True
                elif kind == VEDGE:
                    inner = ax < ix < bx
                elif kind == HEDGE:
                    inner = ay < iy < by
                else:
                    inner = ax < ix < bx and ay < iy < by
                if inner:
                    self.is_active[c] = True
                    break

        for c in range(n):
            kind, ix, iy = self.cell[c]
            if kind == FACE:
                self.is_manifold_interior[c] = True
                continue
            if kind in (VEDGE, HEDGE):
                if kind == VEDGE:
                    sides = ((FACE, ix - 1, iy), (FACE, ix, iy))
                else:
                    sides = ((FACE, ix, iy - 1), (FACE, ix, iy))
                side_classes: list[set[int]] = [set(), set()]
                for r in self.members[c]:
                    for k, (fk, fx, fy) in enumerate(sides):
                        f = self.class_of(r, fk, fx, fy)
                        if f is not None:
                            side_classes[k].add(f)
                a, b = side_classes
                self.face_sides[c] = (frozenset(a), frozenset(b))
                if len(a) > 1 or len(b) > 1:
                    self._problems_local.append(
                        f"edge {self.describe(c)} has multiple sheets on one side"
                    )
                elif len(a) + len(b) == 2:
                    self.is_manifold_interior[c] = True
                elif len(a) + len(b) == 1:
                    self.is_boundary_edge[c] = True
                else:
                    self._problems_local.append(f"edge {self.describe(c)} bounds no face")
                continue
            # vertex: 4 quadrant slots and 4 direction slots
            quads = {"NE": set(), "NW": set(), "SW": set(), "SE": set()}
            dirs = {"N": set(), "S": set(), "E": set(), "W": set()}
            qcells = {
                "NE": (FACE, ix, iy),
                "NW": (FACE, ix - 1, iy),
                "SW": (FACE, ix - 1, iy - 1),
                "SE": (FACE, ix, iy - 1),
            }
            dcells = {
                "N": (VEDGE, ix, iy),
                "S": (VEDGE, ix, iy - 1),
                "E": (HEDGE, ix, iy),
                "W": (HEDGE, ix - 1, iy),
            }
            for r in self.members[c]:
                for q, cell in qcells.items():
                    f = self.class_of(r, *cell)
                    if f is not None:
                        quads[q].add(f)
                for d, cell in dcells.items():
                    e = self.class_of(r, *cell)
                    if e is not None:
                        dirs[d].add(e)
            self.vertex_slots[c] = {"quads": quads, "dirs": dirs}
            bad = [q for q, s in quads.items() if len(s) > 1] + [
                d for d, s in dirs.items() if len(s) > 1
            ]
            if bad:
                self._problems_local.append(
                    f"vertex {self.describe(c)} carries multiple sheets in slot(s) {','.join(sorted(bad))}"
                )
                continue
            corner_links = {"NE": ("N", "E"), "NW": ("N", "W"), "SW": ("S", "W"), "SE": ("S", "E")}
            present_corners = [q for q in quads if quads[q]]
            present_dirs = {d for d in dirs if dirs[d]}
            # connectivity of the link graph (nodes: directions, edges: corners)
            if present_corners:
                seen = set()
                stack = [present_corners[0]]
                seen_c = set()
                while stack:
                    q = stack.pop()
                    if q in seen_c:
                        continue
                    seen_c.add(q)
                    for d in corner_links[q]:
                        if d in seen:
                            continue
                        seen.add(d)
                        for q2 in quads:
                            if quads[q2] and q2 not in seen_c and d in corner_links[q2]:
                                stack.append(q2)
                if len(seen_c) != len(present_corners) or seen != present_dirs:
                    self._problems_local.append(
                        f"vertex {self.describe(c)} has a disconnected link (boundary curves touch)"
                    )
                    continue
                if len(present_corners) == 4:
                    self.is_manifold_interior[c] = True
            else:
                self._problems_local.append(f"vertex {self.describe(c)} bounds no face")

    # -- geometry ----------------------------------------------------------

    def footprint(self, c: int) -> tuple:
        kind, ix, iy = self.cell[c]
        xs, ys = self.xs, self.ys
        if kind == FACE:
            return (xs[ix], xs[ix + 1], ys[iy], ys[iy + 1])
        if kind == VEDGE:
            return (xs[ix], xs[ix], ys[iy], ys[iy + 1])
        if kind == HEDGE:
            return (xs[ix], xs[ix + 1], ys[iy], ys[iy])
        return (xs[ix], xs[ix], ys[iy], ys[iy])

    def describe(self, c: int) -> str:
        kind, ix, iy = self.cell[c]
        x0, x1, y0, y1 = self.footprint(c)
        name = {FACE: "face", VEDGE: "vedge", HEDGE: "hedge", VERT: "vertex"}[kind]
        return f"{name}[{x0},{x1}]x[{y0},{y1}]"

    def locate_cell(self, p: RatPoint) -> Optional[tuple[int, int, int]]:
        """Grid cell (kind, ix, iy) containing p, or None when off-grid."""
        xs, ys = self.xs, self.ys
        if not (xs[0] <= p.x <= xs[-1] and ys[0] <= p.y <= ys[-1]):
            return None
        jx = bisect_left(xs, p.x)
        on_x = jx < len(xs) and xs[jx] == p.x
        jy = bisect_left(ys, p.y)
        on_y = jy < len(ys) and ys[jy] == p.y
        if on_x and on_y:
            return (VERT, jx, jy)
        if on_x:
            return (VEDGE, jx, jy - 1)
        if on_y:
            return (HEDGE, jx - 1, jy)
        return (FACE, jx - 1, jy - 1)

    # -- adjacency ---------------------------------------------------------

    def _incident_cells(self, r: int, kind: int, ix: int, iy: int):
        if kind == FACE:
            cand = (
                (VEDGE, ix, iy), (VEDGE, ix + 1, iy),
                (HEDGE, ix, iy), (HEDGE, ix, iy + 1),
                (VERT, ix, iy), (VERT, ix + 1, iy), (VERT, ix, iy + 1), (VERT, ix + 1, iy + 1),
            )
        elif kind == VEDGE:
            cand = (
                (VERT, ix, iy), (VERT, ix, iy + 1),
                (FACE, ix - 1, iy), (FACE, ix, iy),
            )
        elif kind == HEDGE:
            cand = (
                (VERT, ix, iy), (VERT, ix + 1, iy),
                (FACE, ix, iy - 1), (FACE, ix, iy),
            )
        else:
            cand = (
                (VEDGE, ix, iy), (VEDGE, ix, iy - 1),
                (HEDGE, ix, iy), (HEDGE, ix - 1, iy),
                (FACE, ix, iy), (FACE, ix - 1, iy), (FACE, ix - 1, iy - 1), (FACE, ix, iy - 1),
            )
        for cell in cand:
            if self._contains(r, *cell):
                yield cell

    def neighbors(self, c: int):
        """Incident classes of c (cells of one lower/higher dimension sharing closure)."""
        seen: set[int] = set()
        for r in self.members[c]:
            kind, ix, iy = self.cell[c]
            for cell in self._incident_cells(r, kind, ix, iy):
                n = self.class_of(r, *cell)
                if n is not None and n not in seen:
                    seen.add(n)
                    yield cell, n

    # -- basepoint ---------------------------------------------------------

    @property
    def base_class(self) -> Optional[int]:
        s = self.surface
        r, p = s.base
        if not s.rects[r].contains_point(p):
            return None
        cell = self.locate_cell(p)
        if cell is None:
            return None
        return self.class_of(r, *cell)

    # -- traversals ----------------------------------------------------------

    def admissible(self, c: int) -> bool:
        """Cells making up the surface: all for closed unions, open cells otherwise."""
        return self.is_active[c] if self.surface.is_open else True

    def interiorish(self, c: int) -> bool:
        """Cells at which the surface is locally a plane (no boundary)."""
        if self.surface.is_open:
            return self.is_active[c]
        return self.is_manifold_interior[c]

    def connected(self, cells: Optional[Iterable[int]] = None) -> bool:
        wanted = set(cells) if cells is not None else {
            c for c in range(self.n_classes) if self.admissible(c)
        }
        if not wanted:
            return False
        start = next(iter(wanted))
        seen = {start}
        stack = [start]
        while stack:
            c = stack.pop()
            for _, n in self.neighbors(c):
                if n in wanted and n not in seen:
                    seen.add(n)
                    stack.append(n)
        return seen == wanted

    def euler_characteristic(self, cells: Optional[Iterable[int]] = None) -> int:
        pool = cells if cells is not None else (
            c for c in range(self.n_classes) if self.admissible(c)
        )
        chi = 0
        for c in pool:
            k = self.kind[c]
            chi += 1 if k in (FACE, VERT) else -1
        return chi

    # -- boundary ------------------------------------------------------------

    def boundary_cycles(self) -> list[list[tuple[int, str, int, int]]]:
        """Boundary traversals, surface kept on the left.

        Each cycle is a list of (edge_class, direction, start_vertex_class,
        end_vertex_class) with direction one of N/S/E/W.
        """
        succ: dict[int, tuple[int, str, int]] = {}
        for c in range(self.n_classes):
            if not self.is_boundary_edge[c]:
                continue
            kind, ix, iy = self.cell[c]
            lo_side, hi_side = self.face_sides[c]
            v_lo = self.class_at(c, VERT, ix, iy)
            if kind == VEDGE:
                v_hi = self.class_at(c, VERT, ix, iy + 1)
                if lo_side:  # face to the west: walk north
                    succ[v_lo] = (c, "N", v_hi)
                else:  # face to the east: walk south
                    succ[v_hi] = (c, "S", v_lo)
            else:
                v_hi = self.class_at(c, VERT, ix + 1, iy)
                if hi_side:  # face to the north: walk east
                    succ[v_lo] = (c, "E", v_hi)
                else:  # face to the south: walk west
                    succ[v_hi] = (c, "W", v_lo)
        cycles = []
        used: set[int] = set()
        for start in sorted(succ):
            if start in used:
                continue
            cyc = []
            v = start
            while True:
                used.add(v)
                e, d, w = succ[v]
                cyc.append((e, d, v, w))
                v = w
                if v == start:
                    break
            cycles.append(cyc)
        return cycles

    def vertex_position(self, c: int) -> RatPoint:
        kind, ix, iy = self.cell[c]
        return RatPoint(self.xs[ix], self.ys[iy])

    # -- exact straight-segment lifting ---------------------------------------

    def lift(
        self,
        cls: int,
        pos: RatPoint,
        vec: RatPoint,
        cells_ok: Optional[Callable[[int], bool]] = None,
    ) -> Optional[tuple[int, RatPoint]]:
        """Lift the straight segment pos -> pos+vec starting in class cls.

        The walk stays in cells satisfying ``cells_ok`` (default: locally
        planar cells) for parameters t < 1; the final cell may violate it
        (landing exactly on a frontier cell is reported).  Returns the final
        (class, position), or None when the segment exits early.
        """
        if cells_ok is None:
            cells_ok = self.interiorish
        end = pos + vec
        if vec.x == 0 and vec.y == 0:
            return (cls, pos)
        one = Fraction(1)
        cur = cls
        for _ in range(8 * (len(self.xs) + len(self.ys)) * (self.n_classes + 4)):
            kind, ix, iy = self.cell[cur]
            x0, x1, y0, y1 = self.footprint(cur)
            t_exit = None  # parameter at which the walk crosses into nxt
            if kind == FACE:
                tx = ty = None
                if vec.x > 0:
                    tx = (x1 - pos.x) / vec.x
                elif vec.x < 0:
                    tx = (x0 - pos.x) / vec.x
                if vec.y > 0:
                    ty = (y1 - pos.y) / vec.y
                elif vec.y < 0:
                    ty = (y0 - pos.y) / vec.y
                t_exit = min(v for v in (tx, ty) if v is not None)
                if t_exit > one:
                    return (cur, end)
                if tx == t_exit and ty == t_exit:
                    nxt = (VERT, ix + (1 if vec.x > 0 else 0), iy + (1 if vec.y > 0 else 0))
                elif tx == t_exit:
                    nxt = (VEDGE, ix + (1 if vec.x > 0 else 0), iy)
                else:
                    nxt = (HEDGE, ix, iy + (1 if vec.y > 0 else 0))
            elif kind == VEDGE:
                if vec.x != 0:
                    nxt = (FACE, ix - 1 if vec.x < 0 else ix, iy)
                else:
                    t_exit = ((y1 if vec.y > 0 else y0) - pos.y) / vec.y
                    if t_exit > one:
                        return (cur, end)
                    nxt = (VERT, ix, iy + (1 if vec.y > 0 else 0))
            elif kind == HEDGE:
                if vec.y != 0:
                    nxt = (FACE, ix, iy - 1 if vec.y < 0 else iy)
                else:
                    t_exit = ((x1 if vec.x > 0 else x0) - pos.x) / vec.x
                    if t_exit > one:
                        return (cur, end)
                    nxt = (VERT, ix + (1 if vec.x > 0 else 0), iy)
            else:  # vertex: leave instantly in the direction of vec
                if vec.x > 0 and vec.y > 0:
                    nxt = (FACE, ix, iy)
                elif vec.x < 0 and vec.y > 0:
                    nxt = (FACE, ix - 1, iy)
                elif vec.x < 0 and vec.y < 0:
                    nxt = (FACE, ix - 1, iy - 1)
                elif vec.x > 0 and vec.y < 0:
                    nxt = (FACE, ix, iy - 1)
                elif vec.x > 0:
                    nxt = (HEDGE, ix, iy)
                elif vec.x < 0:
                    nxt = (HEDGE, ix - 1, iy)
                elif vec.y > 0:
                    nxt = (VEDGE, ix, iy)
                else:
                    nxt = (VEDGE, ix, iy - 1)
            ncls = self.class_at(cur, *nxt)
            if ncls is None:
                return None
            if t_exit == one:
                # the segment terminates exactly on the crossed cell
                return (ncls, end)
            if not cells_ok(ncls):
                return None
            cur = ncls
        raise RuntimeError("segment lift failed to terminate")  # pragma: no cover


class Surface:
    """A trivial translation surface presented by rectangles, glue and basepoint.

    ``glue`` pairs identify two rectangles along the full closed overlap of
    their developed images.  ``is_open`` marks the surface as the union of the
    open rectangles instead of the closed ones.
    """

    def __init__(
        self,
        rects: Sequence[RatRect],
        glue: Iterable[tuple[int, int]] = (),
        base: tuple[int, RatPoint] = (0, RatPoint(0, 0)),
        is_open: bool = False,
    ):
        self.rects: tuple[RatRect, ...] = tuple(rects)
        if not self.rects:
            raise ValueError("a surface needs at least one rectangle")
        pairs = set()
        for i, j in glue:
            if i == j:
                raise ValueError("a rectangle cannot be glued to itself")
            if not (0 <= i < len(self.rects) and 0 <= j < len(self.rects)):
                raise ValueError(f"glue pair ({i},{j}) out of range")
            pairs.add((min(i, j), max(i, j)))
        self.glue: tuple[tuple[int, int], ...] = tuple(sorted(pairs))
        bi, bp = base
        if not (0 <= bi < len(self.rects)):
            raise ValueError("basepoint rectangle index out of range")
        if not isinstance(bp, RatPoint):
            bp = RatPoint(*bp)
        self.base: tuple[int, RatPoint] = (bi, bp)
        self.is_open = bool(is_open)
        self._complex_cache: dict[tuple, CellComplex] = {}
        self._validation: Optional[ValidationReport] = None

    # -- identity ----------------------------------------------------------

    def _key(self):
        return (self.rects, self.glue, self.base, self.is_open)

    def __eq__(self, other) -> bool:
        return isinstance(other, Surface) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        o = ", open" if self.is_open else ""
        return f"Surface({len(self.rects)} rects, {len(self.glue)} glue pairs{o})"

    # -- complexes -----------------------------------------------------------

    def own_coords(self) -> tuple[list[Fraction], list[Fraction]]:
        xs = sorted({c for r in self.rects for c in (r.x_lo, r.x_hi)})
        ys = sorted({c for r in self.rects for c in (r.y_lo, r.y_hi)})
        return xs, ys

    def complex(
        self,
        extra_x: Iterable[Fraction] = (),
        extra_y: Iterable[Fraction] = (),
    ) -> CellComplex:
        xs, ys = self.own_coords()
        xs = sorted(set(xs) | {x for x in extra_x if xs[0] <= x <= xs[-1]})
        ys = sorted(set(ys) | {y for y in extra_y if ys[0] <= y <= ys[-1]})
        key = (tuple(xs), tuple(ys))
        cpx = self._complex_cache.get(key)
        if cpx is None:
            cpx = CellComplex(self, xs, ys)
            self._complex_cache[key] = cpx
        return cpx

    # -- validation ----------------------------------------------------------

    def validate(self) -> ValidationReport:
        if self._validation is not None:
            return self._validation
        problems: list[str] = []
        bi, bp = self.base
        if not self.rects[bi].contains_point(bp):
            problems.append("basepoint lies outside its rectangle")
            self._validation = ValidationReport(False, tuple(problems))
            return self._validation
        for i, j in self.glue:
            ob = self.rects[i].overlap_bounds(self.rects[j])
            if ob is None:
                problems.append(f"glue pair ({i},{j}) relates disjoint rectangles")
            elif not self.rects[i].overlaps_interior(self.rects[j]):
                problems.append(f"glue pair ({i},{j}) has no interior overlap")
        cpx = self.complex()
        problems.extend(cpx._problems_local)
        if self.is_open:
            base_cls = cpx.base_class
            if base_cls is None or not cpx.is_active[base_cls]:
                problems.append("basepoint is not in the open union")
            active = [c for c in range(cpx.n_classes) if cpx.is_active[c]]
            if not active:
                problems.append("open union is empty")
            elif not cpx.connected(active):
                problems.append("surface is disconnected")
        else:
            if not cpx.connected():
                problems.append("surface is disconnected")
        self._validation = ValidationReport(not problems, tuple(problems))
        return self._validation

    @property
    def is_valid(self) -> bool:
        return self.validate().ok

    def require_valid(self) -> None:
        rep = self.validate()
        if not rep.ok:
            raise InvalidSurface("; ".join(rep.problems))

    # -- basepoint & points ----------------------------------------------------

    @property
    def is_normalized(self) -> bool:
        return self.base[1] == RatPoint(0, 0)

    def require_normalized(self) -> None:
        if not self.is_normalized:
            raise NotNormalized("operation requires a normalized surface (dev(base) = 0)")

    def normalize(self) -> "Surface":
        """Translate so the basepoint develops to the origin."""
        v = -self.base[1]
        if v == RatPoint(0, 0):
            return self
        return self.translate(v)

    def translate(self, v: RatPoint) -> "Surface":
        return Surface(
            [r.translate(v) for r in self.rects],
            self.glue,
            (self.base[0], self.base[1] + v),
            self.is_open,
        )

    def point(self, rect_index: int, x, y) -> "SurfacePoint":
        p = RatPoint(x, y)
        if not (0 <= rect_index < len(self.rects)):
            raise InvalidPoint("rectangle index out of range")
        if not self.rects[rect_index].contains_point(p):
            raise InvalidPoint(f"({p.x},{p.y}) is not in rectangle {rect_index}")
        cpx = self.complex()
        cls = cpx.class_of(rect_index, *cpx.locate_cell(p))
        if cls is None or not cpx.admissible(cls):
            raise InvalidPoint(f"({p.x},{p.y}) is not a point of the surface")
        return SurfacePoint(self, cls, p)

    def basepoint(self) -> "SurfacePoint":
        cpx = self.complex()
        cls = cpx.base_class
        if cls is None:
            raise InvalidPoint("basepoint lies outside its rectangle")
        return SurfacePoint(self, cls, self.base[1])


@dataclass(frozen=True)
class SurfacePoint:
    """A point of a surface: owning quotient cell plus developed coordinates."""

    surface: Surface
    cls: int
    pos: RatPoint

    def dev(self) -> RatPoint:
        return self.pos

    def __repr__(self) -> str:
        return f"SurfacePoint(({self.pos.x},{self.pos.y}) in {self.surface.complex().describe(self.cls)})"


# -- module-level operations ---------------------------------------------------


def validate(s: Surface) -> ValidationReport:
    return s.validate()


def dev(s: Surface, p: SurfacePoint) -> RatPoint:
    if p.surface is not s and p.surface != s:
        raise InvalidPoint("point does not belong to this surface")
    return p.pos


def normalize(s: Surface) -> Surface:
    s.require_valid()
    return s.normalize()


def euler_characteristic(s: Surface) -> int:
    s.require_valid()
    return s.complex().euler_characteristic()


def boundary_loops(s: Surface) -> list[RectiLoop]:
    """Developed boundary loops, surface kept on the left."""
    s.require_valid()
    if s.is_open:
        raise InvalidSurface("an open union has no boundary curves")
    cpx = s.complex()
    loops = []
    for cyc in cpx.boundary_cycles():
        dirs = [d for _, d, _, _ in cyc]
        k = next((i for i in range(len(cyc)) if dirs[i] != dirs[i - 1]), 0)
        cyc = cyc[k:] + cyc[:k]
        corners = []
        prev_dir = None
        for e, d, v, w in cyc:
            if d != prev_dir:
                corners.append(cpx.vertex_position(v))
                prev_dir = d
        loops.append(RectiLoop(corners))
    return loops


def _ends_of_open(cpx: CellComplex) -> int:
    frontier = [
        c
        for c in range(cpx.n_classes)
        if not cpx.is_active[c]
    ]
    wanted = set(frontier)
    comps = 0
    seen: set[int] = set()
    for c in frontier:
        if c in seen:
            continue
        comps += 1
        stack = [c]
        seen.add(c)
        while stack:
            u = stack.pop()
            for _, n in cpx.neighbors(u):
                if n in wanted and n not in seen:
                    seen.add(n)
                    stack.append(n)
    return comps


def classify(s: Surface) -> Classification:
    """Disk / punctured disk / not-a-planar-piece, from chi and boundary data."""
    s.require_valid()
    cpx = s.complex()
    chi = cpx.euler_characteristic()
    if s.is_open:
        ends = _ends_of_open(cpx)
        genus2 = 2 - chi - ends
        if genus2 != 0 or ends < 1:
            return NOT_PLANAR
        return punctured_disk(ends - 1)
    loops = len(cpx.boundary_cycles())
    if chi == 1 and loops == 1:
        return DISK
    if loops >= 2 and chi == 1 - (loops - 1):
        return punctured_disk(loops - 1)
    return NOT_PLANAR


def encode(s: Surface) -> tuple[tuple[RatRect, ...], tuple[tuple[int, int], ...], frozenset[int]]:
    """The (rectangles, glue graph, basepoint-set) presentation data."""
    s.require_valid()
    cpx = s.complex()
    base_cls = cpx.base_class
    bp = s.base[1]
    S = frozenset(
        i
        for i, r in enumerate(s.rects)
        if r.contains_point(bp) and cpx.class_of(i, *cpx.locate_cell(bp)) == base_cls
    )
    return (s.rects, s.glue, S)


def decode(
    rects: Sequence[RatRect],
    glue: Iterable[tuple[int, int]],
    S: Iterable[int],
    base_dev: RatPoint,
    is_open: bool = False,
) -> Surface:
    """Rebuild a surface from presentation data, checking consistency."""
    S = frozenset(S)
    if not S:
        raise InconsistentEncoding("basepoint set is empty")
    s = Surface(rects, glue, (min(S), base_dev), is_open)
    rep = s.validate()
    if not rep.ok:
        raise InconsistentEncoding("; ".join(rep.problems))
    if encode(s)[2] != S:
        raise InconsistentEncoding(
            "basepoint set is not the full set of rectangles meeting the basepoint class"
        )
    return s


def isomorphic(a: Surface, b: Surface) -> bool:
    """True when immersions exist in both directions (Cor. of uniqueness)."""
    from . import morphism

    return morphism.immerses(a, b) and morphism.immerses(b, a)
