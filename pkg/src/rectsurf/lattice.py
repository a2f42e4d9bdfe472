"""Joins and meets of surfaces: fusion, core, limits, finiteness witnesses.

The fusion of a family is its least upper bound under immersion, computed as
the smallest path-invariant identification of the disjoint union: a congruence
closure over cells of a common grid refinement.  The core (greatest lower
bound) is the basepoint component of the cell-wise fiber product, with the
added point O encoded by the EMPTY sentinel.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .geom import RatPoint
from .morphism import (
    CertificateReport,
    ImmersionMap,
    convergence_certificate,
    find_immersion,
    immerses,
)
from .present import Quotient, link_components, present
from .surface import FACE, VEDGE, HEDGE, VERT, Surface, SurfacePoint


class NotAChain(Exception):
    """Raised when a claimed monotone chain is not monotone."""


class _EmptyCore:
    """The added least element O: below every surface, itself not a surface."""

    _instance: Optional["_EmptyCore"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "O"

    def __bool__(self) -> bool:
        return False


EMPTY = _EmptyCore()


@dataclass(frozen=True)
class FusionResult:
    surface: Surface
    injections: tuple[ImmersionMap, ...]


def _prepare(inputs: Sequence[Surface]) -> tuple[list[Surface], bool]:
    inputs = list(inputs)
    if not inputs:
        raise ValueError("need at least one surface")
    flags = {s.is_open for s in inputs}
    if len(flags) != 1:
        raise ValueError("cannot mix open and closed surfaces")
    for s in inputs:
        s.require_valid()
        s.require_normalized()
        cpx = s.complex()
        if not cpx.interiorish(cpx.base_class):
            raise ValueError("order operations require basepoints in the interior")
    return inputs, flags.pop()


def _joint(inputs: Sequence[Surface]):
    gxs: set[Fraction] = set()
    gys: set[Fraction] = set()
    for s in inputs:
        sx, sy = s.own_coords()
        gxs.update(sx)
        gys.update(sy)
    gx = tuple(sorted(gxs))
    gy = tuple(sorted(gys))
    cpxs = [s.complex(gx, gy) for s in inputs]
    gxi = {x: i for i, x in enumerate(gx)}
    gyi = {y: i for i, y in enumerate(gy)}
    to_g = []
    to_l = []
    for c in cpxs:
        to_g.append(([gxi[x] for x in c.xs], [gyi[y] for y in c.ys]))
        lx = {gxi[x]: i for i, x in enumerate(c.xs)}
        ly = {gyi[y]: i for i, y in enumerate(c.ys)}
        to_l.append((lx, ly))
    return gx, gy, cpxs, to_g, to_l


def fuse(inputs: Sequence[Surface]) -> FusionResult:
    """Least upper bound: congruence closure of the disjoint union.

    Seeds identify all basepoint cells; whenever two identified cells see
    same-footprint neighbors, those are identified too, to a fixpoint.
    """
    inputs, is_open = _prepare(inputs)
    gx, gy, cpxs, to_g, to_l = _joint(inputs)

    offsets = []
    total = 0
    for c in cpxs:
        offsets.append(total)
        total += c.n_classes

    parent = list(range(total))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    # incidence dictionaries in global grid coordinates, per root
    incid: list[dict[tuple[int, int, int], int]] = [dict() for _ in range(total)]
    adm: list[bool] = [False] * total
    gcell: list[tuple[int, int, int]] = [(0, 0, 0)] * total
    for m, c in enumerate(cpxs):
        lgx, lgy = to_g[m]
        for cls in range(c.n_classes):
            node = offsets[m] + cls
            kind, ix, iy = c.cell[cls]
            gcell[node] = (kind, lgx[ix], lgy[iy])
            if not c.admissible(cls):
                continue
            adm[node] = True
            d = incid[node]
            for (k2, jx, jy), n2 in c.neighbors(cls):
                if c.admissible(n2):
                    d[(k2, lgx[jx], lgy[jy])] = offsets[m] + n2

    def merge(u: int, v: int) -> None:
        stack = [(u, v)]
        while stack:
            a, b = stack.pop()
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            if gcell[ra] != gcell[rb]:  # pragma: no cover
                raise RuntimeError("congruence closure merged unequal cells")
            if len(incid[ra]) < len(incid[rb]):
                ra, rb = rb, ra
            parent[rb] = ra
            da, db = incid[ra], incid[rb]
            incid[rb] = {}
            for cell, n in db.items():
                other = da.get(cell)
                if other is None:
                    da[cell] = n
                else:
                    stack.append((other, n))

    base_nodes = [offsets[m] + cpxs[m].base_class for m in range(len(inputs))]
    for n in base_nodes[1:]:
        merge(base_nodes[0], n)

    roots = sorted({find(n) for n in range(total) if adm[n]})
    node_id = {r: i for i, r in enumerate(roots)}
    cells = [gcell[r] for r in roots]
    nbrs = [
        {cell: node_id[find(n)] for cell, n in incid[r].items()} for r in roots
    ]
    q = Quotient(gx, gy, cells, nbrs, node_id[find(base_nodes[0])])
    out, cls_of_node = present(q, RatPoint(0, 0), is_open)
    rep = out.validate()
    if not rep.ok:  # pragma: no cover
        raise RuntimeError(f"fusion produced an invalid surface: {rep.problems}")
    out_cpx = out.complex(gx, gy)
    injections = []
    for m, c in enumerate(cpxs):
        cell_map = {}
        for cls in range(c.n_classes):
            if c.admissible(cls):
                cell_map[cls] = cls_of_node[node_id[find(offsets[m] + cls)]]
        injections.append(ImmersionMap(inputs[m], out, c, out_cpx, cell_map))
    return FusionResult(out, tuple(injections))


def core(inputs: Sequence[Surface]) -> Union[Surface, _EmptyCore]:
    """Greatest lower bound: basepoint component of the cell-wise fiber product.

    Returns EMPTY (the added point O) when no common surface exists.
    """
    inputs, is_open = _prepare(inputs)
    gx, gy, cpxs, to_g, to_l = _joint(inputs)
    k = len(inputs)

    base = tuple(cpxs[m].base_class for m in range(k))
    lgx0, lgy0 = to_g[0]

    def gcell_of(m: int, cls: int) -> tuple[int, int, int]:
        kind, ix, iy = cpxs[m].cell[cls]
        lgx, lgy = to_g[m]
        return (kind, lgx[ix], lgy[iy])

    base_cell = gcell_of(0, base[0])
    if any(gcell_of(m, base[m]) != base_cell for m in range(1, k)):  # pragma: no cover
        raise RuntimeError("basepoint cells disagree")

    nodes: dict[tuple, int] = {base: 0}
    cells: list[tuple[int, int, int]] = [base_cell]
    tuples: list[tuple] = [base]
    nbrs: list[dict[tuple[int, int, int], int]] = [dict()]
    queue = [base]
    while queue:
        t = queue.pop()
        ti = nodes[t]
        for lcell, n0 in cpxs[0].neighbors(t[0]):
            if not cpxs[0].admissible(n0):
                continue
            kind, jx, jy = lcell
            g = (kind, to_g[0][0][jx], to_g[0][1][jy])
            comp = [n0]
            ok = True
            for m in range(1, k):
                lx, ly = to_l[m]
                ljx, ljy = lx.get(g[1]), ly.get(g[2])
                nm = (
                    cpxs[m].class_at(t[m], kind, ljx, ljy)
                    if ljx is not None and ljy is not None
                    else None
                )
                if nm is None or not cpxs[m].admissible(nm):
                    ok = False
                    break
                comp.append(nm)
            if not ok:
                continue
            t2 = tuple(comp)
            i2 = nodes.get(t2)
            if i2 is None:
                i2 = len(tuples)
                nodes[t2] = i2
                tuples.append(t2)
                cells.append(g)
                nbrs.append(dict())
                queue.append(t2)
            nbrs[ti][g] = i2
            nbrs[i2][cells[ti]] = ti

    # keep only faces and their closures (prune whiskers)
    keep = set()
    for i, c in enumerate(cells):
        if c[0] == FACE:
            keep.add(i)
            for j in nbrs[i].values():
                if cells[j][0] != FACE:
                    keep.add(j)
    if 0 not in keep:
        return EMPTY
    # split butterfly vertices into one copy per link component
    order = sorted(keep)
    for v in order:
        if cells[v][0] != VERT:
            continue
        nv = {cell: n for cell, n in nbrs[v].items() if n in keep}
        comps = link_components(nv, cells[v])
        if len(comps) <= 1:
            nbrs[v] = nv
            continue
        # split a butterfly vertex into one boundary vertex per fan
        comps.sort(key=lambda s: sorted(s))
        nbrs[v] = {cell: n for cell, n in nv.items() if n in comps[0]}
        for extra in comps[1:]:
            w = len(cells)
            cells.append(cells[v])
            tuples.append(tuples[v])
            nbrs.append({cell: n for cell, n in nv.items() if n in extra})
            keep.add(w)
            for n in extra:
                for cell, b in list(nbrs[n].items()):
                    if b == v and cell == cells[v]:
                        nbrs[n][cell] = w

    # basepoint component over kept cells
    comp = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for n in nbrs[u].values():
            if n in keep and n not in comp:
                comp.add(n)
                stack.append(n)
    if not any(cells[i][0] == FACE for i in comp):
        return EMPTY
    order = sorted(comp)
    renum = {o: i for i, o in enumerate(order)}
    q = Quotient(
        gx,
        gy,
        [cells[o] for o in order],
        [{cell: renum[n] for cell, n in nbrs[o].items() if n in comp} for o in order],
        renum[0],
    )
    out, _ = present(q, RatPoint(0, 0), is_open)
    rep = out.validate()
    if not rep.ok:  # pragma: no cover
        raise RuntimeError(f"core produced an invalid surface: {rep.problems}")
    return out


def direct_limit(chain: Sequence[Surface]) -> tuple[Surface, CertificateReport]:
    """Fusion of an increasing chain, certified against the chain itself."""
    from .surface import classify

    chain = list(chain)
    if len(chain) < 1:
        raise NotAChain("empty chain")
    for a, b in zip(chain, chain[1:]):
        if not immerses(a, b):
            raise NotAChain("chain is not increasing under immersion")
    limit = fuse(chain).surface
    probes = [p for p in chain if not p.is_open and classify(p).is_disk]
    cert = convergence_certificate(chain, limit, probes)
    return limit, cert


def inverse_limit(
    chain: Sequence[Surface],
) -> tuple[Union[Surface, _EmptyCore], CertificateReport]:
    """Core of a decreasing chain, certified; EMPTY encodes convergence to O."""
    from .surface import classify

    chain = list(chain)
    if len(chain) < 1:
        raise NotAChain("empty chain")
    for a, b in zip(chain, chain[1:]):
        if not immerses(b, a):
            raise NotAChain("chain is not decreasing under immersion")
    limit = core(chain)
    if limit is EMPTY:
        return EMPTY, CertificateReport(
            True,
            (),
            note="finite prefix has no common lower bound: the sequence "
            "converges to the added point O",
        )
    probes = [limit] if (not limit.is_open and classify(limit).is_disk) else []
    probes += [
        p
        for p in chain
        if not p.is_open and classify(p).is_disk and immerses(p, limit)
    ]
    cert = convergence_certificate(chain, limit, probes)
    return limit, cert


def fusion_finiteness_witness(
    inputs: Sequence[Surface], p: SurfacePoint, q: SurfacePoint
) -> Optional[list[int]]:
    """A small input subset whose fusion already identifies p and q.

    Returns None when the full fusion does not identify them.  The subset is
    shrunk greedily until removing any single member breaks the identification.
    """
    inputs = list(inputs)
    i = next(m for m, s in enumerate(inputs) if s == p.surface)
    j = next(m for m, s in enumerate(inputs) if s == q.surface)

    def identified(index_set: list[int]) -> bool:
        res = fuse([inputs[m] for m in index_set])
        a = res.injections[index_set.index(i)].map_point(p)
        b = res.injections[index_set.index(j)].map_point(q)
        return a.cls == b.cls and a.pos == b.pos

    full = list(range(len(inputs)))
    if not identified(full):
        return None
    keep = full
    changed = True
    while changed:
        changed = False
        for m in list(keep):
            if m in (i, j):
                continue
            trial = [x for x in keep if x != m]
            if identified(trial):
                keep = trial
                changed = True
    return keep
