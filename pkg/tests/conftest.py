"""Shared generators for randomized suites.

Everything is seeded; suites state their seeds so failures replay exactly.
"""
from __future__ import annotations

import random
from fractions import Fraction

import pytest

from rectsurf.geom import RatPoint, RatRect, RectiLoop
from rectsurf.present import link_components, present, sub_quotient, closure_complete
from rectsurf.surface import FACE, VERT, Surface
from rectsurf.samples import (
    l_shape,
    plane_union,
    random_plane_union,
    random_surface,
    rectangle,
    square_annulus,
    unit_square,
    winding_staircase,
)


def random_rectiloop(rng: random.Random, max_corners: int = 8) -> RectiLoop:
    """A random closed rectilinear loop with at most max_corners corners."""
    while True:
        n = rng.choice([k for k in (4, 6, 8) if k <= max_corners])
        m = n // 2

        def moves() -> list[int]:
            while True:
                vals = [rng.choice([-2, -1, 1, 2]) for _ in range(m - 1)]
                last = -sum(vals)
                if last != 0 and abs(last) <= 3:
                    return vals + [last]

        hs, vs = moves(), moves()
        pts = [RatPoint(0, 0)]
        for h, v in zip(hs, vs):
            pts.append(pts[-1] + RatPoint(h, 0))
            pts.append(pts[-1] + RatPoint(0, v))
        pts = pts[:-1]
        try:
            return RectiLoop(pts)
        except ValueError:
            continue


def subset_links_ok(cpx, cells: set[int]) -> bool:
    for v in cells:
        if cpx.kind[v] != VERT:
            continue
        nv = {cell: n for cell, n in cpx.neighbors(v) if n in cells}
        if len(link_components(nv, cpx.cell[v])) > 1:
            return False
    return True


def random_subunion(
    rng: random.Random,
    s: Surface,
    max_faces: int = 12,
    interior_only: bool = False,
    max_tries: int = 60,
):
    """A random closed sub-union of s containing the basepoint, or None.

    With interior_only the sub-union stays away from the boundary of s.
    """
    s.require_valid()
    cpx = s.complex()
    base = cpx.base_class
    seed_faces = [
        n for _, n in list(cpx.neighbors(base)) + [((0, 0, 0), base)]
        if cpx.kind[n] == FACE
    ]
    if not seed_faces:
        return None
    for _ in range(max_tries):
        faces = {rng.choice(seed_faces)}
        target = rng.randint(1, max_faces)
        frontier = list(faces)
        while len(faces) < target and frontier:
            f = rng.choice(frontier)
            grow = []
            for _cell, e in cpx.neighbors(f):
                for _cell2, f2 in cpx.neighbors(e):
                    if cpx.kind[f2] == FACE and f2 not in faces:
                        grow.append(f2)
            if not grow:
                frontier.remove(f)
                continue
            faces.add(rng.choice(grow))
            frontier = list(faces)
        cells = closure_complete(cpx, faces)
        if base not in cells:
            continue
        if interior_only and any(not cpx.is_manifold_interior[c] for c in cells):
            continue
        if not subset_links_ok(cpx, cells):
            continue
        q = sub_quotient(cpx, cells, base)
        try:
            out, _ = present(q, s.base[1])
        except RuntimeError:
            continue
        if out.is_valid:
            return out
    return None


def random_pointed_pair(rng: random.Random, **kw):
    """A pair (sub-union, ambient) with a known immersion between them."""
    for _ in range(40):
        s = random_surface(rng, **kw)
        k = random_subunion(rng, s)
        if k is not None:
            return k, s
    raise RuntimeError("generator failed")


@pytest.fixture
def rng():
    return random.Random(20260809)
