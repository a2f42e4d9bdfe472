"""Canonical fixture surfaces and random generators used by tests and demos."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .geom import RatPoint, RatRect
from .surface import Surface

Rat = Fraction


def unit_square(base=(Fraction(1, 2), Fraction(1, 2))) -> Surface:
    return Surface([RatRect(0, 1, 0, 1)], [], (0, RatPoint(*base)))


def rectangle(x_lo, x_hi, y_lo, y_hi, base=None) -> Surface:
    r = RatRect(x_lo, x_hi, y_lo, y_hi)
    if base is None:
        base = RatPoint((r.x_lo + r.x_hi) / 2, (r.y_lo + r.y_hi) / 2)
    else:
        base = RatPoint(*base)
    return Surface([r], [], (0, base))


def l_shape() -> Surface:
    """Union of [0,2]x[0,1] and [0,1]x[0,2]; boundary is a 6-corner loop."""
    return Surface(
        [RatRect(0, 2, 0, 1), RatRect(0, 1, 0, 2)],
        [(0, 1)],
        (0, RatPoint(Fraction(1, 2), Fraction(1, 2))),
    )


_RING = (
    RatRect(-1, 2, -1, 0),  # south
    RatRect(1, 2, -1, 2),  # east
    RatRect(-1, 2, 1, 2),  # north
    RatRect(-1, 0, -1, 2),  # west
)


def square_annulus() -> Surface:
    """Four slabs around the hole (0,1)^2, glued in a cycle; chi = 0."""
    glue = [(0, 1), (1, 2), (2, 3), (3, 0)]
    return Surface(_RING, glue, (0, RatPoint(Fraction(1, 2), Fraction(-1, 2))))


def winding_staircase(steps: int = 9) -> Surface:
    """A disk winding steps/4 turns around the hole (0,1)^2.

    Consecutive slabs are glued along their corner blocks; slabs one full turn
    apart share a developed image but stay on separate sheets.
    """
    if steps < 2:
        raise ValueError("a staircase needs at least two slabs")
    rects = [_RING[k % 4] for k in range(steps)]
    glue = [(k, k + 1) for k in range(steps - 1)]
    return Surface(rects, glue, (0, RatPoint(Fraction(1, 2), Fraction(-1, 2))))


def flattened_staircase(steps: int = 9) -> Surface:
    """The plane image of the staircase: every overlapping pair glued."""
    rects = [_RING[k % 4] for k in range(steps)]
    glue = [
        (i, j)
        for i in range(steps)
        for j in range(i + 1, steps)
        if rects[i].overlaps_interior(rects[j])
    ]
    return Surface(rects, glue, (0, RatPoint(Fraction(1, 2), Fraction(-1, 2))))


def plane_union(rects, base_rect: int = 0, base: Optional[tuple] = None) -> Surface:
    """A plane-embedded union: every pair with interior overlap is glued."""
    rects = [r if isinstance(r, RatRect) else RatRect(*r) for r in rects]
    glue = [
        (i, j)
        for i in range(len(rects))
        for j in range(i + 1, len(rects))
        if rects[i].overlaps_interior(rects[j])
    ]
    if base is None:
        r = rects[base_rect]
        base = ((r.x_lo + r.x_hi) / 2, (r.y_lo + r.y_hi) / 2)
    return Surface(rects, glue, (base_rect, RatPoint(*base)))


def growing_squares(n: int = 5) -> list[Surface]:
    """The chain [-k,k]^2 for k = 1..n, all based at the origin."""
    return [rectangle(-k, k, -k, k, base=(0, 0)).normalize() for k in range(1, n + 1)]


def shrinking_squares(n: int = 5) -> list[Surface]:
    """The chain [-1/k,1/k]^2 for k = 1..n, based at the origin."""
    return [
        rectangle(Fraction(-1, k), Fraction(1, k), Fraction(-1, k), Fraction(1, k), base=(0, 0))
        for k in range(1, n + 1)
    ]


def staircase_chain(lo: int = 4, hi: int = 9) -> list[Surface]:
    return [winding_staircase(k).normalize() for k in range(lo, hi + 1)]


def _rand_frac(rng: random.Random, denom_bound: int, lo: int, hi: int) -> Fraction:
    q = rng.randint(1, denom_bound)
    return Fraction(rng.randint(lo * q, hi * q), q)


def random_plane_union(
    rng: random.Random,
    max_rects: int = 4,
    denom_bound: int = 2,
    window: int = 3,
    max_tries: int = 200,
) -> Surface:
    """A random valid plane-embedded union containing the origin, normalized."""
    for _ in range(max_tries):
        n = rng.randint(1, max_rects)
        rects = []
        x0 = _rand_frac(rng, denom_bound, -window, -1 if rng.random() < 0.8 else 0)
        x1 = _rand_frac(rng, denom_bound, 1, window)
        y0 = _rand_frac(rng, denom_bound, -window, -1)
        y1 = _rand_frac(rng, denom_bound, 1, window)
        if x0 >= 0:
            x0 = Fraction(0)
        try:
            rects.append(RatRect(min(x0, -Fraction(1, denom_bound)), x1, y0, y1))
        except ValueError:
            continue
        ok = True
        for _ in range(n - 1):
            anchor = rects[rng.randrange(len(rects))]
            cx = _rand_frac(rng, denom_bound, int(anchor.x_lo) - 1, int(anchor.x_hi) + 1)
            cy = _rand_frac(rng, denom_bound, int(anchor.y_lo) - 1, int(anchor.y_hi) + 1)
            w = _rand_frac(rng, denom_bound, 1, window)
            h = _rand_frac(rng, denom_bound, 1, window)
            try:
                rects.append(RatRect(cx - w, cx + w, cy - h, cy + h))
            except ValueError:
                ok = False
                break
        if not ok:
            continue
        s = plane_union(rects, base=(0, 0))
        if s.rects[0].contains_point(RatPoint(0, 0)) and s.is_valid:
            return s
    raise RuntimeError("failed to generate a valid plane union")


def random_surface(
    rng: random.Random,
    max_rects: int = 5,
    denom_bound: int = 2,
    window: int = 3,
) -> Surface:
    """A random valid surface: plane unions, staircases, and their pieces."""
    kind = rng.random()
    if kind < 0.55:
        return random_plane_union(rng, max_rects, denom_bound, window)
    if kind < 0.8:
        return winding_staircase(rng.randint(4, 4 + max_rects)).normalize()
    return square_annulus().normalize() if kind < 0.9 else l_shape().normalize()
