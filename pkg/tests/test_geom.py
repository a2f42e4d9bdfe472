import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectsurf.geom import (
    NegativeWinding,
    PointOnCurve,
    RatPoint,
    RatRect,
    RectiLoop,
    loop_region_decomposition,
    overlay,
    winding_number,
)

from conftest import random_rectiloop

UNIT = RectiLoop([(0, 0), (1, 0), (1, 1), (0, 1)])


def test_rect_rejects_degenerate():
    with pytest.raises(ValueError):
        RatRect(0, 0, 0, 1)
    with pytest.raises(ValueError):
        RatRect(1, 0, 0, 1)


def test_loop_needs_alternation():
    with pytest.raises(ValueError):
        RectiLoop([(0, 0), (1, 0), (2, 0), (2, 1), (0, 1), (0, 0)])
    with pytest.raises(ValueError):
        RectiLoop([(0, 0), (1, 0), (1, 1)])


def test_overlay_single_rect():
    arr = overlay([RatRect(0, 1, 0, 1)])
    assert len(arr.faces) == 1
    assert len(arr.edges) == 4
    assert len(arr.vertices) == 4


def test_overlay_two_rects_in_a_row():
    arr = overlay([RatRect(0, 2, 0, 1), RatRect(1, 3, 0, 1)])
    assert len(arr.faces) == 3
    middle = [owners for rect, owners in arr.faces if rect.x_lo == 1]
    assert middle == [(0, 1)]


def _pixel_flood_face_count(rects):
    xs = sorted({c for r in rects for c in (r.x_lo, r.x_hi)})
    ys = sorted({c for r in rects for c in (r.y_lo, r.y_hi)})
    count = 0
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            cx = (xs[i] + xs[i + 1]) / 2
            cy = (ys[j] + ys[j + 1]) / 2
            if any(r.x_lo < cx < r.x_hi and r.y_lo < cy < r.y_hi for r in rects):
                count += 1
    return count


def test_overlay_matches_grid_scan_oracle():
    rng = random.Random(7)
    for _ in range(10):
        rects = []
        for _ in range(rng.randint(1, 10)):
            x0 = Fraction(rng.randint(-6, 4), rng.randint(1, 3))
            y0 = Fraction(rng.randint(-6, 4), rng.randint(1, 3))
            rects.append(
                RatRect(x0, x0 + Fraction(rng.randint(1, 5), 2), y0, y0 + Fraction(rng.randint(1, 5), 2))
            )
        arr = overlay(rects)
        assert len(arr.faces) == _pixel_flood_face_count(rects)
        shuffled = rects[:]
        rng.shuffle(shuffled)
        assert len(overlay(shuffled).faces) == len(arr.faces)


def test_winding_unit_square():
    assert winding_number(UNIT, RatPoint(Fraction(1, 2), Fraction(1, 2))) == 1
    assert winding_number(UNIT, RatPoint(2, 2)) == 0


def test_winding_point_on_curve():
    with pytest.raises(PointOnCurve):
        winding_number(UNIT, RatPoint(0, Fraction(1, 2)))
    with pytest.raises(PointOnCurve):
        winding_number(UNIT, RatPoint(1, 1))


def _crossing_count_oracle(loop, p):
    """Signed crossings of the upward ray from p, walking edge by edge."""
    w = 0
    for a, b in loop.edges():
        if a.y != b.y:
            continue
        lo, hi = min(a.x, b.x), max(a.x, b.x)
        if lo <= p.x < hi and a.y > p.y:
            w += 1 if b.x < a.x else -1
    return w


def test_winding_doubly_traversed_square():
    loop = RectiLoop([(0, 0), (1, 0), (1, 1), (0, 1)] * 2)
    p = RatPoint(Fraction(1, 2), Fraction(1, 3))
    assert winding_number(loop, p) == 2
    assert winding_number(loop, p) == _crossing_count_oracle(loop, p)


def test_winding_cyclic_rotation_and_reversal():
    rng = random.Random(3)
    for _ in range(15):
        loop = random_rectiloop(rng)
        p = RatPoint(Fraction(rng.randint(-9, 9), 4), Fraction(rng.randint(-9, 9), 4))
        if loop.point_on_trace(p):
            continue
        w = winding_number(loop, p)
        assert winding_number(loop.rotated(rng.randrange(len(loop))), p) == w
        assert winding_number(loop.reversed(), p) == -w


def test_decomposition_unit_square():
    out = loop_region_decomposition(UNIT)
    assert out == [(RatRect(0, 1, 0, 1), 1)]


def test_decomposition_clockwise_raises():
    with pytest.raises(NegativeWinding):
        loop_region_decomposition(UNIT.reversed())


def test_decomposition_doubly_wound_area():
    loop = RectiLoop([(0, 0), (2, 0), (2, 2), (0, 2)] * 2)
    out = loop_region_decomposition(loop)
    assert all(w == 2 for _, w in out)
    assert sum(r.area * w for r, w in out) == 8 == loop.signed_area()


def test_decomposition_matches_shoelace():
    rng = random.Random(11)
    checked = 0
    while checked < 20:
        loop = random_rectiloop(rng)
        try:
            out = loop_region_decomposition(loop)
        except NegativeWinding:
            loop = loop.reversed()
            try:
                out = loop_region_decomposition(loop)
            except NegativeWinding:
                continue
        assert sum(r.area * w for r, w in out) == loop.signed_area()
        checked += 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_winding_shoelace_property(seed):
    # the winding integral over grid cells equals the shoelace signed area
    loop = random_rectiloop(random.Random(seed))
    xs, ys = loop.xs(), loop.ys()
    total = Fraction(0)
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            c = RatPoint((xs[i] + xs[i + 1]) / 2, (ys[j] + ys[j + 1]) / 2)
            total += winding_number(loop, c) * (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
    assert total == loop.signed_area()
