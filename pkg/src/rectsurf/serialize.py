"""Text documents for surfaces and loops: JSON with exact rational strings."""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .geom import RatPoint, RatRect, RectiLoop
from .surface import Surface


class DocumentError(Exception):
    """Raised when an input document is malformed."""


def rat_str(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_rat(s: str) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as e:
        raise DocumentError(f"bad rational {s!r}") from e


def surface_to_doc(s: Surface) -> dict:
    return {
        "version": 1,
        "rects": [
            [rat_str(r.x_lo), rat_str(r.x_hi), rat_str(r.y_lo), rat_str(r.y_hi)]
            for r in s.rects
        ],
        "glue": [[i, j] for i, j in s.glue],
        "base": {
            "rect": s.base[0],
            "x": rat_str(s.base[1].x),
            "y": rat_str(s.base[1].y),
        },
        "open": s.is_open,
    }


def doc_to_surface(doc: Any) -> Surface:
    if not isinstance(doc, dict):
        raise DocumentError("surface document must be an object")
    if doc.get("version") != 1:
        raise DocumentError("unsupported document version")
    try:
        rects = [
            RatRect(parse_rat(a), parse_rat(b), parse_rat(c), parse_rat(d))
            for a, b, c, d in doc["rects"]
        ]
        glue = [(int(i), int(j)) for i, j in doc.get("glue", [])]
        base = doc["base"]
        bp = (int(base["rect"]), RatPoint(parse_rat(base["x"]), parse_rat(base["y"])))
        return Surface(rects, glue, bp, bool(doc.get("open", False)))
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise DocumentError(f"malformed surface document: {e}") from e


def loop_to_doc(loop: RectiLoop) -> dict:
    return {
        "version": 1,
        "vertices": [[rat_str(v.x), rat_str(v.y)] for v in loop.vertices],
    }


def doc_to_loop(doc: Any) -> RectiLoop:
    if not isinstance(doc, dict) or doc.get("version") != 1:
        raise DocumentError("unsupported loop document")
    try:
        return RectiLoop([RatPoint(parse_rat(x), parse_rat(y)) for x, y in doc["vertices"]])
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise DocumentError(f"malformed loop document: {e}") from e


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1)


def load_file(path: str) -> Any:
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DocumentError(f"cannot read {path}: {e}") from e


def parse_point(text: str) -> RatPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise DocumentError("points are written x,y with exact rationals")
    return RatPoint(parse_rat(parts[0].strip()), parse_rat(parts[1].strip()))
