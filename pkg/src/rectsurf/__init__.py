"""Exact calculus for planar translation structures built from rational rectangles."""

from .geom import (
    Arrangement,
    NegativeWinding,
    PointOnCurve,
    RatPoint,
    RatRect,
    RectiLoop,
    loop_region_decomposition,
    overlay,
    winding_number,
)
from .surface import (
    Classification,
    InconsistentEncoding,
    InvalidPoint,
    InvalidSurface,
    NotNormalized,
    Surface,
    SurfacePoint,
    ValidationReport,
    boundary_loops,
    classify,
    decode,
    dev,
    encode,
    euler_characteristic,
    isomorphic,
    normalize,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
