"""Planar geometry for node positions: distance, bearing, angular sectors."""

import math
from typing import NamedTuple

TAU = math.tau


class Position(NamedTuple):
    x: float
    y: float


class UndefinedBearingError(ValueError):
    """Raised when asking for the bearing between coincident points."""


def distance(a: Position, b: Position) -> float:
    """Euclidean distance between two positions, in meters."""
    return math.hypot(b[0] - a[0], b[1] - a[1])


def bearing(origin: Position, p: Position) -> float:
    """Angle of p as seen from origin, normalized to [0, 2*pi).

    Raises UndefinedBearingError for coincident points; callers that need a
    total classification apply the sector-1 convention themselves.
    """
    dx = p[0] - origin[0]
    dy = p[1] - origin[1]
    if dx == 0.0 and dy == 0.0:
        raise UndefinedBearingError(f"bearing undefined for coincident points {origin}")
    theta = math.atan2(dy, dx)
    if theta < 0.0:
        theta += TAU
    # atan2(-0.0, x>0) yields -0.0; keep the result inside [0, tau)
    return 0.0 if theta >= TAU else theta


def area_of(theta: float, k: int) -> int:
    """Sector index (1-based) of angle theta among k equal sectors.

    Sectors are half-open: sector i covers [(i-1)*2pi/k, i*2pi/k), lower
    bound inclusive.
    """
    if k < 1:
        raise ValueError(f"sector count must be >= 1, got {k}")
    if not 0.0 <= theta < TAU:
        raise ValueError(f"angle must lie in [0, 2*pi), got {theta}")
    idx = int(theta * k / TAU)
    # guard against rounding up to k for theta just below 2*pi
    if idx >= k:
        idx = k - 1
    return idx + 1


def area_of_position(center: Position, p: Position, k: int) -> int:
    """Sector of p relative to center; coincident points map to sector 1."""
    try:
        return area_of(bearing(center, p), k)
    except UndefinedBearingError:
        return 1
