"""3D geometry: facet frames, RIS candidate sites, and blockage tests.

Buildings are closed oriented boxes.  Facet j of a building has outward
normal at local angle omega + (j-1)*pi/2, j = 1..4, with j = 1 along the
local +length axis.  The RIS candidate site of a facet is the midpoint of
its top edge.  Line-of-sight between two points holds iff the open segment
between them intersects no (non-excluded) building solid; the test is the
slab method in each building's local frame.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

# Interval comparisons in the slab test operate at this absolute scale (m);
# grazing contacts within it may classify either way.
EPS = 1e-9


@dataclass(frozen=True)
class Facet:
    building_id: int
    facet_id: int  # 1..4
    anchor: np.ndarray  # facet-plane center, shape (3,)
    normal: np.ndarray  # outward unit normal, z = 0


@dataclass(frozen=True)
class RisSite:
    building_id: int
    facet_id: int
    position: np.ndarray  # top-edge midpoint, z = building height
    normal: np.ndarray


def _facet_frame(b, j: int):
    if j not in (1, 2, 3, 4):
        raise ValueError(f"facet_id must be 1..4, got {j}")
    angle = b.omega + (j - 1) * 0.5 * math.pi
    normal = np.array([math.cos(angle), math.sin(angle), 0.0])
    half = 0.5 * b.length if j in (1, 3) else 0.5 * b.width
    center_xy = np.array([b.cx, b.cy]) + half * normal[:2]
    return normal, center_xy


def facet(b, j: int) -> Facet:
    """Facet frame: anchor at the facet-plane center, outward unit normal."""
    normal, center_xy = _facet_frame(b, j)
    anchor = np.array([center_xy[0], center_xy[1], 0.5 * b.height])
    return Facet(building_id=b.id, facet_id=j, anchor=anchor, normal=normal)


def ris_site(b, j: int) -> RisSite:
    """RIS candidate location: midpoint of the facet's top edge."""
    normal, center_xy = _facet_frame(b, j)
    position = np.array([center_xy[0], center_xy[1], b.height])
    return RisSite(building_id=b.id, facet_id=j, position=position, normal=normal)


def faces(p, f: Facet) -> bool:
    """True iff point p lies strictly in the facet's outward half-space."""
    p = np.asarray(p, dtype=float)
    return float(np.dot(p - f.anchor, f.normal)) > 0.0


class BuildingArrays:
    """Column store of building parameters for vectorized blockage tests."""

    def __init__(self, buildings):
        self.n = len(buildings)
        self.ids = np.array([b.id for b in buildings], dtype=int)
        self.cx = np.array([b.cx for b in buildings])
        self.cy = np.array([b.cy for b in buildings])
        self.cos = np.array([math.cos(b.omega) for b in buildings])
        self.sin = np.array([math.sin(b.omega) for b in buildings])
        self.hl = np.array([0.5 * b.length for b in buildings])
        self.hw = np.array([0.5 * b.width for b in buildings])
        self.h = np.array([b.height for b in buildings])


def _local_xy(arr: BuildingArrays, px, py):
    # Rotate by -omega about each building center: (n, m) for n points, m boxes.
    dx = px[:, None] - arr.cx[None, :]
    dy = py[:, None] - arr.cy[None, :]
    lx = arr.cos[None, :] * dx + arr.sin[None, :] * dy
    ly = -arr.sin[None, :] * dx + arr.cos[None, :] * dy
    return lx, ly


def segments_blocked(a, b, buildings, exclude=None) -> np.ndarray:
    """Vectorized blockage test for a batch of segments.

    Parameters
    ----------
    a, b : (n, 3) arrays of segment endpoints.
    buildings : list of Building or a prebuilt BuildingArrays.
    exclude : None, a scalar building id, or an (n,) int array with -1 for
        "no exclusion"; that building never blocks the matching segment.

    Returns an (n,) boolean array: True where the open segment intersects
    the closed solid of some non-excluded building.
    """
    arr = buildings if isinstance(buildings, BuildingArrays) else BuildingArrays(buildings)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    n = a.shape[0]
    if arr.n == 0:
        return np.zeros(n, dtype=bool)

    seg_len = np.linalg.norm(b - a, axis=1)
    if np.any(seg_len == 0.0):
        raise ValueError("degenerate segment (a == b)")
    tol_t = EPS / seg_len[:, None]  # (n, 1), tolerance in parameter space

    ax_l, ay_l = _local_xy(arr, a[:, 0], a[:, 1])
    bx_l, by_l = _local_xy(arr, b[:, 0], b[:, 1])
    az = a[:, 2:3]  # (n, 1), broadcasts against (1, m) slab bounds
    bz = b[:, 2:3]

    t_lo = np.zeros((n, arr.n))
    t_hi = np.ones((n, arr.n))
    alive = np.ones((n, arr.n), dtype=bool)

    slabs = (
        (ax_l, bx_l, -arr.hl[None, :], arr.hl[None, :]),
        (ay_l, by_l, -arr.hw[None, :], arr.hw[None, :]),
        (az, bz, np.zeros((1, arr.n)), arr.h[None, :]),
    )
    for o, e, lo, hi in slabs:
        d = e - o
        parallel = np.abs(d) < 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            t0 = (lo - o) / d
            t1 = (hi - o) / d
        swap = t0 > t1
        t0n = np.where(swap, t1, t0)
        t1n = np.where(swap, t0, t1)
        inside = (o >= lo - EPS) & (o <= hi + EPS)
        t0n = np.where(parallel, np.where(inside, -np.inf, np.inf), t0n)
        t1n = np.where(parallel, np.where(inside, np.inf, -np.inf), t1n)
        t_lo = np.maximum(t_lo, t0n)
        t_hi = np.minimum(t_hi, t1n)
        alive &= t_lo <= t_hi + tol_t

    hit = alive & (t_hi > tol_t) & (t_lo < 1.0 - tol_t)

    if exclude is not None:
        excl = np.asarray(exclude)
        if excl.ndim == 0:
            hit[:, arr.ids == int(excl)] = False
        else:
            hit &= excl[:, None] != arr.ids[None, :]
    return hit.any(axis=1)


def segment_blocked(a, b, buildings, exclude=None, trace=False) -> bool:
    """True iff the open segment (a, b) intersects any non-excluded building.

    With ``trace`` (or DEBUG logging on this module), each query emits a
    per-building hit breakdown.
    """
    hit = bool(segments_blocked(np.asarray(a, dtype=float)[None, :],
                                np.asarray(b, dtype=float)[None, :],
                                buildings, exclude)[0])
    if trace or logger.isEnabledFor(logging.DEBUG):
        blds = (buildings.n if isinstance(buildings, BuildingArrays)
                else len(buildings))
        parts = []
        if not isinstance(buildings, BuildingArrays):
            for bld in buildings:
                if exclude is not None and bld.id == exclude:
                    parts.append(f"{bld.id}:excluded")
                    continue
                one = bool(segments_blocked(
                    np.asarray(a, dtype=float)[None, :],
                    np.asarray(b, dtype=float)[None, :], [bld])[0])
                parts.append(f"{bld.id}:{'hit' if one else 'miss'}")
        msg = (f"segment_blocked {np.asarray(a)} -> {np.asarray(b)} over "
               f"{blds} buildings (exclude={exclude}): {hit} "
               f"[{' '.join(parts)}]")
        logger.debug(msg)
        if trace:
            print(msg)
    return hit


def has_los(a, b, buildings, exclude=None, trace=False) -> bool:
    return not segment_blocked(a, b, buildings, exclude, trace=trace)
