"""Deterministic link physics for the cascaded satellite-RIS-user channel.

The received power through an RIS is P_t * D / (d_ur * d_rs)^2 where D is
the cascade constant assembled from antenna gains, RIS aperture and carrier
frequency.  A candidate entry is nonzero only when user and satellite both
face the facet, both hops are unobstructed, and the user lies within the
RIS influence radius.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geom

C_LIGHT = 299792458.0


@dataclass(frozen=True)
class ChannelParams:
    p_t: float = 110.0        # transmit power (W)
    g_t: float = 1e5          # transmit antenna gain (linear)
    g_r: float = 20.0         # receive antenna gain (linear)
    g: float = 10.0           # RIS unit-cell gain (linear)
    m: int = 1024             # unit-cell rows
    n: int = 1024             # unit-cell columns
    d_x: float = 0.075        # cell size (m)
    d_y: float = 0.075
    f_c: float = 2.0e9        # carrier (Hz)
    a: float = 0.8            # reflection coefficient, in (0, 1]
    epsilon: float = 1e-3     # coverage threshold (W)
    r_max: float = 500.0      # RIS influence radius (m, horizontal)

    def __post_init__(self):
        for name in ("p_t", "g_t", "g_r", "g", "m", "n", "d_x", "d_y",
                     "f_c", "a", "epsilon", "r_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"channel parameter {name} must be positive")
        if self.a > 1.0:
            raise ValueError("reflection coefficient a must be <= 1")


def cascade_constant(p: ChannelParams) -> float:
    """Cascade constant D = Gt*Gr*G*M^2*N^2*dx*dy*c^2*A^2 / (64*fc^2*pi^3)."""
    num = (p.g_t * p.g_r * p.g * p.m ** 2 * p.n ** 2 * p.d_x * p.d_y
           * C_LIGHT ** 2 * p.a ** 2)
    return num / (64.0 * p.f_c ** 2 * math.pi ** 3)


def link_power(p: ChannelParams, d_ur: float, d_rs: float) -> float:
    """Received power P_t * D / (d_ur * d_rs)^2 for one two-hop link."""
    if d_ur <= 0 or d_rs <= 0:
        raise ValueError("link distances must be positive")
    return p.p_t * cascade_constant(p) / (d_ur * d_rs) ** 2


# ---------------------------------------------------------------------------
# Scene-frame plumbing
# ---------------------------------------------------------------------------

def satellite_xyz(s, scene) -> np.ndarray:
    """Satellite position in scene coordinates (region corner at origin).

    SatellitePosition offsets are relative to the ground area's center.
    """
    cfg = scene.config
    return np.array([s.x + 0.5 * cfg.area_x, s.y + 0.5 * cfg.area_y, s.z])


def _user_xyz(scene) -> np.ndarray:
    return np.array([[u.x, u.y, 0.0] for u in scene.users])


def _blocked_chunked(a_pts, b_pts, builds, exclude=None, chunk=16384):
    n = a_pts.shape[0]
    out = np.empty(n, dtype=bool)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        excl = exclude[lo:hi] if isinstance(exclude, np.ndarray) else exclude
        out[lo:hi] = geom.segments_blocked(a_pts[lo:hi], b_pts[lo:hi], builds, excl)
    return out


@dataclass
class UserPartition:
    los_ids: np.ndarray
    nlos_ids: np.ndarray


def classify_users(s, scene) -> UserPartition:
    """Split users into LoS / NLoS sets for one satellite position."""
    users = _user_xyz(scene)
    if len(scene.users) == 0:
        empty = np.array([], dtype=int)
        return UserPartition(los_ids=empty, nlos_ids=empty)
    sat = satellite_xyz(s, scene)
    builds = geom.BuildingArrays(scene.buildings)
    blocked = _blocked_chunked(users, np.broadcast_to(sat, users.shape), builds)
    ids = np.array([u.id for u in scene.users])
    return UserPartition(los_ids=ids[~blocked], nlos_ids=ids[blocked])


# ---------------------------------------------------------------------------
# Site table: satellite-independent geometry, computed once per scene
# ---------------------------------------------------------------------------

class SiteTable:
    """User-to-site link geometry for every RIS candidate site.

    Facing, horizontal-radius and user-side LoS conditions do not depend on
    the satellite, so they are evaluated once and reused across satellite
    positions.  ``site_subset`` restricts the table to a set of flat site
    indices (building_index * 4 + facet_id - 1), used when evaluating a
    fixed deployment.
    """

    def __init__(self, scene, params: ChannelParams, site_subset=None):
        self.scene = scene
        self.params = params
        builds = scene.buildings
        n_b = len(builds)
        all_sites = [geom.ris_site(b, j) for b in builds for j in (1, 2, 3, 4)]
        idx = (np.arange(4 * n_b) if site_subset is None
               else np.asarray(site_subset, dtype=int))
        self.site_index = idx
        self.n_buildings = n_b
        self.building_of = idx // 4
        self.facet_of = idx % 4 + 1
        self.pos = np.array([all_sites[i].position for i in idx]).reshape(len(idx), 3)
        self.normal = np.array([all_sites[i].normal for i in idx]).reshape(len(idx), 3)
        anchors = [geom.facet(builds[i // 4], i % 4 + 1).anchor for i in idx]
        self.anchor = np.array(anchors).reshape(len(idx), 3)
        self.builds = geom.BuildingArrays(builds)

        users = _user_xyz(scene)
        n_u = users.shape[0]
        n_s = len(idx)
        if n_u == 0 or n_s == 0:
            self.user_ok = np.zeros((n_u, n_s), dtype=bool)
            self.d_ur = np.zeros((n_u, n_s))
            return

        diff = users[:, None, :] - self.anchor[None, :, :]
        facing = np.einsum("usk,sk->us", diff, self.normal) > 0.0
        dxy = users[:, None, :2] - self.pos[None, :, :2]
        dist_xy = np.hypot(dxy[:, :, 0], dxy[:, :, 1])
        in_range = dist_xy <= params.r_max
        self.d_ur = np.linalg.norm(users[:, None, :] - self.pos[None, :, :], axis=2)

        candidate = facing & in_range
        los = np.zeros((n_u, n_s), dtype=bool)
        pairs = np.argwhere(candidate)
        if pairs.size:
            a_pts = users[pairs[:, 0]]
            b_pts = self.pos[pairs[:, 1]]
            excl = self.building_of[pairs[:, 1]]
            blocked = _blocked_chunked(a_pts, b_pts, self.builds, excl)
            los[pairs[:, 0], pairs[:, 1]] = ~blocked
        self.user_ok = candidate & los

    def satellite_ok(self, sat_xyz: np.ndarray):
        """Facing + LoS mask and site-satellite distances for one satellite."""
        n_s = self.pos.shape[0]
        if n_s == 0:
            return np.zeros(0, dtype=bool), np.zeros(0)
        facing = (self.normal @ sat_xyz - np.einsum("sk,sk->s", self.normal,
                                                    self.anchor)) > 0.0
        d_rs = np.linalg.norm(sat_xyz[None, :] - self.pos, axis=1)
        ok = facing.copy()
        if facing.any():
            rows = np.where(facing)[0]
            blocked = _blocked_chunked(self.pos[rows],
                                       np.broadcast_to(sat_xyz, (rows.size, 3)),
                                       self.builds, self.building_of[rows])
            ok[rows] = ~blocked
        return ok, d_rs


# ---------------------------------------------------------------------------
# Power matrices
# ---------------------------------------------------------------------------

@dataclass
class PowerMatrix:
    """Received powers for one satellite position: rows are NLoS users."""

    sat_index: int
    nlos_user_ids: np.ndarray       # (L_k,)
    powers: np.ndarray              # (L_k, N_B, 4), watts


@dataclass
class PowerMatrixSet:
    n_buildings: int
    per_satellite: list = field(default_factory=list)

    @property
    def total_nlos(self) -> int:
        return sum(len(pm.nlos_user_ids) for pm in self.per_satellite)

    def stacked(self) -> np.ndarray:
        """All NLoS rows stacked into one (R, N_B*4) matrix."""
        if not self.per_satellite:
            return np.zeros((0, self.n_buildings * 4))
        mats = [pm.powers.reshape(len(pm.nlos_user_ids), -1)
                for pm in self.per_satellite]
        return (np.vstack(mats) if mats
                else np.zeros((0, self.n_buildings * 4)))


def build_power_matrices(sats, scene, params: ChannelParams,
                         table: SiteTable = None) -> PowerMatrixSet:
    """W_l^k matrices for every satellite position and NLoS user.

    Entry (i, j) is the received power through an RIS on facet j of
    building i, or zero when any of the link conditions fails.
    """
    if table is None:
        table = SiteTable(scene, params)
    n_b = table.n_buildings
    if table.site_index.size != 4 * n_b:
        raise ValueError("build_power_matrices requires a full site table")
    d_const = cascade_constant(params)
    user_ids = np.array([u.id for u in scene.users], dtype=int)
    id_to_row = {int(uid): r for r, uid in enumerate(user_ids)}

    out = PowerMatrixSet(n_buildings=n_b)
    for k, s in enumerate(sats):
        part = classify_users(s, scene)
        nlos = part.nlos_ids
        if nlos.size == 0:
            out.per_satellite.append(PowerMatrix(
                sat_index=k, nlos_user_ids=nlos,
                powers=np.zeros((0, n_b, 4))))
            continue
        sat = satellite_xyz(s, scene)
        sat_ok, d_rs = table.satellite_ok(sat)
        rows = np.array([id_to_row[int(u)] for u in nlos])
        ok = table.user_ok[rows] & sat_ok[None, :]
        with np.errstate(divide="ignore"):
            w = params.p_t * d_const / (table.d_ur[rows] * d_rs[None, :]) ** 2
        w = np.where(ok, w, 0.0)
        powers = np.zeros((nlos.size, n_b * 4))
        powers[:, table.site_index] = w
        out.per_satellite.append(PowerMatrix(
            sat_index=k, nlos_user_ids=nlos,
            powers=powers.reshape(nlos.size, n_b, 4)))
    return out


def coverage_for_mask(sats, scene, params: ChannelParams, mask_entries,
                      table: SiteTable = None) -> float:
    """Covered-fraction objective of a fixed deployment mask.

    Equivalent to building the full power matrices and applying the
    objective, but only the deployed site columns are evaluated.
    """
    mask = np.asarray(mask_entries, dtype=bool)
    deployed = np.flatnonzero(mask.reshape(-1))
    if table is None:
        table = SiteTable(scene, params, site_subset=deployed)
        cols = np.arange(deployed.size)
    else:
        pos = {int(s): c for c, s in enumerate(table.site_index)}
        if any(int(s) not in pos for s in deployed):
            raise ValueError("site table does not cover the deployed sites")
        cols = np.array([pos[int(s)] for s in deployed], dtype=int)
    d_const = cascade_constant(params)
    user_ids = np.array([u.id for u in scene.users], dtype=int)
    id_to_row = {int(uid): r for r, uid in enumerate(user_ids)}

    covered = 0
    total = 0
    for s in sats:
        part = classify_users(s, scene)
        nlos = part.nlos_ids
        total += nlos.size
        if nlos.size == 0 or deployed.size == 0:
            continue
        sat = satellite_xyz(s, scene)
        sat_ok, d_rs = table.satellite_ok(sat)
        rows = np.array([id_to_row[int(u)] for u in nlos])
        ok = table.user_ok[np.ix_(rows, cols)] & sat_ok[None, cols]
        with np.errstate(divide="ignore"):
            w = (params.p_t * d_const
                 / (table.d_ur[np.ix_(rows, cols)] * d_rs[None, cols]) ** 2)
        received = np.where(ok, w, 0.0).sum(axis=1)
        covered += int(np.count_nonzero(received > params.epsilon))
    return covered / total if total else 0.0


def save_power_matrices(pms: PowerMatrixSet, path) -> None:
    """Sparse CSV of nonzero entries: k, user_id, building_id, facet_id, power_watts."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "user_id", "building_id", "facet_id", "power_watts"])
        for pm in pms.per_satellite:
            nz = np.argwhere(pm.powers > 0.0)
            for l, i, j in nz:
                w.writerow([pm.sat_index, int(pm.nlos_user_ids[l]), int(i),
                            int(j) + 1, f"{pm.powers[l, i, j]:.17g}"])
