"""Random urban scene generation.

Building center points follow a 2D Poisson point process over a rectangular
region; lengths, widths, heights and orientations are independent uniforms.
Overlapping footprints are removed greedily in generation order, then a
regular grid of ground users is laid down and users inside any footprint
are dropped.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SceneConfig:
    """Parameters of the random urban scene.

    Lengths are in meters, the building density ``lambda_b_prime`` is the
    primitive (pre-overlap-removal) PPP intensity in buildings per m².
    """

    area_x: float = 1000.0
    area_y: float = 1000.0
    lambda_b_prime: float = 16e-6
    l_min: float = 30.0
    l_max: float = 40.0
    w_min: float = 30.0
    w_max: float = 40.0
    h_min: float = 80.0
    h_max: float = 120.0
    n1: int = 30
    n2: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.area_x <= 0 or self.area_y <= 0:
            raise ValueError("region dimensions must be positive")
        if self.lambda_b_prime < 0:
            raise ValueError("building density must be non-negative")
        for lo, hi, name in (
            (self.l_min, self.l_max, "length"),
            (self.w_min, self.w_max, "width"),
            (self.h_min, self.h_max, "height"),
        ):
            if lo <= 0 or hi <= 0:
                raise ValueError(f"building {name} range must be positive")
            if lo > hi:
                raise ValueError(f"building {name} range has min > max")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("user grid must be at least 1x1")

    @property
    def area(self) -> float:
        return self.area_x * self.area_y


@dataclass(frozen=True)
class Building:
    """Oriented 3D box: center, footprint dims, height, orientation."""

    id: int
    cx: float
    cy: float
    length: float
    width: float
    height: float
    omega: float  # radians in [0, 2*pi)


@dataclass(frozen=True)
class UserPosition:
    """Ground-level user (z = 0)."""

    id: int
    x: float
    y: float


@dataclass
class Scene:
    buildings: list = field(default_factory=list)
    users: list = field(default_factory=list)
    config: SceneConfig = None

    @property
    def n_buildings(self) -> int:
        return len(self.buildings)

    @property
    def n_users(self) -> int:
        return len(self.users)


def generate_buildings(cfg: SceneConfig, rng: np.random.Generator) -> list:
    """Draw the primitive (possibly overlapping) building set.

    The count is Poisson(lambda_b_prime * area); centers are uniform over
    the region and L, W, H, omega are independent uniforms on their
    configured ranges.
    """
    count = int(rng.poisson(cfg.lambda_b_prime * cfg.area))
    buildings = []
    for i in range(count):
        buildings.append(
            Building(
                id=i,
                cx=float(rng.uniform(0.0, cfg.area_x)),
                cy=float(rng.uniform(0.0, cfg.area_y)),
                length=float(rng.uniform(cfg.l_min, cfg.l_max)),
                width=float(rng.uniform(cfg.w_min, cfg.w_max)),
                height=float(rng.uniform(cfg.h_min, cfg.h_max)),
                omega=float(rng.uniform(0.0, TWO_PI)),
            )
        )
    return buildings


def footprint_corners(b: Building) -> np.ndarray:
    """The four footprint corners of a building, counterclockwise, shape (4, 2)."""
    c, s = math.cos(b.omega), math.sin(b.omega)
    hl, hw = 0.5 * b.length, 0.5 * b.width
    local = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T + np.array([b.cx, b.cy])


def footprints_intersect(a: Building, b: Building) -> bool:
    """Separating-axis test between two oriented rectangular footprints.

    Touching footprints (zero-area contact) count as non-intersecting.
    """
    ca = footprint_corners(a)
    cb = footprint_corners(b)
    for omega in (a.omega, b.omega):
        for phase in (0.0, 0.5 * math.pi):
            axis = np.array([math.cos(omega + phase), math.sin(omega + phase)])
            pa = ca @ axis
            pb = cb @ axis
            if pa.min() >= pb.max() or pb.min() >= pa.max():
                return False
    return True


def remove_overlaps(buildings: list) -> list:
    """Greedy scan in generation order: keep a building iff its footprint
    does not intersect any previously kept footprint.  Ids are re-indexed
    0..N_B-1 in the surviving order."""
    kept = []
    for b in buildings:
        if any(footprints_intersect(b, k) for k in kept):
            continue
        kept.append(b)
    return [
        Building(id=i, cx=b.cx, cy=b.cy, length=b.length, width=b.width,
                 height=b.height, omega=b.omega)
        for i, b in enumerate(kept)
    ]


def point_in_footprint(x: float, y: float, b: Building) -> bool:
    """True iff (x, y) lies within the building footprint (boundary counts
    as inside)."""
    dx, dy = x - b.cx, y - b.cy
    c, s = math.cos(b.omega), math.sin(b.omega)
    lx = c * dx + s * dy
    ly = -s * dx + c * dy
    return abs(lx) <= 0.5 * b.length and abs(ly) <= 0.5 * b.width


def generate_users(cfg: SceneConfig, buildings: list) -> list:
    """n1 x n2 grid at cell centers; grid points inside any footprint
    (boundary inclusive) are removed.  Ids are re-indexed over survivors."""
    xs = (np.arange(cfg.n1) + 0.5) * cfg.area_x / cfg.n1
    ys = (np.arange(cfg.n2) + 0.5) * cfg.area_y / cfg.n2
    users = []
    uid = 0
    for x in xs:
        for y in ys:
            indoor = any(point_in_footprint(x, y, b) for b in buildings)
            if not indoor:
                users.append(UserPosition(id=uid, x=float(x), y=float(y)))
                uid += 1
    return users


def generate_scene(cfg: SceneConfig, rng: np.random.Generator = None) -> Scene:
    """Full scene pipeline: primitive PPP draw, overlap removal, user grid."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    buildings = remove_overlaps(generate_buildings(cfg, rng))
    users = generate_users(cfg, buildings)
    return Scene(buildings=buildings, users=users, config=cfg)


# ---------------------------------------------------------------------------
# CSV serialization: buildings.csv (id,cx,cy,L,W,H,omega), users.csv (id,x,y)
# ---------------------------------------------------------------------------

def save_scene(scene: Scene, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "buildings.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "cx", "cy", "L", "W", "H", "omega"])
        for b in scene.buildings:
            w.writerow([b.id, f"{b.cx:.17g}", f"{b.cy:.17g}", f"{b.length:.17g}",
                        f"{b.width:.17g}", f"{b.height:.17g}", f"{b.omega:.17g}"])
    with open(out / "users.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "x", "y"])
        for u in scene.users:
            w.writerow([u.id, f"{u.x:.17g}", f"{u.y:.17g}"])


def load_scene(in_dir, config: SceneConfig = None) -> Scene:
    out = Path(in_dir)
    buildings = []
    with open(out / "buildings.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            buildings.append(Building(
                id=int(row["id"]), cx=float(row["cx"]), cy=float(row["cy"]),
                length=float(row["L"]), width=float(row["W"]),
                height=float(row["H"]), omega=float(row["omega"])))
    users = []
    with open(out / "users.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            users.append(UserPosition(id=int(row["id"]), x=float(row["x"]),
                                      y=float(row["y"])))
    return Scene(buildings=buildings, users=users, config=config)
