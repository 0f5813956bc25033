"""Satellite position generators for the dome-shaped admissible region.

The dome is realized as a constant-altitude disk: positions sit at height
h_s with horizontal offset rho <= h_s * cot(theta_min) from the ground
area's center, so the elevation angle seen from the center is >= theta_min
everywhere on the disk.  Training sets use the deterministic sunflower
(Fibonacci) lattice; test sets are area-uniform random draws.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

GOLDEN_ANGLE = 2.0 * math.pi * (1.0 - 1.0 / ((1.0 + math.sqrt(5.0)) / 2.0))


@dataclass(frozen=True)
class DomeConfig:
    h_s: float = 600e3        # satellite altitude (m)
    theta_min: float = math.radians(30.0)
    k: int = 30               # training positions

    def __post_init__(self):
        if not 0.0 < self.theta_min < 0.5 * math.pi:
            raise ValueError("theta_min must be in (0, pi/2)")
        if self.h_s <= 0:
            raise ValueError("h_s must be positive")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    @property
    def rho_max(self) -> float:
        return self.h_s / math.tan(self.theta_min)


@dataclass(frozen=True)
class SatellitePosition:
    """x, y are horizontal offsets from the ground area's center; z = h_s."""

    x: float
    y: float
    z: float

    @property
    def elevation(self) -> float:
        rho = math.hypot(self.x, self.y)
        return 0.5 * math.pi if rho == 0.0 else math.atan(self.z / rho)


def fibonacci_dome(cfg: DomeConfig) -> list:
    """K sunflower-lattice points on the admissible disk, deterministic.

    rho_i = rho_max * sqrt((i + 0.5) / K), phi_i = i * golden angle.
    """
    out = []
    for i in range(cfg.k):
        rho = cfg.rho_max * math.sqrt((i + 0.5) / cfg.k)
        phi = i * GOLDEN_ANGLE
        out.append(SatellitePosition(x=rho * math.cos(phi),
                                     y=rho * math.sin(phi), z=cfg.h_s))
    return out


def random_dome(n: int, cfg: DomeConfig, rng: np.random.Generator) -> list:
    """n area-uniform random points on the admissible disk."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = rng.random(n)
    v = rng.random(n)
    rho = cfg.rho_max * np.sqrt(u)
    phi = 2.0 * math.pi * v
    return [SatellitePosition(x=float(r * math.cos(p)), y=float(r * math.sin(p)),
                              z=cfg.h_s)
            for r, p in zip(rho, phi)]


def edge_position(azimuth: float, cfg: DomeConfig) -> SatellitePosition:
    """Position exactly at the dome edge: elevation == theta_min."""
    rho = cfg.rho_max
    return SatellitePosition(x=rho * math.cos(azimuth), y=rho * math.sin(azimuth),
                             z=cfg.h_s)


def save_positions(positions, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "x", "y", "z"])
        for k, s in enumerate(positions):
            w.writerow([k, f"{s.x:.17g}", f"{s.y:.17g}", f"{s.z:.17g}"])
