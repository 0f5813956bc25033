"""End-to-end experiment runner.

Reproduces the three headline experiments: the small-instance comparison
against exhaustive search across satellite elevation angles (fig3), the
deployment-ratio x building-density sweep (fig4), and the train/test
behavior versus the number of traversed satellite positions (fig5).  One
master seed pins every random stream (scene, training satellites, each
test set, GA populations), so a rerun reproduces every CSV byte for byte.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bound as bnd
from . import channel as ch
from . import opt
from . import satellites as sat
from . import scene as sc
from .config import ExperimentConfig
from .rng import derive_seed, rng_for


@dataclass
class ExperimentReport:
    """Per-cell bookkeeping for a sweep; timing columns are not covered by
    the byte-determinism guarantee."""

    rows: list = field(default_factory=list)

    def add(self, **kw):
        self.rows.append(kw)

    def save(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if not self.rows:
            path.write_text("")
            return
        keys = list(self.rows[0].keys())
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(keys)
            for r in self.rows:
                w.writerow([_fmt(r.get(k, "")) for k in keys])


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return v


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


# ---------------------------------------------------------------------------
# Scene construction
# ---------------------------------------------------------------------------

def make_scene(cfg: ExperimentConfig) -> sc.Scene:
    rng = rng_for(cfg.master_seed, "scene")
    scene_cfg = dataclasses.replace(cfg.scene, seed=derive_seed(cfg.master_seed,
                                                                "scene"))
    return sc.generate_scene(scene_cfg, rng)


def scene_with_count(scene_cfg: sc.SceneConfig, master_seed: int,
                     n_target: int, max_tries: int = 2000) -> sc.Scene:
    """Scene conditioned on an exact post-removal building count, by
    rejection over one deterministic stream."""
    rng = rng_for(master_seed, "scene")
    for _ in range(max_tries):
        buildings = sc.remove_overlaps(sc.generate_buildings(scene_cfg, rng))
        if len(buildings) == n_target:
            users = sc.generate_users(scene_cfg, buildings)
            return sc.Scene(buildings=buildings, users=users, config=scene_cfg)
    raise RuntimeError(f"could not draw a scene with exactly {n_target} "
                       f"buildings in {max_tries} tries")


def fig3_scene_config(cfg: ExperimentConfig) -> sc.SceneConfig:
    """Small-area variant used for the exhaustive-search comparison."""
    side = cfg.fig3_area
    density = cfg.fig3_n_buildings / (side * side)
    return dataclasses.replace(cfg.scene, area_x=side, area_y=side,
                               lambda_b_prime=density)


# ---------------------------------------------------------------------------
# Bound parameter mapping
# ---------------------------------------------------------------------------

def mean_buildings_in_range(scene: sc.Scene, nlos_ids, r_max: float) -> float:
    """Average number of building centers within the influence radius of an
    NLoS user (the blockage count the lower bound is matched against)."""
    if len(nlos_ids) == 0:
        return 0.0
    users = {u.id: (u.x, u.y) for u in scene.users}
    centers = np.array([[b.cx, b.cy] for b in scene.buildings])
    if centers.size == 0:
        return 0.0
    pts = np.array([users[int(i)] for i in nlos_ids])
    d = np.hypot(pts[:, None, 0] - centers[None, :, 0],
                 pts[:, None, 1] - centers[None, :, 1])
    return float((d <= r_max).sum(axis=1).mean())


def bound_params(cfg: ExperimentConfig, elevation: float, n_bar: float,
                 n_r: int) -> bnd.BoundParams:
    """Map a scenario to the lower-bound inputs.

    The satellite-hop LoS term uses an effective blockable ground track
    E[(H_b - H_r)+] / tan(elevation): a blockage can only obstruct the
    ascending ray while the ray is below the blockage top, so the literal
    horizontal projection of d_rs (~10^6 m, which would zero the bound)
    never applies.  For iid uniform heights E[(H_b - H_r)+] = range / 6.
    """
    s = cfg.scene
    r = cfg.channel.r_max
    lambda_bl = n_bar / (math.pi * r ** 2)
    d_rs = cfg.dome.h_s / math.sin(elevation)
    d_rs_xy = (s.h_max - s.h_min) / 6.0 / math.tan(elevation)
    return bnd.BoundParams(
        lambda_bl=lambda_bl,
        l_bar=0.5 * (s.l_min + s.l_max),
        w_bar=0.5 * (s.w_min + s.w_max),
        h_min=s.h_min, h_max=s.h_max,
        r=r, d_rs=d_rs, d_rs_xy=d_rs_xy,
        p_t=cfg.channel.p_t, d_const=ch.cascade_constant(cfg.channel),
        n_r=max(1, n_r),
    )


def bound_coverage(cfg: ExperimentConfig, elevation: float, n_bar: float,
                   gamma: float) -> float:
    """Coverage bound with N_R = round(gamma * N_bar); zero when no RIS
    fits the budget."""
    n_r = int(round(gamma * n_bar))
    if n_r < 1:
        return 0.0
    bp = bound_params(cfg, elevation, n_bar, n_r)
    pdf = bnd.convolve_n(bnd.single_ris_power_pdf(bp, cfg.bound_grid_size), n_r)
    return bnd.coverage_probability(pdf, cfg.channel.epsilon)


# ---------------------------------------------------------------------------
# Training / testing
# ---------------------------------------------------------------------------

def run_training(cfg: ExperimentConfig, gamma: float = None,
                 scene: sc.Scene = None, pga: opt.PgaParams = None,
                 table: ch.SiteTable = None):
    """Optimize a deployment against the K Fibonacci training positions.

    Returns (mask, train_coverage, FitnessReport).
    """
    gamma = cfg.gamma if gamma is None else gamma
    if scene is None:
        scene = make_scene(cfg)
    dome = dataclasses.replace(cfg.dome, k=cfg.k_train)
    sats = sat.fibonacci_dome(dome)
    if table is None:
        table = ch.SiteTable(scene, cfg.channel)
    power = ch.build_power_matrices(sats, scene, cfg.channel, table)
    if opt.budget(scene.n_buildings, gamma) == 0 or power.total_nlos == 0:
        mask = opt.DeploymentMask.zeros(scene.n_buildings)
        return mask, 0.0, opt.FitnessReport(best_mask=mask, best_fitness=0.0)
    params = pga if pga is not None else cfg.pga
    params = dataclasses.replace(params,
                                 seed=derive_seed(cfg.master_seed, "pga"))
    report = opt.pga_optimize(power, cfg.channel.epsilon, gamma, params)
    return report.best_mask, report.best_fitness, report


def run_testing(mask: opt.DeploymentMask, cfg: ExperimentConfig,
                scene: sc.Scene = None):
    """Coverage of a fixed mask over independent random satellite sets.

    Returns (mean, std) over cfg.n_test_sets sets of cfg.test_set_size
    area-uniform positions.
    """
    if scene is None:
        scene = make_scene(cfg)
    if not opt.is_feasible(mask, 1.0, scene.n_buildings):
        raise ValueError("mask violates the one-RIS-per-building constraint")
    deployed = np.flatnonzero(mask.entries.reshape(-1))
    table = ch.SiteTable(scene, cfg.channel, site_subset=deployed)
    covs = []
    for t in range(cfg.n_test_sets):
        rng = rng_for(cfg.master_seed, f"sats-test-{t}")
        sats = sat.random_dome(cfg.test_set_size, cfg.dome, rng)
        covs.append(ch.coverage_for_mask(sats, scene, cfg.channel,
                                         mask.entries, table))
    covs = np.array(covs)
    return float(covs.mean()), float(covs.std())


def random_baseline(cfg: ExperimentConfig, scene: sc.Scene, sats, gamma: float,
                    n_draws: int = None, role: str = "random-baseline",
                    power: ch.PowerMatrixSet = None) -> float:
    """Mean coverage of uniformly random deployments at the same budget."""
    n_draws = cfg.n_random_baseline if n_draws is None else n_draws
    rng = rng_for(cfg.master_seed, role)
    if power is not None:
        vals = [opt.objective(opt.random_deployment(scene.n_buildings, gamma,
                                                    rng),
                              power, cfg.channel.epsilon)
                for _ in range(n_draws)]
        return float(np.mean(vals))
    vals = []
    for _ in range(n_draws):
        mask = opt.random_deployment(scene.n_buildings, gamma, rng)
        vals.append(ch.coverage_for_mask(sats, scene, cfg.channel, mask.entries))
    return float(np.mean(vals))


# ---------------------------------------------------------------------------
# Figure experiments
# ---------------------------------------------------------------------------

FIG3_HEADER = ["elevation_deg", "pga_coverage", "exhaustive_coverage",
               "random_coverage", "bound_coverage"]
FIG4_HEADER = ["density", "gamma", "optimized_coverage", "random_coverage"]
FIG5_HEADER = ["k_train", "train_coverage", "test_coverage_mean",
               "test_coverage_std"]


def run_fig3(cfg: ExperimentConfig):
    """Edge-satellite elevation sweep on an exhaustively-searchable scene.

    Returns (rows, ExperimentReport); rows follow FIG3_HEADER.
    """
    scene = scene_with_count(fig3_scene_config(cfg), cfg.master_seed,
                             cfg.fig3_n_buildings)
    table = ch.SiteTable(scene, cfg.channel)
    gamma = cfg.fig3_gamma
    rows = []
    report = ExperimentReport()
    for elev_deg in cfg.fig3_elevations_deg:
        elev = math.radians(elev_deg)
        dome = dataclasses.replace(cfg.dome, theta_min=elev, k=1)
        s = sat.edge_position(0.0, dome)
        power = ch.build_power_matrices([s], scene, cfg.channel, table)

        t0 = time.perf_counter()
        exh = opt.exhaustive_search(power, cfg.channel.epsilon, gamma)
        t_exh = time.perf_counter() - t0

        params = dataclasses.replace(
            cfg.fig3_pga, seed=derive_seed(cfg.master_seed, f"pga-fig3-{elev_deg}"))
        t0 = time.perf_counter()
        pga = opt.pga_optimize(power, cfg.channel.epsilon, gamma, params)
        t_pga = time.perf_counter() - t0

        rand_cov = random_baseline(cfg, scene, [s], gamma,
                                   role=f"random-fig3-{elev_deg}", power=power)
        part = ch.classify_users(s, scene)
        n_bar = mean_buildings_in_range(scene, part.nlos_ids, cfg.channel.r_max)
        b_cov = bound_coverage(cfg, elev, n_bar, gamma)

        rows.append([elev_deg, pga.best_fitness, exh.best_fitness,
                     rand_cov, b_cov])
        report.add(elevation_deg=elev_deg, gamma=gamma,
                   pga_evaluations=pga.n_evaluations,
                   exhaustive_evaluations=exh.n_evaluations,
                   pga_seconds=t_pga, exhaustive_seconds=t_exh)
    return rows, report


def run_fig4(cfg: ExperimentConfig):
    """Optimized and random coverage across deployment ratios and building
    densities; K = k_train Fibonacci positions per density."""
    area_km2 = cfg.scene.area * 1e-6
    dome = dataclasses.replace(cfg.dome, k=cfg.k_train)
    sats = sat.fibonacci_dome(dome)
    rows = []
    report = ExperimentReport()
    for density in cfg.fig4_densities_per_km2:
        n_target = int(round(density * area_km2))
        scene_cfg = dataclasses.replace(
            cfg.scene, lambda_b_prime=1.3 * density * 1e-6)
        scene = scene_with_count(scene_cfg, cfg.master_seed, n_target)
        table = ch.SiteTable(scene, cfg.channel)
        power = ch.build_power_matrices(sats, scene, cfg.channel, table)
        warm = None
        for gamma in sorted(cfg.gamma_list):
            t0 = time.perf_counter()
            if opt.budget(scene.n_buildings, gamma) == 0 or power.total_nlos == 0:
                mask = opt.DeploymentMask.zeros(scene.n_buildings)
                pga = opt.FitnessReport(best_mask=mask, best_fitness=0.0)
            else:
                params = dataclasses.replace(
                    cfg.fig4_pga,
                    seed=derive_seed(cfg.master_seed, f"pga-fig4-{density}-{gamma}"))
                pga = opt.pga_optimize(power, cfg.channel.epsilon, gamma,
                                       params, initial_masks=warm)
            warm = [pga.best_mask]
            rand_cov = (random_baseline(cfg, scene, sats, gamma,
                                        role=f"random-fig4-{density}-{gamma}",
                                        power=power)
                        if opt.budget(scene.n_buildings, gamma) else 0.0)
            rows.append([density, gamma, pga.best_fitness, rand_cov])
            report.add(density=density, gamma=gamma,
                       optimized_coverage=pga.best_fitness,
                       random_coverage=rand_cov,
                       pga_evaluations=pga.n_evaluations,
                       wall_time_seconds=time.perf_counter() - t0)
    return rows, report


def run_fig5(cfg: ExperimentConfig):
    """Train/test coverage versus the number of traversed positions."""
    scene = make_scene(cfg)
    table = ch.SiteTable(scene, cfg.channel)
    rows = []
    report = ExperimentReport()
    for k in cfg.fig5_k_list:
        t0 = time.perf_counter()
        cell = dataclasses.replace(cfg, k_train=k)
        mask, train_cov, rep = run_training(cell, gamma=cfg.fig5_gamma,
                                            scene=scene, table=table)
        test_mean, test_std = run_testing(mask, cfg, scene=scene)
        rows.append([k, train_cov, test_mean, test_std])
        report.add(k_train=k, gamma=cfg.fig5_gamma, train_coverage=train_cov,
                   test_coverage_mean=test_mean, test_coverage_std=test_std,
                   pga_evaluations=rep.n_evaluations,
                   wall_time_seconds=time.perf_counter() - t0)
    return rows, report


# ---------------------------------------------------------------------------
# Bound curves (CLI `bound` subcommand)
# ---------------------------------------------------------------------------

def bound_curves(cfg: ExperimentConfig):
    """(epsilon, coverage) and (gamma, N_R, coverage) curves for the seeded
    scene at the dome-edge elevation."""
    scene = make_scene(cfg)
    elev = cfg.dome.theta_min
    s = sat.edge_position(0.0, cfg.dome)
    part = ch.classify_users(s, scene)
    n_bar = mean_buildings_in_range(scene, part.nlos_ids, cfg.channel.r_max)

    eps_rows = []
    n_r = max(1, int(round(cfg.gamma * n_bar)))
    bp = bound_params(cfg, elev, n_bar, n_r)
    pdf = bnd.convolve_n(bnd.single_ris_power_pdf(bp, cfg.bound_grid_size), n_r)
    for eps in np.geomspace(cfg.channel.epsilon / 100.0,
                            cfg.channel.epsilon * 100.0, 41):
        eps_rows.append([float(eps), bnd.coverage_probability(pdf, float(eps))])

    gamma_rows = []
    for gamma in cfg.gamma_list:
        n_r = int(round(gamma * n_bar))
        cov = bound_coverage(cfg, elev, n_bar, gamma)
        gamma_rows.append([gamma, n_r, cov])
    return eps_rows, gamma_rows
