"""Experiment configuration: INI-style key-value files.

Every key has a default matching the 1 km² urban scenario, so an empty file
is a valid configuration.  Convenience units: building density is given per
km², satellite altitude in km and the minimum elevation in degrees; all
in-memory values are SI (meters, radians, watts).
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .channel import ChannelParams
from .opt import PgaParams
from .satellites import DomeConfig
from .scene import SceneConfig


@dataclass
class ExperimentConfig:
    scene: SceneConfig = field(default_factory=SceneConfig)
    channel: ChannelParams = field(default_factory=ChannelParams)
    dome: DomeConfig = field(default_factory=DomeConfig)
    pga: PgaParams = field(default_factory=PgaParams)
    master_seed: int = 0
    gamma: float = 0.5
    gamma_list: list = field(default_factory=lambda: [0.1, 0.25, 0.5, 0.75, 1.0])
    k_train: int = 30
    n_test_sets: int = 5
    test_set_size: int = 30
    n_random_baseline: int = 20
    train_test_slack: float = 0.05
    bound_grid_size: int = 4096
    # fig3: small-instance exhaustive comparison
    fig3_elevations_deg: list = field(default_factory=lambda: [30.0, 45.0, 60.0, 75.0])
    fig3_n_buildings: int = 8
    fig3_area: float = 800.0
    fig3_gamma: float = 0.5
    fig3_pga: PgaParams = field(default_factory=lambda: PgaParams(
        n_p=4, s_p=30, i=5, n_m=7, e1=4, e2=2))
    # fig4: deployment ratio x building density sweep
    fig4_densities_per_km2: list = field(default_factory=lambda: [25.0, 50.0, 100.0])
    fig4_pga: PgaParams = field(default_factory=lambda: PgaParams(
        n_p=4, s_p=30, i=10, n_m=8, e1=3, e2=1))
    # fig5: train/test versus number of traversed positions
    fig5_k_list: list = field(default_factory=lambda: [5, 10, 30, 100])
    fig5_gamma: float = 0.5


def _floats(raw: str) -> list:
    return [float(tok) for tok in raw.replace(",", " ").split()]


def _ints(raw: str) -> list:
    return [int(tok) for tok in raw.replace(",", " ").split()]


def _scene_from(sec) -> SceneConfig:
    lam_km2 = sec.getfloat("lambda_b_per_km2", 16.0)
    return SceneConfig(
        area_x=sec.getfloat("area_x", 1000.0),
        area_y=sec.getfloat("area_y", 1000.0),
        lambda_b_prime=lam_km2 * 1e-6,
        l_min=sec.getfloat("l_min", 30.0), l_max=sec.getfloat("l_max", 40.0),
        w_min=sec.getfloat("w_min", 30.0), w_max=sec.getfloat("w_max", 40.0),
        h_min=sec.getfloat("h_min", 80.0), h_max=sec.getfloat("h_max", 120.0),
        n1=sec.getint("n1", 30), n2=sec.getint("n2", 30),
        seed=sec.getint("seed", 0),
    )


def _channel_from(sec) -> ChannelParams:
    return ChannelParams(
        p_t=sec.getfloat("p_t", 110.0),
        g_t=sec.getfloat("g_t", 1e5),
        g_r=sec.getfloat("g_r", 20.0),
        g=sec.getfloat("g", 10.0),
        m=sec.getint("m", 1024),
        n=sec.getint("n", 1024),
        d_x=sec.getfloat("d_x", 0.075),
        d_y=sec.getfloat("d_y", 0.075),
        f_c=sec.getfloat("f_c", 2e9),
        a=sec.getfloat("a", 0.8),
        epsilon=sec.getfloat("epsilon", 1e-3),
        r_max=sec.getfloat("r_max", 500.0),
    )


def _dome_from(sec) -> DomeConfig:
    return DomeConfig(
        h_s=sec.getfloat("h_s_km", 600.0) * 1e3,
        theta_min=math.radians(sec.getfloat("theta_min_deg", 30.0)),
        k=sec.getint("k", 30),
    )


def _pga_from(sec, defaults: PgaParams) -> PgaParams:
    return PgaParams(
        n_p=sec.getint("n_p", defaults.n_p),
        s_p=sec.getint("s_p", defaults.s_p),
        i=sec.getint("i", defaults.i),
        n_m=sec.getint("n_m", defaults.n_m),
        e1=sec.getint("e1", defaults.e1),
        e2=sec.getint("e2", defaults.e2),
        crossover_rate=sec.getfloat("crossover_rate", defaults.crossover_rate),
        mutation_rate=sec.getfloat("mutation_rate", defaults.mutation_rate)
        if "mutation_rate" in sec else defaults.mutation_rate,
        seed=sec.getint("seed", defaults.seed),
    )


def load_config(path=None) -> ExperimentConfig:
    """Parse an INI experiment configuration; missing keys take defaults."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path is not None:
        with open(path) as fh:
            parser.read_file(fh)
    for name in ("experiment", "scene", "channel", "dome", "pga",
                 "fig3", "fig4", "fig5"):
        if not parser.has_section(name):
            parser.add_section(name)

    exp = parser["experiment"]
    base = ExperimentConfig()
    cfg = ExperimentConfig(
        scene=_scene_from(parser["scene"]),
        channel=_channel_from(parser["channel"]),
        dome=_dome_from(parser["dome"]),
        pga=_pga_from(parser["pga"], base.pga),
        master_seed=exp.getint("master_seed", 0),
        gamma=exp.getfloat("gamma", 0.5),
        gamma_list=_floats(exp.get("gamma_list", "0.1 0.25 0.5 0.75 1.0")),
        k_train=exp.getint("k_train", 30),
        n_test_sets=exp.getint("n_test_sets", 5),
        test_set_size=exp.getint("test_set_size", 30),
        n_random_baseline=exp.getint("n_random_baseline", 20),
        train_test_slack=exp.getfloat("train_test_slack", 0.05),
        bound_grid_size=exp.getint("bound_grid_size", 4096),
    )
    f3 = parser["fig3"]
    cfg.fig3_elevations_deg = _floats(f3.get("elevations_deg", "30 45 60 75"))
    cfg.fig3_n_buildings = f3.getint("n_buildings", 8)
    cfg.fig3_area = f3.getfloat("area", 800.0)
    cfg.fig3_gamma = f3.getfloat("gamma", 0.5)
    cfg.fig3_pga = _pga_from(f3, base.fig3_pga)
    f4 = parser["fig4"]
    cfg.fig4_densities_per_km2 = _floats(f4.get("densities_per_km2", "25 50 100"))
    cfg.fig4_pga = _pga_from(f4, base.fig4_pga)
    f5 = parser["fig5"]
    cfg.fig5_k_list = _ints(f5.get("k_list", "5 10 30 100"))
    cfg.fig5_gamma = f5.getfloat("gamma", 0.5)
    return cfg
