"""Command-line interface.

Every subcommand takes --config (INI file, optional: defaults cover the
1 km² scenario) and --seed (master seed, overrides the config) and writes
CSV artifacts into --out.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

from . import channel as ch
from . import harness
from . import opt
from . import satellites as sat
from . import scene as sc
from .config import load_config


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.master_seed = args.seed
    return cfg


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_scene(args):
    cfg = _load(args)
    scene = harness.make_scene(cfg)
    sc.save_scene(scene, _out(args))
    print(f"scene: {scene.n_buildings} buildings, {scene.n_users} users "
          f"-> {args.out}/buildings.csv, users.csv")


def cmd_matrices(args):
    cfg = _load(args)
    if args.k is not None:
        cfg.k_train = args.k
    dome = cfg.dome
    if args.theta_min_deg is not None:
        dome = dataclasses.replace(dome, theta_min=math.radians(args.theta_min_deg))
    if args.h_s_km is not None:
        dome = dataclasses.replace(dome, h_s=args.h_s_km * 1e3)
    cfg.dome = dataclasses.replace(dome, k=cfg.k_train)
    out = _out(args)
    scene = harness.make_scene(cfg)
    sc.save_scene(scene, out)
    sats = sat.fibonacci_dome(cfg.dome)
    sat.save_positions(sats, out / "satellites.csv")
    power = ch.build_power_matrices(sats, scene, cfg.channel)
    ch.save_power_matrices(power, out / "power_matrices.csv")
    print(f"matrices: {power.total_nlos} NLoS rows over {len(sats)} "
          f"satellite positions -> {args.out}/power_matrices.csv")


def cmd_bound(args):
    cfg = _load(args)
    out = _out(args)
    eps_rows, gamma_rows = harness.bound_curves(cfg)
    harness.write_csv(out / "bound_epsilon.csv", ["epsilon", "coverage"], eps_rows)
    harness.write_csv(out / "bound_gamma.csv", ["gamma", "n_r", "coverage"],
                      gamma_rows)
    print(f"bound: wrote {args.out}/bound_epsilon.csv, bound_gamma.csv")


def cmd_optimize(args):
    cfg = _load(args)
    out = _out(args)
    scene = harness.make_scene(cfg)
    mask, train_cov, report = harness.run_training(cfg, scene=scene)
    opt.save_mask(mask, out / "mask.csv")
    opt.save_history(report, out / "history.csv")
    harness.write_csv(out / "train_summary.csv",
                      ["gamma", "k_train", "train_coverage", "n_evaluations"],
                      [[cfg.gamma, cfg.k_train, train_cov,
                        report.n_evaluations]])
    print(f"optimize: train coverage {train_cov:.4f} with "
          f"{mask.n_deployed} RISs -> {args.out}/mask.csv")


def cmd_evaluate(args):
    cfg = _load(args)
    out = _out(args)
    scene = harness.make_scene(cfg)
    mask = opt.load_mask(args.mask, scene.n_buildings)
    mean, std = harness.run_testing(mask, cfg, scene=scene)
    harness.write_csv(out / "test_results.csv",
                      ["n_test_sets", "test_set_size", "test_coverage_mean",
                       "test_coverage_std"],
                      [[cfg.n_test_sets, cfg.test_set_size, mean, std]])
    print(f"evaluate: test coverage {mean:.4f} +/- {std:.4f} "
          f"-> {args.out}/test_results.csv")


def _fig_cmd(name, runner, header):
    def cmd(args):
        cfg = _load(args)
        out = _out(args)
        rows, report = runner(cfg)
        harness.write_csv(out / f"{name}.csv", header, rows)
        report.save(out / f"{name}_report.csv")
        print(f"{name}: {len(rows)} rows -> {args.out}/{name}.csv")
    return cmd


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="satris",
        description="RIS placement for satellite-to-ground coverage")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="INI configuration file")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (overrides the config)")
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("scene", help="generate and save the urban scene")
    common(p)
    p.set_defaults(func=cmd_scene)

    p = sub.add_parser("matrices",
                       help="scene + training satellites + power matrices")
    common(p)
    p.add_argument("--k", type=int, default=None, help="training positions")
    p.add_argument("--theta-min-deg", type=float, default=None)
    p.add_argument("--h-s-km", type=float, default=None)
    p.set_defaults(func=cmd_matrices)

    p = sub.add_parser("bound", help="coverage lower-bound curves")
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("optimize", help="train a deployment mask (PGA)")
    common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evaluate", help="test a saved mask on random satellite sets")
    common(p)
    p.add_argument("--mask", required=True, help="mask.csv from `optimize`")
    p.set_defaults(func=cmd_evaluate)

    for name, runner, header in (
            ("fig3", harness.run_fig3, harness.FIG3_HEADER),
            ("fig4", harness.run_fig4, harness.FIG4_HEADER),
            ("fig5", harness.run_fig5, harness.FIG5_HEADER)):
        p = sub.add_parser(name, help=f"run the {name} experiment")
        common(p)
        p.set_defaults(func=_fig_cmd(name, runner, header))

    args = parser.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
