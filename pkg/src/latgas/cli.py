"""Command-line entry point: simulation, analysis and verification runs.

Subcommands: simulate, pde, msd, coeffs, identities, gap, converge.
Each reads an optional flat key=value config file (strict schema) plus
the global flags --config/--out/--seed/--threads, and writes CSV files
with a JSON manifest into the output directory.
"""

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from latgas import convergence, kmc, micro, pde, transport
from latgas.config import RunConfig, SCHEMAS, default_config, load_config
from latgas.sampling import mollified_fields, sample_initial


def _make_config(args):
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out"] = args.out
    if args.config:
        return load_config(args.config, args.subcommand, overrides)
    return default_config(args.subcommand, **overrides)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def cmd_simulate(cfg):
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(cfg["seed"]))
    cfg0 = sample_initial(cfg.profile(), cfg["n"], rng)
    params = cfg.sim_params()
    times = list(np.linspace(0.0, cfg["t_end"], cfg["frames"]))
    paths = []
    t0 = time.time()

    def observer(t, snapshot):
        field = mollified_fields(snapshot, cfg["eps"], cfg["n_theta"])
        path = os.path.join(out, f"t_{len(paths)}.csv")
        field.to_csv(path)
        paths.append(path)

    _, clock = kmc.run(cfg0, params, observer_times=times, observer=observer)
    run_info = {"params": {"n": cfg["n"], "d_t": cfg["d_t"], "v0": cfg["v0"],
                           "d_r": cfg["d_r"], "t_end": cfg["t_end"]},
                "seed": cfg["seed"], "observer_times": times,
                "event_count": clock.event_count,
                "wall_time": time.time() - t0}
    with open(os.path.join(out, "run.json"), "w") as fh:
        json.dump(run_info, fh, indent=2, sort_keys=True)
        fh.write("\n")
    convergence.emit_manifest(cfg, out,
                              paths + [os.path.join(out, "run.json")])
    print(f"simulate: {clock.event_count} events, "
          f"{len(paths)} frames -> {out}")
    return 0


def cmd_pde(cfg):
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    grid = pde.PdeGrid(cfg["grid"], cfg["n_theta"])
    fs = pde.from_profile(cfg.profile(), grid)
    params = kmc.SimParams(n=max(grid.g, 4), d_t=cfg["d_t"], v0=cfg["v0"],
                           d_r=cfg["d_r"], t_end=cfg["t_end"],
                           seed=cfg["seed"])
    times = list(np.linspace(0.0, cfg["t_end"], cfg["frames"]))
    frames, _ = pde.solve(fs, cfg["t_end"], params, frame_times=times,
                          llf=bool(cfg["llf"]))
    paths = []
    for k, frame in enumerate(frames):
        path = os.path.join(out, f"t_{k}.csv")
        _emit_pde_frame(frame, path)
        paths.append(path)
    convergence.emit_manifest(cfg, out, paths)
    print(f"pde: {len(paths)} frames -> {out}")
    return 0


def _emit_pde_frame(frame, path):
    """Write a FieldState using the EmpiricalField CSV schema."""
    g = frame.grid.g
    n_theta = frame.grid.n_theta
    dth = frame.grid.dtheta
    rho, rho_a, rho_p, pol = pde.moments(frame)
    header = ["cell_x", "cell_y", "rho", "rho_a", "rho_p", "px", "py"]
    header += [f"h_a_{k}" for k in range(n_theta)]
    header += [f"h_p_{k}" for k in range(n_theta)]
    rows = []
    for i in range(g):
        for j in range(g):
            row = [i, j, float(rho[i, j]), float(rho_a[i, j]),
                   float(rho_p[i, j]), float(pol[i, j, 0]),
                   float(pol[i, j, 1])]
            row += [float(v) for v in frame.f_a[i, j] * dth]
            row += [float(v) for v in frame.f_p[i, j] * dth]
            rows.append(row)
    _write_csv(path, header, rows)


def cmd_msd(cfg):
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    rows = []
    for alpha in cfg["alphas"]:
        mean, stderr = transport.estimate_ds_msd(
            alpha, cfg["side"], cfg["t_max"], cfg["replicas"], cfg["seed"])
        rows.append([alpha, cfg["t_max"], mean * 4 * cfg["t_max"],
                     stderr * 4 * cfg["t_max"], mean])
        print(f"msd: alpha={alpha:g} d_hat={mean:.4f} "
              f"cubic={transport.d_s(alpha):.4f}")
    path = os.path.join(out, "msd.csv")
    _write_csv(path, ["alpha", "t", "msd_mean", "msd_stderr", "d_hat"], rows)
    convergence.emit_manifest(cfg, out, [path])
    return 0


def cmd_coeffs(cfg):
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    alphas = np.linspace(0.0, 1.0, cfg["grid_points"])
    rows = [[float(a), float(transport.d_s(a)), float(transport.big_d(a)),
             float(transport.s_coeff(a))] for a in alphas]
    path = os.path.join(out, "coeffs.csv")
    _write_csv(path, ["alpha", "d_s", "D", "s"], rows)
    convergence.emit_manifest(cfg, out, [path])
    print(f"coeffs: {len(rows)} rows -> {path}")
    return 0


def _angles_hash(ks):
    text = repr((ks.theta_a, ks.theta_p))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def cmd_identities(cfg):
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    rows = []
    for ks in micro.admissible_states_l1(cfg["max_particles"]):
        for rep in micro.check_moment_identities(ks, np.cos, np.sin):
            rows.append([rep["identity"] + "|" + rep["witness"], ks.l,
                         ks.k_a, ks.k_p, _angles_hash(ks),
                         float(rep["lhs"]), float(rep["rhs"]),
                         float(rep["abs_err"])])
    path = os.path.join(out, "identities.csv")
    _write_csv(path, ["identity_id", "l", "Ka", "Kp", "angles_hash",
                      "lhs", "rhs", "abs_err"], rows)
    convergence.emit_manifest(cfg, out, [path])
    worst = max(r[-1] for r in rows)
    print(f"identities: {len(rows)} cases, worst |err| = {worst:.3e}")
    return 0 if worst < 1e-12 else 1


def cmd_gap(cfg):
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    rows = []
    for l in cfg["l_values"]:
        ks = micro.CanonicalState(l, (0.5, 1.1), (2.2,))
        t0 = time.time()
        gm = micro.build_generator(ks)
        gap = micro.spectral_gap(gm)
        rows.append([l, ks.k_a, ks.k_p, float(gap),
                     gm.minus_l.shape[0], float(time.time() - t0)])
        print(f"gap: l={l} states={gm.minus_l.shape[0]} gap={gap:.4f}")
    path = os.path.join(out, "gap.csv")
    _write_csv(path, ["l", "Ka", "Kp", "gap", "states", "seconds"], rows)
    convergence.emit_manifest(cfg, out, [path])
    return 0 if all(r[3] > 0 for r in rows) else 1


def cmd_converge(cfg):
    out = cfg["out"]
    t0 = time.time()

    def progress(n, eps, r):
        if r % 10 == 9:
            print(f"converge: N={n} eps={eps:g} replica {r + 1}"
                  f"/{cfg['replicas']} ({time.time() - t0:.0f}s)")

    report = convergence.run_convergence(cfg, progress=progress)
    convergence.emit(report, cfg, out)
    print(f"converge: report -> {out} ({time.time() - t0:.0f}s)")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "pde": cmd_pde,
    "msd": cmd_msd,
    "coeffs": cmd_coeffs,
    "identities": cmd_identities,
    "gap": cmd_gap,
    "converge": cmd_converge,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="latgas",
        description="Active-passive lattice gas: simulation and verification")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None,
                       help="flat key=value config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1,
                       help="accepted for interface stability; "
                            "computation is single-process")
    args = parser.parse_args(argv)
    try:
        cfg = _make_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _COMMANDS[args.subcommand](cfg)


if __name__ == "__main__":
    sys.exit(main())
