"""Hydrodynamic-convergence experiment: KMC replicas against the PDE.

For each lattice size N the experiment runs R independent replicas of
the microscopic dynamics from the same initial profile, extracts
mollified empirical fields at the frame times, and compares them with
the PDE solution: per-frame L1 distances of the replica-mean densities
and per-test-function empirical weak residuals with standard errors.
"""

import csv
import hashlib
import json
import math
import os
import subprocess
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from latgas import kmc, pde
from latgas.config import config_text
from latgas.sampling import mollified_fields, sample_initial


@dataclass
class ConvergenceReport:
    """Aggregated experiment results plus reproducibility metadata."""

    seed_base: int
    replicas: int
    frame_times: list
    # rows: dicts with keys n, eps, test_fn, species, resid_mean, resid_stderr
    residual_rows: list = field(default_factory=list)
    # rows: dicts with keys n, eps, t, species, l1
    l1_rows: list = field(default_factory=list)


def _pde_reference(cfg, frame_times):
    grid = pde.PdeGrid(cfg["grid"], cfg["n_theta"])
    fs0 = pde.from_profile(cfg.profile(), grid)
    params = cfg.sim_params(n=max(cfg["n_list"]))
    frames, _ = pde.solve(fs0, frame_times[-1], params,
                          frame_times=frame_times)
    return frames


def _interp_periodic(values, u1, u2, g):
    """Bilinear periodic interpolation of cell-centered values at (u1, u2)."""
    x = u1 * g - 0.5
    y = u2 * g - 0.5
    i0 = np.floor(x).astype(int)
    j0 = np.floor(y).astype(int)
    fx = x - i0
    fy = y - j0
    i0 %= g
    j0 %= g
    i1 = (i0 + 1) % g
    j1 = (j0 + 1) % g
    return ((1 - fx) * (1 - fy) * values[i0, j0]
            + fx * (1 - fy) * values[i1, j0]
            + (1 - fx) * fy * values[i0, j1]
            + fx * fy * values[i1, j1])


def pde_density_on_lattice(frame, n, l):
    """PDE rho_a sampled at the N lattice cells, then box-mollified.

    Applying the same sharp-box mollifier as the empirical extraction
    makes the comparison bias cancel to leading order.
    """
    _, rho_a, _, _ = pde.moments(frame)
    u = np.arange(n) / n
    u1, u2 = np.meshgrid(u, u, indexing="ij")
    on_lattice = _interp_periodic(rho_a, u1, u2, frame.grid.g)
    return ndimage.uniform_filter(on_lattice, size=2 * l + 1, mode="wrap")


def run_convergence(cfg, progress=None):
    """Execute the experiment defined by a `converge` RunConfig."""
    frame_times = list(np.linspace(0.0, cfg["t_end"], cfg["frames"]))
    pde_frames = _pde_reference(cfg, frame_times)
    profile = cfg.profile()
    battery = pde.battery()
    report = ConvergenceReport(seed_base=cfg["seed"],
                               replicas=cfg["replicas"],
                               frame_times=frame_times)

    for n in cfg["n_list"]:
        params = cfg.sim_params(n=n)
        replica_seqs = np.random.SeedSequence((cfg["seed"], n)).spawn(
            cfg["replicas"])
        for eps in cfg["eps_list"]:
            l = int(math.floor(eps * n))
            sum_rho_a = [np.zeros((n, n)) for _ in frame_times]
            resid = np.zeros((cfg["replicas"], len(battery), 2))
            for r in range(cfg["replicas"]):
                rng = np.random.Generator(np.random.PCG64(replica_seqs[r]))
                cfg0 = sample_initial(profile, n, rng)
                run_params = kmc.SimParams(
                    n=n, d_t=params.d_t, v0=params.v0, d_r=params.d_r,
                    t_end=params.t_end,
                    seed=int(replica_seqs[r].generate_state(1)[0]))
                fields = []

                def observer(t, snapshot):
                    fields.append(mollified_fields(snapshot, eps,
                                                   cfg["n_theta"]))
                kmc.run(cfg0, run_params, observer_times=frame_times,
                        observer=observer)
                if len(fields) != len(frame_times):
                    raise RuntimeError(
                        f"replica {r} produced {len(fields)} frames "
                        f"(seed {run_params.seed})")
                for k, f in enumerate(fields):
                    sum_rho_a[k] += f.rho_a
                for hi, h in enumerate(battery):
                    resid[r, hi] = pde.weak_residual_empirical(
                        fields, frame_times, h, params)
                if progress:
                    progress(n, eps, r)
            for k, t in enumerate(frame_times):
                ref = pde_density_on_lattice(pde_frames[k], n, l)
                mean_field = sum_rho_a[k] / cfg["replicas"]
                report.l1_rows.append({
                    "n": n, "eps": eps, "t": t, "species": "a",
                    "l1": float(np.mean(np.abs(mean_field - ref)))})
            for hi, h in enumerate(battery):
                for si, sp in enumerate(("a", "p")):
                    vals = resid[:, hi, si]
                    report.residual_rows.append({
                        "n": n, "eps": eps, "test_fn": h.label(),
                        "species": sp,
                        "resid_mean": float(vals.mean()),
                        "resid_stderr": float(vals.std(ddof=1)
                                              / math.sqrt(len(vals)))})
    return report


# ---------------------------------------------------------------------------
# emission


def _file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _git_describe():
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=10,
            cwd=os.path.dirname(os.path.abspath(__file__)))
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def _write_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v
                        for v in (row[c] for c in columns)])


def emit(report, cfg, out_dir):
    """Write report CSVs plus a manifest with config and content hashes."""
    os.makedirs(out_dir, exist_ok=True)
    files = {}
    res_path = os.path.join(out_dir, "residuals.csv")
    _write_csv(res_path, [
        {**r, "replicas": report.replicas, "seed_base": report.seed_base}
        for r in report.residual_rows],
        ["n", "eps", "test_fn", "species", "replicas", "seed_base",
         "resid_mean", "resid_stderr"])
    files["residuals.csv"] = _file_sha256(res_path)
    l1_path = os.path.join(out_dir, "l1.csv")
    _write_csv(l1_path, [
        {**r, "replicas": report.replicas, "seed_base": report.seed_base}
        for r in report.l1_rows],
        ["n", "eps", "t", "species", "replicas", "seed_base", "l1"])
    files["l1.csv"] = _file_sha256(l1_path)
    text = config_text(cfg)
    manifest = {
        "config": text,
        "config_sha256": hashlib.sha256(text.encode()).hexdigest(),
        "git_describe": _git_describe(),
        "files": files,
    }
    man_path = os.path.join(out_dir, "manifest.json")
    with open(man_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def emit_manifest(cfg, out_dir, files=()):
    """Manifest for subcommands emitting their own files."""
    os.makedirs(out_dir, exist_ok=True)
    text = config_text(cfg)
    manifest = {
        "config": text,
        "config_sha256": hashlib.sha256(text.encode()).hexdigest(),
        "git_describe": _git_describe(),
        "files": {os.path.basename(p): _file_sha256(p) for p in files},
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
