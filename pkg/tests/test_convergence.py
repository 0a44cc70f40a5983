"""Convergence-experiment plumbing: interpolation, mollification, emission."""

import csv
import json
import os

import numpy as np
import pytest

from latgas import pde
from latgas.config import default_config
from latgas.convergence import (_interp_periodic, emit,
                                pde_density_on_lattice, run_convergence)


def test_interp_periodic_reproduces_cell_centers():
    g = 8
    vals = np.random.default_rng(0).random((g, g))
    u = (np.arange(g) + 0.5) / g
    u1, u2 = np.meshgrid(u, u, indexing="ij")
    out = _interp_periodic(vals, u1, u2, g)
    assert np.max(np.abs(out - vals)) < 1e-14


def test_interp_periodic_linear_exactness_on_mode():
    # bilinear interpolation is exact halfway between cell centers for
    # the linear interpolant; check continuity across the seam instead
    g = 16
    u = (np.arange(g) + 0.5) / g
    vals = np.cos(2 * np.pi * u)[:, None] * np.ones((1, g))
    left = _interp_periodic(vals, np.array([0.0]), np.array([0.3]), g)
    right = _interp_periodic(vals, np.array([1.0]), np.array([0.3]), g)
    assert left[0] == pytest.approx(right[0], abs=1e-14)


def test_pde_density_on_lattice_constant_field():
    grid = pde.PdeGrid(16, 4)
    f = np.full((16, 16, 4), 0.25 / (2 * np.pi))
    frame = pde.FieldState(grid, f, np.zeros((16, 16, 4)))
    out = pde_density_on_lattice(frame, 12, 1)
    assert out.shape == (12, 12)
    assert np.max(np.abs(out - 0.25)) < 1e-12


def _tiny_cfg(tmp_seed=0):
    return default_config(
        "converge", n_list=[8, 16], eps_list=[0.25], replicas=3, frames=2,
        grid=16, n_theta=4, t_end=0.01, d_t=1.0, v0=0.5, d_r=1.0,
        seed=tmp_seed, active_family="fourier-mode", active_mass=0.3,
        active_amp=0.3, passive_mass=0.1)


def test_run_convergence_tiny_and_emit(tmp_path):
    cfg = _tiny_cfg()
    report = run_convergence(cfg)
    # 2 N values x 9 battery functions x 2 species
    assert len(report.residual_rows) == 2 * 9 * 2
    assert len(report.l1_rows) == 2 * 2
    assert all(np.isfinite(r["l1"]) for r in report.l1_rows)
    out = str(tmp_path / "conv")
    manifest = emit(report, cfg, out)
    for fname in ("residuals.csv", "l1.csv", "manifest.json"):
        assert os.path.exists(os.path.join(out, fname))
    with open(os.path.join(out, "residuals.csv"), newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["replicas"] == "3"
    assert {r["species"] for r in rows} == {"a", "p"}
    on_disk = json.load(open(os.path.join(out, "manifest.json")))
    assert on_disk["config_sha256"] == manifest["config_sha256"]


def test_run_convergence_reproducible():
    cfg = _tiny_cfg()
    r1 = run_convergence(cfg)
    r2 = run_convergence(cfg)
    for a, b in zip(r1.l1_rows, r2.l1_rows):
        assert a == b
    for a, b in zip(r1.residual_rows, r2.residual_rows):
        assert a == b
