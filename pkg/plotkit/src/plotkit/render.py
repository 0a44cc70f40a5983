"""Renderers for the five plot kinds. All output is static PNG/SVG."""

import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from plotkit.schemas import (COEFFS_COLUMNS, FIELD_COLUMNS,
                             IDENTITIES_COLUMNS, MSD_COLUMNS,
                             RESIDUALS_COLUMNS, SchemaError, field_grid,
                             load_table)

DENSITY_COLUMNS = ("rho", "rho_a", "rho_p")


def _ds_cubic(alpha):
    gamma = np.pi / 2 - 1
    a = np.asarray(alpha, dtype=float)
    return (1 - a) * (1 - gamma * a
                      + gamma * (2 * gamma - 1) / (2 * gamma + 1) * a ** 2)


def _save(fig, out_path):
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def plot_heatmap(csv_path, out_path, column="rho", title=None):
    rows = load_table(csv_path, FIELD_COLUMNS)
    n, grid = field_grid(rows, column)
    if column in DENSITY_COLUMNS:
        if float(grid.max()) > 1.0 + 1e-3:
            warnings.warn(f"{column} exceeds 1 + 1e-3 "
                          f"(max {grid.max():.4f}): exclusion cap violated",
                          stacklevel=2)
        vmin, vmax = 0.0, 1.0
    else:
        vmin = vmax = None
    fig, ax = plt.subplots(figsize=(5, 4.2))
    im = ax.imshow(grid.T, origin="lower", extent=(0, 1, 0, 1),
                   vmin=vmin, vmax=vmax, cmap="viridis",
                   interpolation="nearest")
    fig.colorbar(im, ax=ax, label=column)
    ax.set_xlabel("$u_1$")
    ax.set_ylabel("$u_2$")
    ax.set_title(title or f"{column} ({n}x{n} cells)")
    _save(fig, out_path)


def plot_quiver(csv_path, out_path, title=None):
    rows = load_table(csv_path, FIELD_COLUMNS)
    n, rho_a = field_grid(rows, "rho_a")
    _, px = field_grid(rows, "px")
    _, py = field_grid(rows, "py")
    u = (np.arange(n) + 0.5) / n
    u1, u2 = np.meshgrid(u, u, indexing="ij")
    fig, ax = plt.subplots(figsize=(5, 4.2))
    im = ax.imshow(rho_a.T, origin="lower", extent=(0, 1, 0, 1),
                   vmin=0.0, vmax=1.0, cmap="Greys", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="rho_a")
    ax.quiver(u1, u2, px, py, color="tab:red", scale_units="xy",
              angles="xy")
    ax.set_xlabel("$u_1$")
    ax.set_ylabel("$u_2$")
    ax.set_title(title or "active polarization")
    _save(fig, out_path)


def plot_msd(csv_path, out_path, coeffs_path=None, title=None):
    rows = load_table(csv_path, MSD_COLUMNS)
    alphas = np.array([r["alpha"] for r in rows])
    d_hat = np.array([r["d_hat"] for r in rows])
    err = np.array([r["msd_stderr"] / (4 * r["t"]) if r["t"] > 0 else 0.0
                    for r in rows])
    fig, ax = plt.subplots(figsize=(5, 4))
    if coeffs_path is not None:
        ref = load_table(coeffs_path, COEFFS_COLUMNS)
        ax.plot([r["alpha"] for r in ref], [r["d_s"] for r in ref],
                "-", color="tab:blue", label="cubic $d_s$ (table)")
    else:
        grid = np.linspace(0, 1, 256)
        ax.plot(grid, _ds_cubic(grid), "-", color="tab:blue",
                label="cubic $d_s$")
    ax.errorbar(alphas, d_hat, yerr=err, fmt="o", color="tab:orange",
                capsize=3, label=r"MSD estimate $\hat d_s$")
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel(r"$d_s(\alpha)$")
    ax.set_xlim(0, 1)
    ax.legend()
    ax.set_title(title or "tagged-particle self-diffusion")
    _save(fig, out_path)


def plot_convergence(csv_path, out_path, species="a", title=None):
    rows = load_table(csv_path, RESIDUALS_COLUMNS)
    rows = [r for r in rows if r["species"] == species]
    if not rows:
        raise SchemaError(f"no rows for species {species!r}")
    eps_values = sorted({r["eps"] for r in rows})
    fig, axes = plt.subplots(1, len(eps_values),
                             figsize=(4.5 * len(eps_values), 4),
                             squeeze=False)
    for k, eps in enumerate(eps_values):
        ax = axes[0][k]
        sub = [r for r in rows if r["eps"] == eps]
        for fn in sorted({r["test_fn"] for r in sub}):
            pts = sorted((r["n"], r["resid_mean"], r["resid_stderr"])
                         for r in sub if r["test_fn"] == fn)
            ns = [p[0] for p in pts]
            means = [max(p[1], 1e-300) for p in pts]
            errs = [p[2] for p in pts]
            ax.errorbar(ns, means, yerr=errs, marker="o", capsize=3,
                        label=fn)
        ax.set_xscale("log", base=2)
        ax.set_yscale("log")
        ax.set_xlabel("$N$")
        ax.set_ylabel("weak residual")
        ax.set_title(f"$\\varepsilon$ = {eps:g}")
        ax.legend(fontsize=6)
    fig.suptitle(title or f"empirical weak residuals (species {species})")
    _save(fig, out_path)


def plot_identity_table(csv_path, out_path, top=20, title=None):
    rows = load_table(csv_path, IDENTITIES_COLUMNS)
    rows = sorted(rows, key=lambda r: -r["abs_err"])[:top]
    cells = [[r["identity_id"][:48], int(r["l"]), int(r["Ka"]),
              int(r["Kp"]), f"{r['abs_err']:.2e}"] for r in rows]
    fig, ax = plt.subplots(figsize=(8, 0.35 * (len(cells) + 2)))
    ax.axis("off")
    table = ax.table(
        cellText=cells,
        colLabels=["identity | witness", "l", "Ka", "Kp", "|err|"],
        loc="center", cellLoc="left")
    table.auto_set_font_size(False)
    table.set_fontsize(7)
    table.auto_set_column_width(range(5))
    ax.set_title(title or "worst canonical-identity errors")
    _save(fig, out_path)
