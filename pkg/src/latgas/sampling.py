"""Initial/reference measure samplers and empirical observable extraction."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from latgas.lattice import ACTIVE, EMPTY, PASSIVE, Configuration, TWO_PI

_ANGULAR_QUAD_POINTS = 720


@dataclass
class SpeciesProfile:
    """One species' density profile zeta(u, theta) = rho0(u) * h(theta).

    Spatial families:
      constant      rho0(u) = mass
      fourier-mode  rho0(u) = mass * (1 + amp*cos(2 pi kx u1)*cos(2 pi ky u2))
      gaussian-bump rho0(u) = mass + amp*exp(-d(u, center)^2 / (2 width^2))
                    with d the torus distance
    Angular shape: h(theta) = (1 + ang_amp*cos(ang_mode*theta)) / (2 pi).
    """

    family: str = "constant"
    mass: float = 0.0
    amp: float = 0.0
    kx: int = 1
    ky: int = 0
    center: tuple = (0.5, 0.5)
    width: float = 0.1
    ang_amp: float = 0.0
    ang_mode: int = 1

    def rho0(self, u1, u2):
        u1 = np.asarray(u1, dtype=float)
        u2 = np.asarray(u2, dtype=float)
        if self.family == "constant":
            return np.broadcast_to(np.float64(self.mass), u1.shape).copy()
        if self.family == "fourier-mode":
            return self.mass * (1.0 + self.amp
                                * np.cos(2 * np.pi * self.kx * u1)
                                * np.cos(2 * np.pi * self.ky * u2))
        if self.family == "gaussian-bump":
            d1 = np.minimum(np.abs(u1 - self.center[0]),
                            1.0 - np.abs(u1 - self.center[0]))
            d2 = np.minimum(np.abs(u2 - self.center[1]),
                            1.0 - np.abs(u2 - self.center[1]))
            return self.mass + self.amp * np.exp(
                -(d1 ** 2 + d2 ** 2) / (2.0 * self.width ** 2))
        raise ValueError(f"unknown profile family {self.family!r}")

    def angular_pdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        return (1.0 + self.ang_amp * np.cos(self.ang_mode * theta)) / TWO_PI

    def zeta(self, u1, u2, theta):
        return self.rho0(u1, u2) * self.angular_pdf(theta)


@dataclass
class DensityProfile:
    """Pair of species profiles with the joint admissibility constraint."""

    active: SpeciesProfile
    passive: SpeciesProfile

    def validate(self, check_grid=64):
        """Reject profiles with negative density or total mass above 1."""
        u = (np.arange(check_grid) + 0.5) / check_grid
        u1, u2 = np.meshgrid(u, u, indexing="ij")
        ra = self.active.rho0(u1, u2)
        rp = self.passive.rho0(u1, u2)
        if np.any(ra < -1e-12) or np.any(rp < -1e-12):
            raise ValueError("profile has negative species density")
        if np.any(ra + rp > 1.0 + 1e-12):
            raise ValueError("profile total density exceeds 1")
        for sp in (self.active, self.passive):
            if abs(sp.ang_amp) > 1.0:
                raise ValueError("angular modulation amplitude must be <= 1")


@dataclass
class GrandCanonicalParams:
    """Homogeneous product-measure parameters.

    Angular law per species is either "uniform" or a histogram of
    nonnegative weights over uniform bins on [0, 2 pi).
    """

    alpha_a: float
    alpha_p: float
    law_a: object = "uniform"
    law_p: object = "uniform"

    def validate(self):
        if self.alpha_a < 0 or self.alpha_p < 0:
            raise ValueError("species densities must be nonnegative")
        if self.alpha_a + self.alpha_p > 1.0 + 1e-12:
            raise ValueError("total density exceeds 1")
        for law in (self.law_a, self.law_p):
            if isinstance(law, str):
                if law != "uniform":
                    raise ValueError(f"unknown angular law {law!r}")
            else:
                w = np.asarray(law, dtype=float)
                if np.any(w < 0) or w.sum() <= 0:
                    raise ValueError("histogram weights must be nonnegative "
                                     "with positive sum")


def _inverse_cdf_sample(pdf_values, quantiles):
    """Inverse-CDF sampling of angles from tabulated pdf values.

    pdf_values are the densities at bin midpoints of a uniform grid on
    [0, 2 pi); linear interpolation of the piecewise-constant CDF.
    """
    m = pdf_values.size
    w = pdf_values / pdf_values.sum()
    cdf = np.concatenate([[0.0], np.cumsum(w)])
    cdf[-1] = 1.0
    edges = np.linspace(0.0, TWO_PI, m + 1)
    return np.interp(quantiles, cdf, edges)


def _sample_angles_hist(law, count, rng, quad=_ANGULAR_QUAD_POINTS):
    if count == 0:
        return np.empty(0)
    if isinstance(law, str) and law == "uniform":
        return rng.random(count) * TWO_PI
    w = np.asarray(law, dtype=float)
    return _inverse_cdf_sample(w, rng.random(count))


def sample_initial(profile, n, rng):
    """Draw a Configuration from the site-product measure of `profile`.

    Site x = (i, j) maps to the macroscopic point x/n; occupancy type is
    chosen with probabilities (rho_a(x/n), rho_p(x/n)), and the angle of
    an occupied site is drawn from the site's angular law via
    inverse-CDF on a quadrature grid.
    """
    profile.validate()
    u = np.arange(n) / n
    u1, u2 = np.meshgrid(u, u, indexing="ij")
    ra = np.clip(profile.active.rho0(u1, u2), 0.0, 1.0)
    rp = np.clip(profile.passive.rho0(u1, u2), 0.0, 1.0)
    draw = rng.random((n, n))
    tags = np.zeros((n, n), dtype=np.int8)
    tags[draw < ra] = ACTIVE
    tags[(draw >= ra) & (draw < ra + rp)] = PASSIVE
    angles = np.zeros((n, n), dtype=np.float64)
    grid = (np.arange(_ANGULAR_QUAD_POINTS) + 0.5) / _ANGULAR_QUAD_POINTS * TWO_PI
    for tag, sp in ((ACTIVE, profile.active), (PASSIVE, profile.passive)):
        mask = tags == tag
        cnt = int(mask.sum())
        if cnt:
            pdf = sp.angular_pdf(grid)
            angles[mask] = _inverse_cdf_sample(pdf, rng.random(cnt))
    return Configuration(n, tags, angles)


def sample_grand_canonical(gc, n, rng):
    """Draw a Configuration from the homogeneous product measure."""
    gc.validate()
    draw = rng.random((n, n))
    tags = np.zeros((n, n), dtype=np.int8)
    tags[draw < gc.alpha_a] = ACTIVE
    tags[(draw >= gc.alpha_a) & (draw < gc.alpha_a + gc.alpha_p)] = PASSIVE
    angles = np.zeros((n, n), dtype=np.float64)
    for tag, law in ((ACTIVE, gc.law_a), (PASSIVE, gc.law_p)):
        mask = tags == tag
        angles[mask] = _sample_angles_hist(law, int(mask.sum()), rng)
    return Configuration(n, tags, angles)


def empirical_density(cfg, x, l, species=None, omega=None):
    """Box-averaged density (2l+1)^-2 sum_{y in B_l(x)} w(theta_y) 1{species}.

    species is ACTIVE, PASSIVE or None (type-blind); omega maps angles
    to weights (default: constant 1).
    """
    n = cfg.n
    if 2 * l + 1 > n:
        raise ValueError("box does not fit on the lattice")
    total = 0.0
    ci, cj = x
    for di in range(-l, l + 1):
        for dj in range(-l, l + 1):
            idx = ((ci + di) % n, (cj + dj) % n)
            t = cfg.tags[idx]
            if t == EMPTY:
                continue
            if species is not None and t != species:
                continue
            total += 1.0 if omega is None else float(omega(cfg.angles[idx]))
    return total / (2 * l + 1) ** 2


def _box_mean(arr, size):
    return ndimage.uniform_filter(arr, size=size, mode="wrap")


@dataclass
class EmpiricalField:
    """Mollified per-site fields extracted from a configuration.

    One cell per lattice site; each field value is the average over the
    box of half-width l = floor(eps * n) centered at the site.
    """

    n: int
    eps: float
    l: int
    n_theta: int
    rho_a: np.ndarray
    rho_p: np.ndarray
    pol: np.ndarray          # (n, n, 2), active polarization
    hist_a: np.ndarray       # (n, n, n_theta)
    hist_p: np.ndarray

    @property
    def rho(self):
        return self.rho_a + self.rho_p

    def header(self):
        cols = ["cell_x", "cell_y", "rho", "rho_a", "rho_p", "px", "py"]
        cols += [f"h_a_{k}" for k in range(self.n_theta)]
        cols += [f"h_p_{k}" for k in range(self.n_theta)]
        return cols

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header())
            rho = self.rho
            for i in range(self.n):
                for j in range(self.n):
                    row = [i, j, repr(float(rho[i, j])),
                           repr(float(self.rho_a[i, j])),
                           repr(float(self.rho_p[i, j])),
                           repr(float(self.pol[i, j, 0])),
                           repr(float(self.pol[i, j, 1]))]
                    row += [repr(float(v)) for v in self.hist_a[i, j]]
                    row += [repr(float(v)) for v in self.hist_p[i, j]]
                    writer.writerow(row)

    @classmethod
    def from_csv(cls, path, eps=float("nan"), l=-1):
        data = np.genfromtxt(path, delimiter=",", names=True)
        data = np.atleast_1d(data)
        names = data.dtype.names
        n_theta = sum(1 for c in names if c.startswith("h_a_"))
        n = int(math.isqrt(len(data)))
        if n * n != len(data):
            raise ValueError("field CSV does not describe a square grid")
        def grid(col):
            return np.asarray(data[col], dtype=float).reshape(n, n)
        pol = np.stack([grid("px"), grid("py")], axis=-1)
        hist_a = np.stack([grid(f"h_a_{k}") for k in range(n_theta)], axis=-1)
        hist_p = np.stack([grid(f"h_p_{k}") for k in range(n_theta)], axis=-1)
        return cls(n, eps, l, n_theta, grid("rho_a"), grid("rho_p"),
                   pol, hist_a, hist_p)


def mollified_fields(cfg, eps, n_theta):
    """Extract mollified densities, angular histograms and polarization.

    The mollifier is the sharp indicator box of half-width l = floor(eps*n)
    sites; eps*n must be at least 1.
    """
    n = cfg.n
    l = int(math.floor(eps * n))
    if l < 1:
        raise ValueError("mollifier narrower than one lattice site")
    size = 2 * l + 1
    if size > n:
        raise ValueError("mollifier box does not fit on the lattice")
    act = (cfg.tags == ACTIVE).astype(np.float64)
    pas = (cfg.tags == PASSIVE).astype(np.float64)
    rho_a = _box_mean(act, size)
    rho_p = _box_mean(pas, size)
    pol = np.stack([
        _box_mean(act * np.cos(cfg.angles), size),
        _box_mean(act * np.sin(cfg.angles), size),
    ], axis=-1)
    bins = np.minimum((cfg.angles / TWO_PI * n_theta).astype(np.int64),
                      n_theta - 1)
    hist_a = np.empty((n, n, n_theta))
    hist_p = np.empty((n, n, n_theta))
    for k in range(n_theta):
        sel = bins == k
        hist_a[:, :, k] = _box_mean(act * sel, size)
        hist_p[:, :, k] = _box_mean(pas * sel, size)
    return EmpiricalField(n, eps, l, n_theta, rho_a, rho_p, pol,
                          hist_a, hist_p)


def full_cluster_fraction(cfg, p):
    """Fraction of sites whose box B_p has fewer than two empty sites."""
    n = cfg.n
    if 2 * p + 1 > n:
        raise ValueError("box does not fit on the lattice")
    size = 2 * p + 1
    occ = (cfg.tags != EMPTY).astype(np.float64)
    counts = np.rint(_box_mean(occ, size) * size ** 2)
    return float(np.mean(counts > size ** 2 - 2))
