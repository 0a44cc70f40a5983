"""Conservative finite-volume solver for the coupled density PDEs.

The system evolves orientation-resolved densities f_a, f_p on the
(torus x circle) grid:

    dt f_a = D_T div[ d_s(rho) grad f_a + f_a D(rho) grad rho ]
             - v0 div[ f_a ( s(rho) p_a + d_s(rho) e(theta) ) ]
             + D_R dtheta^2 f_a
    dt f_p = D_T div[ d_s(rho) grad f_p + f_p D(rho) grad rho ]
             + D_R dtheta^2 f_p

with rho the angle-integrated total density and p_a the active
polarization.  Fluxes are evaluated on cell faces with arithmetic
averaging, so species masses telescope exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from latgas.lattice import TWO_PI
from latgas.transport import big_d, d_s, d_s_prime, s_coeff


@dataclass
class PdeGrid:
    """Cell-centered discretization of the torus x circle."""

    g: int
    n_theta: int

    def __post_init__(self):
        if self.g < 4 or self.n_theta < 4:
            raise ValueError("grid must have at least 4 cells per axis")

    @property
    def dx(self):
        return 1.0 / self.g

    @property
    def dtheta(self):
        return TWO_PI / self.n_theta

    @property
    def thetas(self):
        return (np.arange(self.n_theta) + 0.5) * self.dtheta

    @property
    def centers(self):
        return (np.arange(self.g) + 0.5) * self.dx


@dataclass
class FieldState:
    """Discretized density pair on a PdeGrid at time t."""

    grid: PdeGrid
    f_a: np.ndarray
    f_p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        want = (self.grid.g, self.grid.g, self.grid.n_theta)
        for name, arr in (("f_a", self.f_a), ("f_p", self.f_p)):
            if arr.shape != want:
                raise ValueError(f"{name} has shape {arr.shape}, "
                                 f"expected {want}")

    def copy(self):
        return FieldState(self.grid, self.f_a.copy(), self.f_p.copy(), self.t)

    def masses(self):
        w = self.grid.dx ** 2 * self.grid.dtheta
        return float(self.f_a.sum() * w), float(self.f_p.sum() * w)

    def check(self, cap_tol=1e-3):
        rho = (self.f_a + self.f_p).sum(axis=-1) * self.grid.dtheta
        if np.any(rho > 1.0 + cap_tol):
            raise ValueError(f"density cap violated: max rho = {rho.max():.6g}")


def from_profile(profile, grid):
    """Project a DensityProfile onto the grid (cell-center sampling)."""
    c = grid.centers
    u1, u2 = np.meshgrid(c, c, indexing="ij")
    th = grid.thetas
    f_a = (profile.active.rho0(u1, u2)[:, :, None]
           * profile.active.angular_pdf(th)[None, None, :])
    f_p = (profile.passive.rho0(u1, u2)[:, :, None]
           * profile.passive.angular_pdf(th)[None, None, :])
    return FieldState(grid, f_a, f_p, 0.0)


def moments(fs):
    """Angle-integrated fields: (rho, rho_a, rho_p, polarization)."""
    dth = fs.grid.dtheta
    th = fs.grid.thetas
    rho_a = fs.f_a.sum(axis=-1) * dth
    rho_p = fs.f_p.sum(axis=-1) * dth
    pol = np.stack([
        (fs.f_a * np.cos(th)).sum(axis=-1) * dth,
        (fs.f_a * np.sin(th)).sum(axis=-1) * dth,
    ], axis=-1)
    return rho_a + rho_p, rho_a, rho_p, pol


def rhs(fs, params, llf=False):
    """Time derivative arrays (df_a, df_p) of the flux-form semi-discretization.

    params must expose d_t, v0, d_r.  llf=True adds local Lax-Friedrichs
    dissipation to the advective flux (useful near saturated densities).
    """
    grid = fs.grid
    dx = grid.dx
    dth = grid.dtheta
    th = grid.thetas
    e_theta = (np.cos(th), np.sin(th))

    rho, _, _, pol = moments(fs)
    df_a = np.zeros_like(fs.f_a)
    df_p = np.zeros_like(fs.f_p)

    for ax in (0, 1):
        rho_n = np.roll(rho, -1, axis=ax)
        rho_face = 0.5 * (rho + rho_n)
        ds_f = d_s(rho_face)
        dd_f = big_d(rho_face)
        s_f = s_coeff(rho_face)
        grad_rho = (rho_n - rho) / dx
        pol_face = 0.5 * (pol[..., ax] + np.roll(pol[..., ax], -1, axis=ax))
        for f, df, active in ((fs.f_a, df_a, True), (fs.f_p, df_p, False)):
            f_n = np.roll(f, -1, axis=ax)
            f_face = 0.5 * (f + f_n)
            grad_f = (f_n - f) / dx
            flux = -params.d_t * (ds_f[..., None] * grad_f
                                  + f_face * (dd_f * grad_rho)[..., None])
            if active and params.v0 > 0.0:
                vel = params.v0 * (s_f[..., None] * pol_face[..., None]
                                   + ds_f[..., None] * e_theta[ax])
                adv = vel * f_face
                if llf:
                    adv -= 0.5 * np.abs(vel) * (f_n - f)
                flux += adv
            df -= (flux - np.roll(flux, 1, axis=ax)) / dx

    if params.d_r > 0.0:
        for f, df in ((fs.f_a, df_a), (fs.f_p, df_p)):
            df += params.d_r * (np.roll(f, -1, axis=2) - 2.0 * f
                                + np.roll(f, 1, axis=2)) / dth ** 2

    if not (np.all(np.isfinite(df_a)) and np.all(np.isfinite(df_p))):
        bad = np.argwhere(~np.isfinite(df_a + df_p))
        raise FloatingPointError(f"non-finite flux at cells {bad[:5].tolist()}")
    return df_a, df_p


def cfl_dt(grid, params, safety=0.8):
    """Largest admissible explicit time step (with safety factor)."""
    limits = [grid.dx ** 2 / (8.0 * params.d_t)]
    if params.d_r > 0.0:
        limits.append(grid.dtheta ** 2 / (4.0 * params.d_r))
    if params.v0 > 0.0:
        limits.append(grid.dx / (4.0 * params.v0))
    return safety * min(limits)


def step_rk4(fs, dt, params, llf=False):
    """Classical 4-stage explicit step; conserves species masses exactly."""
    if dt > cfl_dt(fs.grid, params) * (1.0 + 1e-12):
        raise ValueError(f"dt = {dt:g} violates the CFL bound "
                         f"{cfl_dt(fs.grid, params):g}")
    k1a, k1p = rhs(fs, params, llf)
    mid = FieldState(fs.grid, fs.f_a + 0.5 * dt * k1a,
                     fs.f_p + 0.5 * dt * k1p, fs.t + 0.5 * dt)
    k2a, k2p = rhs(mid, params, llf)
    mid = FieldState(fs.grid, fs.f_a + 0.5 * dt * k2a,
                     fs.f_p + 0.5 * dt * k2p, fs.t + 0.5 * dt)
    k3a, k3p = rhs(mid, params, llf)
    end = FieldState(fs.grid, fs.f_a + dt * k3a, fs.f_p + dt * k3p, fs.t + dt)
    k4a, k4p = rhs(end, params, llf)
    return FieldState(
        fs.grid,
        fs.f_a + dt / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a),
        fs.f_p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p),
        fs.t + dt)


def solve(fs0, t_end, params, frame_times=(), llf=False, cap_tol=1e-3):
    """March fs0 to t_end; returns (frames at frame_times, final state).

    Frame times must be sorted; the state is advanced with a uniform dt
    chosen to land exactly on every requested time.
    """
    frame_times = [float(t) for t in frame_times]
    times = sorted(set(frame_times + [float(t_end)]))
    if times[0] < fs0.t - 1e-15:
        raise ValueError("frame time precedes initial time")
    frames = []
    fs = fs0.copy()
    if frame_times and abs(frame_times[0] - fs.t) < 1e-15:
        frames.append(fs.copy())
    dt_max = cfl_dt(fs.grid, params)
    for t_stop in times:
        span = t_stop - fs.t
        if span > 1e-15:
            n_steps = max(1, int(math.ceil(span / dt_max - 1e-12)))
            dt = span / n_steps
            for _ in range(n_steps):
                fs = step_rk4(fs, dt, params, llf)
            fs.t = t_stop
            fs.check(cap_tol)
        if any(abs(t_stop - ft) < 1e-15 for ft in frame_times) and t_stop > fs0.t:
            frames.append(fs.copy())
    return frames, fs


@dataclass
class TestFunction:
    """Separable test function H_t(u, theta) = e^(-decay*t) G(u) w(theta).

    G(u) = cos(2 pi (k1 u1 + k2 u2) + phase_g), w = cos(m theta + phase_w);
    all derivatives are analytic.
    """

    k1: int = 0
    k2: int = 0
    phase_g: float = 0.0
    m: int = 0
    phase_w: float = 0.0
    decay: float = 0.0

    def g(self, u1, u2):
        return np.cos(2 * np.pi * (self.k1 * u1 + self.k2 * u2) + self.phase_g)

    def grad_g(self, u1, u2):
        s = np.sin(2 * np.pi * (self.k1 * u1 + self.k2 * u2) + self.phase_g)
        return (-2 * np.pi * self.k1 * s, -2 * np.pi * self.k2 * s)

    def lap_g(self, u1, u2):
        return (-(2 * np.pi) ** 2 * (self.k1 ** 2 + self.k2 ** 2)
                * self.g(u1, u2))

    def w(self, theta):
        return np.cos(self.m * theta + self.phase_w)

    def d2w(self, theta):
        return -self.m ** 2 * self.w(theta)

    def time_factor(self, t):
        return math.exp(-self.decay * t)

    def label(self):
        return f"G[{self.k1},{self.k2}]w[m={self.m},ph={self.phase_w:g}]"


def battery():
    """The fixed 9-member test function battery: low spatial x angular modes."""
    spatial = [(0, 0), (1, 0), (0, 1)]
    angular = [(0, 0.0), (1, 0.0), (1, -math.pi / 2)]
    return [TestFunction(k1=k1, k2=k2, m=m, phase_w=ph)
            for (k1, k2) in spatial for (m, ph) in angular]


def _weak_residual_core(frames_fa, frames_fp, frames_pol, times, u1, u2,
                        thetas, dx, dtheta, H, params):
    """Both sides of the weak formulation; returns |LHS-RHS| per species.

    frames_* are lists of arrays over uniformly spaced `times`; u1/u2 are
    the cell-center coordinate grids; quadrature is cell sums in space
    and angle and the trapezoid rule in time.
    """
    w_cell = dx * dx * dtheta
    gg = H.g(u1, u2)
    g1, g2 = H.grad_g(u1, u2)
    lap = H.lap_g(u1, u2)
    ww = H.w(thetas)
    d2w = H.d2w(thetas)

    integrand_a = []
    integrand_p = []
    for idx, t in enumerate(times):
        fa = frames_fa[idx]
        fp = frames_fp[idx]
        pol = frames_pol[idx]
        tf = H.time_factor(t)
        rho = (fa + fp).sum(axis=-1) * dtheta
        grad_rho_1 = (np.roll(rho, -1, 0) - np.roll(rho, 1, 0)) / (2 * dx)
        grad_rho_2 = (np.roll(rho, -1, 1) - np.roll(rho, 1, 1)) / (2 * dx)
        ds = d_s(rho)
        coef = big_d(rho) - d_s_prime(rho)
        sr = s_coeff(rho)
        vals = {}
        for species, f in (("a", fa), ("p", fp)):
            # <f, dt H + D_R dtheta^2 H>
            term_t = ((f * (-H.decay * gg[..., None] * ww
                            + params.d_r * gg[..., None] * d2w)).sum()
                      * w_cell * tf)
            # D_T [ lap(H) d_s(rho) f - grad H . grad rho (D - d_s') f ]
            diff = (lap[..., None] * ds[..., None] * f
                    - (g1 * grad_rho_1 + g2 * grad_rho_2)[..., None]
                    * coef[..., None] * f)
            term_d = params.d_t * (diff * ww).sum() * w_cell * tf
            term_v = 0.0
            if species == "a" and params.v0 > 0.0:
                adv1 = (sr * pol[..., 0])[..., None] + ds[..., None] * np.cos(thetas)
                adv2 = (sr * pol[..., 1])[..., None] + ds[..., None] * np.sin(thetas)
                term_v = (params.v0
                          * ((g1[..., None] * adv1 + g2[..., None] * adv2)
                             * f * ww).sum() * w_cell * tf)
            vals[species] = term_t + term_d + term_v
        integrand_a.append(vals["a"])
        integrand_p.append(vals["p"])

    res = {}
    for species, integ, frames in (("a", integrand_a, frames_fa),
                                   ("p", integrand_p, frames_fp)):
        lhs = ((frames[-1] * gg[..., None] * ww).sum() * w_cell
               * H.time_factor(times[-1])
               - (frames[0] * gg[..., None] * ww).sum() * w_cell
               * H.time_factor(times[0]))
        rhs_val = np.trapezoid(integ, times)
        res[species] = abs(lhs - rhs_val)
    return res["a"], res["p"]


def weak_residual(traj, H, params):
    """Weak-formulation defect of a PDE trajectory (list of FieldState)."""
    if len(traj) < 2:
        raise ValueError("trajectory needs at least the initial and final frames")
    grid = traj[0].grid
    for fs in traj:
        if fs.grid.g != grid.g or fs.grid.n_theta != grid.n_theta:
            raise ValueError("trajectory frames use mismatched grids")
    times = [fs.t for fs in traj]
    steps = np.diff(times)
    if steps.size and not np.allclose(steps, steps[0], rtol=1e-8):
        raise ValueError("trajectory times must be uniformly spaced")
    c = grid.centers
    u1, u2 = np.meshgrid(c, c, indexing="ij")
    frames_fa = [fs.f_a for fs in traj]
    frames_fp = [fs.f_p for fs in traj]
    frames_pol = [moments(fs)[3] for fs in traj]
    return _weak_residual_core(frames_fa, frames_fp, frames_pol, times,
                               u1, u2, grid.thetas, grid.dx, grid.dtheta,
                               H, params)


def weak_residual_empirical(fields, times, H, params):
    """Weak-formulation defect of a mollified empirical trajectory.

    fields: list of EmpiricalField at the given (uniform) times; the
    angular histograms provide the cell values of f, the polarization
    field provides p_a.
    """
    n = fields[0].n
    n_theta = fields[0].n_theta
    for f in fields:
        if f.n != n or f.n_theta != n_theta:
            raise ValueError("empirical fields use mismatched resolutions")
    dtheta = TWO_PI / n_theta
    thetas = (np.arange(n_theta) + 0.5) * dtheta
    dx = 1.0 / n
    u = np.arange(n) * dx
    u1, u2 = np.meshgrid(u, u, indexing="ij")
    frames_fa = [f.hist_a / dtheta for f in fields]
    frames_fp = [f.hist_p / dtheta for f in fields]
    frames_pol = [f.pol for f in fields]
    return _weak_residual_core(frames_fa, frames_fp, frames_pol, list(times),
                               u1, u2, thetas, dx, dtheta, H, params)
