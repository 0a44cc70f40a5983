"""Acceptance gate: the eight primary verification criteria.

Each test implements one numbered criterion at its stated tolerance.
They are slower than the unit tests (the whole file runs in roughly
ten minutes on one core) and use frozen seeds throughout.
"""

import math

import numpy as np
import pytest

from latgas import kmc, micro, pde, transport
from latgas.config import default_config
from latgas.convergence import run_convergence
from latgas.lattice import ACTIVE, EMPTY, PASSIVE, TWO_PI, Configuration
from latgas.pde import FieldState, PdeGrid, battery, from_profile, moments, \
    rhs, solve, weak_residual
from latgas.sampling import (DensityProfile, GrandCanonicalParams,
                             SpeciesProfile, sample_grand_canonical)
from latgas.transport import big_d, d_s, d_s_prime, s_coeff


# ---------------------------------------------------------------------------
# criterion 1: transport coefficient identities


def test_criterion_1_coefficient_identities():
    alphas = np.linspace(0.0, 1.0, 10 ** 4)
    assert abs(d_s(0.0) - 1.0) < 1e-12
    assert abs(d_s(1.0)) < 1e-12
    assert np.max(np.abs(alphas * s_coeff(alphas) + d_s(alphas)
                         - (1.0 - alphas))) < 1e-12
    assert np.max(np.abs(d_s(alphas) + alphas * big_d(alphas) - 1.0)) < 1e-12
    vals = d_s(alphas)
    assert np.all(vals >= (1.0 - alphas) / 3.0 - 1e-12)
    assert np.all(vals <= 3.0 * (1.0 - alphas) + 1e-12)


# ---------------------------------------------------------------------------
# criterion 2: tagged-particle MSD cross-validation


def test_criterion_2_msd_matches_cubic():
    replicas = 200
    t_max = 200.0
    for alpha in (0.1, 0.3, 0.5, 0.7):
        est, se = transport.estimate_ds_msd(alpha, side=128, t_max=t_max,
                                            replicas=replicas, seed=1000)
        ref = d_s(alpha)
        # 5% relative match, holding with a 3-stderr statistical margin
        assert abs(est - ref) + 3.0 * se < 0.05 * ref, \
            f"alpha={alpha}: est={est:.4f} ref={ref:.4f} se={se:.2e}"
    cal, cal_se = transport.estimate_ds_msd(0.3, side=128, t_max=t_max,
                                            replicas=replicas, seed=2000,
                                            exclude=False)
    assert cal == pytest.approx(1.0, abs=0.02)


# ---------------------------------------------------------------------------
# criterion 3: conservation over 1e8 events and product-measure stationarity


def test_criterion_3_conservation_1e8_events():
    rng = np.random.default_rng(5)
    cfg = sample_grand_canonical(GrandCanonicalParams(0.3, 0.2), 64, rng)
    ka0, kp0 = cfg.k_active, cfg.k_passive
    params = kmc.SimParams(n=64, d_t=1.0, v0=1.0, d_r=1.0, t_end=1e9, seed=77)
    out, clock = kmc.run(cfg, params, max_events=10 ** 8)
    assert clock.event_count == 10 ** 8
    assert (out.k_active, out.k_passive) == (ka0, kp0)
    assert np.all(out.angles[out.tags == EMPTY] == 0.0)


def test_criterion_3_stationarity_of_product_measure():
    n = 32
    aa, ap = 0.3, 0.2
    replicas = 100
    params = kmc.SimParams(n=n, d_t=1.0, v0=0.0, d_r=1.0, t_end=0.05,
                           seed=0)
    site_occ = np.empty(replicas)       # total occupancy at a fixed site
    pair_occ = np.empty(replicas)       # lattice-mean adjacent-pair product
    for r in range(replicas):
        rng = np.random.default_rng(9000 + r)
        cfg = sample_grand_canonical(GrandCanonicalParams(aa, ap), n, rng)
        p = kmc.SimParams(n=n, d_t=params.d_t, v0=0.0, d_r=params.d_r,
                          t_end=params.t_end, seed=9000 + r)
        out, _ = kmc.run(cfg, p)
        occ = (out.tags != EMPTY).astype(float)
        site_occ[r] = occ[0, 0]
        pair_occ[r] = 0.5 * (np.mean(occ * np.roll(occ, 1, axis=0))
                             + np.mean(occ * np.roll(occ, 1, axis=1)))
    al = aa + ap
    for name, vals, ref in (("site", site_occ, al), ("pair", pair_occ,
                                                     al * al)):
        se = vals.std(ddof=1) / math.sqrt(replicas)
        z = (vals.mean() - ref) / se
        assert abs(z) < 4.0, f"{name}: mean={vals.mean():.4f} ref={ref} z={z:.2f}"


# ---------------------------------------------------------------------------
# criterion 4: canonical moment-identity battery by exact enumeration


def test_criterion_4_identity_battery():
    cases = 0
    worst = 0.0
    for ks in micro.admissible_states_l1(max_particles=4):
        recs = micro.check_moment_identities(ks, math.cos, math.sin)
        cases += len(recs)
        worst = max(worst, max(r["abs_err"] for r in recs))
    assert cases >= 200
    assert worst < 1e-12, f"worst identity error {worst:.3e} over {cases}"


# ---------------------------------------------------------------------------
# criterion 5: inner-product closed forms vs Monte-Carlo reduced moments


def test_criterion_5_inner_products():
    for (aa, ap) in ((0.3, 0.2), (0.1, 0.6)):
        gc = GrandCanonicalParams(aa, ap)
        for omega in (math.cos, math.sin):
            recs = micro.grand_canonical_inner_products(
                gc, omega, samples=10 ** 6, seed=31)
            bad = [r for r in recs if abs(r["z"]) >= 3.0]
            assert not bad, f"({aa},{ap}) {omega.__name__}: {bad}"


# ---------------------------------------------------------------------------
# criterion 6: spectral gaps and the variance/Dirichlet scaling check


def test_criterion_6_spectral_gap_scaling():
    ratios = {}
    for l in (1, 2):
        ks = micro.CanonicalState(l, (0.5, 1.1), (2.2,))
        gap = micro.spectral_gap(micro.build_generator(ks))
        assert gap > 0.0, f"l={l}: gap {gap}"
        rng = np.random.default_rng(17)
        best = 0.0
        for _ in range(100):
            member = micro.sample_t_omega(ks.sites, rng, math.cos)
            r = micro.variance_vs_dirichlet(ks, member)
            if r is not None:
                best = max(best, r)
        ratios[l] = best
    assert ratios[1] > 0 and ratios[2] > 0
    # C n^2 scaling allows at most (5/3)^2 growth in box side; factor 2 slack
    assert ratios[2] / ratios[1] <= 2.0 * (5.0 / 3.0) ** 2


# ---------------------------------------------------------------------------
# criterion 7: PDE solver verification


def test_criterion_7_heat_reduction_and_mass():
    grid = PdeGrid(64, 8)
    params = kmc.SimParams(n=64, d_t=1.0, v0=0.0, d_r=1.0, t_end=1.0, seed=0)
    for k in (1, 2):
        prof = DensityProfile(
            active=SpeciesProfile("fourier-mode", mass=0.3, amp=0.2,
                                  kx=k, ky=0),
            passive=SpeciesProfile("constant", mass=0.0))
        fs = from_profile(prof, grid)
        t_end = 0.01
        _, out = solve(fs, t_end, params)
        c = np.cos(2 * np.pi * k * grid.centers)
        amp0 = 2 * float((moments(fs)[1] * c[:, None]).mean())
        amp1 = 2 * float((moments(out)[1] * c[:, None]).mean())
        rate = -math.log(amp1 / amp0) / t_end
        assert rate == pytest.approx((2 * math.pi * k) ** 2, rel=5e-3)
        # mass conservation to 1e-12 over the whole solve
        assert out.masses()[0] == pytest.approx(fs.masses()[0], abs=1e-12)
        assert out.masses()[1] == pytest.approx(fs.masses()[1], abs=1e-12)


def _semi_discrete_defect(g):
    """Max |discrete rhs - analytic rhs| for smooth manufactured fields."""
    grid = PdeGrid(g, 16)
    params = kmc.SimParams(n=64, d_t=0.7, v0=0.9, d_r=0.3, t_end=1.0, seed=0)
    m_a, a_a, m_p, a_p = 0.25, 0.1, 0.15, 0.05
    u1, u2 = np.meshgrid(grid.centers, grid.centers, indexing="ij")
    th = grid.thetas
    tp = 2 * math.pi
    gg = np.cos(tp * u1) * np.cos(tp * u2)
    g1 = -tp * np.sin(tp * u1) * np.cos(tp * u2)
    g2 = -tp * np.cos(tp * u1) * np.sin(tp * u2)
    lap_g = -2 * tp ** 2 * gg
    h = (1.0 + 0.3 * np.cos(th)) / TWO_PI
    h_pp = -0.3 * np.cos(th) / TWO_PI
    f_a = (m_a + a_a * gg)[..., None] * h
    f_p = (m_p + a_p * gg)[..., None] * np.full_like(th, 1.0 / TWO_PI)
    fs = FieldState(grid, f_a, f_p)
    rho = m_a + m_p + (a_a + a_p) * gg
    dr1, dr2 = (a_a + a_p) * g1, (a_a + a_p) * g2
    lap_rho = -2 * tp ** 2 * (a_a + a_p) * gg
    ds, dsp, dd = d_s(rho), d_s_prime(rho), big_d(rho)
    ddp = (-dsp - dd) / rho
    ss, ssp = s_coeff(rho), (-dsp - dd) / rho
    pol1 = 0.15 * (m_a + a_a * gg)
    dp1_1 = 0.15 * a_a * g1
    cos_t, sin_t = np.cos(th), np.sin(th)

    def analytic(f0, df1, df2, lapf, f_th2, active):
        grad_dot = dr1[..., None] * df1 + dr2[..., None] * df2
        out = params.d_t * (
            ds[..., None] * lapf + (dsp + dd)[..., None] * grad_dot
            + f0 * (ddp * (dr1 ** 2 + dr2 ** 2) + dd * lap_rho)[..., None])
        out += params.d_r * f_th2
        if active:
            vel1 = (ss * pol1)[..., None] + ds[..., None] * cos_t
            vel2 = ds[..., None] * sin_t
            div_vel = ((ssp * dr1 * pol1 + ss * dp1_1)[..., None]
                       + dsp[..., None] * (dr1[..., None] * cos_t
                                           + dr2[..., None] * sin_t))
            out -= params.v0 * (vel1 * df1 + vel2 * df2 + f0 * div_vel)
        return out

    exact_a = analytic(f_a, (a_a * g1)[..., None] * h,
                       (a_a * g2)[..., None] * h, (a_a * lap_g)[..., None] * h,
                       (m_a + a_a * gg)[..., None] * h_pp, True)
    exact_p = analytic(f_p, (a_p * g1)[..., None] / TWO_PI,
                       (a_p * g2)[..., None] / TWO_PI,
                       (a_p * lap_g)[..., None] / TWO_PI,
                       np.zeros_like(f_p), False)
    got_a, got_p = rhs(fs, params)
    return max(float(np.max(np.abs(got_a - exact_a))),
               float(np.max(np.abs(got_p - exact_p))))


def test_criterion_7_manufactured_solution_order():
    order = math.log2(_semi_discrete_defect(16) / _semi_discrete_defect(32))
    assert order >= 1.9


def test_criterion_7_weak_residual_self_convergence():
    prof = DensityProfile(
        active=SpeciesProfile("fourier-mode", mass=0.3, amp=0.3, kx=1, ky=1,
                              ang_amp=0.5, ang_mode=1),
        passive=SpeciesProfile("fourier-mode", mass=0.2, amp=0.2,
                               kx=0, ky=1))
    params = kmc.SimParams(n=64, d_t=1.0, v0=1.0, d_r=1.0, t_end=1.0, seed=0)
    T = 0.05
    res = {}
    for gsz, nth, nf in ((16, 8, 21), (32, 16, 41)):
        grid = PdeGrid(gsz, nth)
        fs = from_profile(prof, grid)
        frames, _ = solve(fs, T, params, frame_times=np.linspace(0, T, nf))
        res[gsz] = [weak_residual(frames, H, params) for H in battery()]
    orders = []
    for i in range(9):
        for s in (0, 1):
            coarse, fine = res[16][i][s], res[32][i][s]
            if fine > 1e-12:
                orders.append(math.log2(coarse / fine))
    assert orders
    assert min(orders) >= 1.9


# ---------------------------------------------------------------------------
# criterion 8: hydrodynamic convergence trend


def _criterion_8_config():
    return default_config(
        "converge", n_list=[16, 32, 64], eps_list=[0.125], replicas=50,
        frames=6, grid=64, n_theta=8, t_end=0.05, d_t=1.0, v0=1.0, d_r=1.0,
        seed=0,
        active_family="fourier-mode", active_mass=0.3, active_amp=0.5,
        active_kx=1, active_ky=0,
        passive_family="gaussian-bump", passive_mass=0.1, passive_amp=0.3,
        passive_width=0.15)


def test_criterion_8_hydrodynamic_convergence():
    cfg = _criterion_8_config()
    report = run_convergence(cfg)
    t_final = report.frame_times[-1]

    # replica-mean L1 distance at t = T strictly decreases across N
    l1 = {r["n"]: r["l1"] for r in report.l1_rows
          if abs(r["t"] - t_final) < 1e-12}
    assert set(l1) == {16, 32, 64}
    assert l1[16] > l1[32] > l1[64], f"L1 not decreasing: {l1}"

    # weak residual per battery function: factor >= 1.5 from N=16 to N=64
    # at 2 sigma; residuals at roundoff (mass identity) pass trivially
    rows = {(r["n"], r["test_fn"], r["species"]): r
            for r in report.residual_rows}
    labels = {k[1] for k in rows}
    assert len(labels) == 9
    for lab in labels:
        for sp in ("a", "p"):
            r16 = rows[(16, lab, sp)]
            r64 = rows[(64, lab, sp)]
            if r16["resid_mean"] < 1e-12 and r64["resid_mean"] < 1e-12:
                continue
            margin = r16["resid_mean"] - 1.5 * r64["resid_mean"]
            sigma = math.hypot(r16["resid_stderr"],
                               1.5 * r64["resid_stderr"])
            assert margin > 2.0 * sigma, \
                (f"{lab}/{sp}: {r16['resid_mean']:.3e} -> "
                 f"{r64['resid_mean']:.3e}, margin {margin:.3e} "
                 f"vs 2 sigma {2 * sigma:.3e}")
