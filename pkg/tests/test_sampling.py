"""Sampler and empirical-field extraction tests."""

import math

import numpy as np
import pytest

from latgas.lattice import ACTIVE, EMPTY, PASSIVE, Configuration, TWO_PI
from latgas.sampling import (DensityProfile, EmpiricalField,
                             GrandCanonicalParams, SpeciesProfile,
                             empirical_density, full_cluster_fraction,
                             mollified_fields, sample_grand_canonical,
                             sample_initial)


def _uniform_profile(ma=0.3, mp=0.2):
    return DensityProfile(active=SpeciesProfile("constant", mass=ma),
                          passive=SpeciesProfile("constant", mass=mp))


def test_profile_families_values():
    sp = SpeciesProfile("fourier-mode", mass=0.4, amp=0.5, kx=1, ky=0)
    assert sp.rho0(0.0, 0.3) == pytest.approx(0.6)
    assert sp.rho0(0.5, 0.9) == pytest.approx(0.2)
    sp = SpeciesProfile("gaussian-bump", mass=0.1, amp=0.2,
                        center=(0.1, 0.5), width=0.1)
    assert sp.rho0(0.1, 0.5) == pytest.approx(0.3)
    # torus distance: 0.95 is only 0.15 from the center across the seam
    assert sp.rho0(0.95, 0.5) > sp.rho0(0.4, 0.5)


def test_profile_validation():
    bad = DensityProfile(active=SpeciesProfile("constant", mass=0.8),
                         passive=SpeciesProfile("constant", mass=0.4))
    with pytest.raises(ValueError):
        bad.validate()
    neg = DensityProfile(
        active=SpeciesProfile("fourier-mode", mass=0.2, amp=2.0),
        passive=SpeciesProfile("constant", mass=0.0))
    with pytest.raises(ValueError):
        neg.validate()


def test_angular_pdf_normalized():
    sp = SpeciesProfile("constant", mass=0.3, ang_amp=0.7, ang_mode=2)
    th = np.linspace(0, TWO_PI, 1441)[:-1]
    integral = sp.angular_pdf(th).mean() * TWO_PI
    assert integral == pytest.approx(1.0, rel=1e-12)


def test_sample_initial_counts_lln():
    prof = _uniform_profile(0.3, 0.2)
    rng = np.random.default_rng(1)
    n = 128
    cfg = sample_initial(prof, n, rng)
    # binomial 4-sigma bands
    for count, p in ((cfg.k_active, 0.3), (cfg.k_passive, 0.2)):
        sd = math.sqrt(n * n * p * (1 - p))
        assert abs(count - p * n * n) < 4 * sd


def test_sample_initial_angular_modulation():
    prof = DensityProfile(
        active=SpeciesProfile("constant", mass=0.5, ang_amp=1.0, ang_mode=1),
        passive=SpeciesProfile("constant", mass=0.0))
    rng = np.random.default_rng(2)
    cfg = sample_initial(prof, 64, rng)
    th = cfg.angles[cfg.tags == ACTIVE]
    # h(theta) ~ (1 + cos theta): mean of cos(theta) = 1/2
    assert np.mean(np.cos(th)) == pytest.approx(0.5, abs=0.03)


def test_grand_canonical_validation():
    with pytest.raises(ValueError):
        GrandCanonicalParams(0.7, 0.5).validate()
    with pytest.raises(ValueError):
        GrandCanonicalParams(0.3, 0.2, law_a="weird").validate()
    with pytest.raises(ValueError):
        GrandCanonicalParams(0.3, 0.2, law_a=[-1.0, 2.0]).validate()
    GrandCanonicalParams(0.3, 0.2, law_a=[1.0, 2.0, 1.0]).validate()


def test_grand_canonical_histogram_law():
    gc = GrandCanonicalParams(0.5, 0.0, law_a=[1.0, 0.0, 0.0, 0.0])
    rng = np.random.default_rng(3)
    cfg = sample_grand_canonical(gc, 64, rng)
    th = cfg.angles[cfg.tags == ACTIVE]
    assert np.all(th <= TWO_PI / 4 + 1e-12)  # support of the first bin


def test_empirical_density_by_hand():
    cfg = Configuration(5)
    cfg.set_site((0, 0), ACTIVE, 0.0)
    cfg.set_site((0, 1), PASSIVE, 0.0)
    cfg.set_site((4, 4), ACTIVE, math.pi)  # wraps into B_1((0,0))
    rho = empirical_density(cfg, (0, 0), 1)
    assert rho == pytest.approx(3 / 9)
    rho_a = empirical_density(cfg, (0, 0), 1, species=ACTIVE)
    assert rho_a == pytest.approx(2 / 9)
    pol = empirical_density(cfg, (0, 0), 1, species=ACTIVE, omega=math.cos)
    assert pol == pytest.approx((1.0 - 1.0) / 9, abs=1e-12)


def test_mollified_fields_match_empirical_density():
    rng = np.random.default_rng(4)
    cfg = sample_grand_canonical(GrandCanonicalParams(0.3, 0.3), 16, rng)
    field = mollified_fields(cfg, eps=0.125, n_theta=4)
    assert field.l == 2
    for x in ((0, 0), (3, 7), (15, 15)):
        assert field.rho_a[x] == pytest.approx(
            empirical_density(cfg, x, 2, species=ACTIVE), abs=1e-12)
        assert field.pol[x][0] == pytest.approx(
            empirical_density(cfg, x, 2, species=ACTIVE, omega=math.cos),
            abs=1e-12)


def test_mollified_fields_mass_identity():
    rng = np.random.default_rng(5)
    cfg = sample_grand_canonical(GrandCanonicalParams(0.2, 0.4), 32, rng)
    field = mollified_fields(cfg, eps=0.1, n_theta=8)
    # box means average to the exact global density
    assert field.rho_a.mean() == pytest.approx(cfg.k_active / 32 ** 2,
                                               abs=1e-12)
    # histograms sum to the species density cell-wise
    assert np.max(np.abs(field.hist_a.sum(axis=-1) - field.rho_a)) < 1e-12
    assert np.max(np.abs(field.hist_p.sum(axis=-1) - field.rho_p)) < 1e-12


def test_mollifier_guards():
    cfg = Configuration(8)
    with pytest.raises(ValueError):
        mollified_fields(cfg, eps=0.05, n_theta=4)  # narrower than one site
    with pytest.raises(ValueError):
        mollified_fields(cfg, eps=0.55, n_theta=4)  # box exceeds the torus


def test_field_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(6)
    cfg = sample_grand_canonical(GrandCanonicalParams(0.3, 0.2), 8, rng)
    field = mollified_fields(cfg, eps=0.2, n_theta=4)
    path = tmp_path / "field.csv"
    field.to_csv(path)
    back = EmpiricalField.from_csv(path)
    assert back.n == field.n
    assert back.n_theta == field.n_theta
    assert np.array_equal(back.rho_a, field.rho_a)
    assert np.array_equal(back.pol, field.pol)
    assert np.array_equal(back.hist_p, field.hist_p)


def test_full_cluster_fraction():
    cfg = Configuration(6)
    for i in range(6):
        for j in range(6):
            cfg.set_site((i, j), ACTIVE, 0.0)
    assert full_cluster_fraction(cfg, 1) == 1.0
    cfg.set_site((0, 0), EMPTY)
    cfg.set_site((0, 1), EMPTY)
    # boxes containing both holes are no longer full clusters
    frac = full_cluster_fraction(cfg, 1)
    assert frac == pytest.approx(1.0 - 6 / 36)
