"""Exact small-box verification laboratory.

Canonical measures by explicit enumeration, the two-site moment
identities of the centered variables, grand-canonical inner-product
closed forms with Monte-Carlo cross-checks, the confined exclusion
generator with its spectral gap, and variance/Dirichlet ratio probes
of the gap inequality.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from latgas.lattice import ACTIVE, EMPTY, PASSIVE

_STATE_GUARD = 10 ** 7


def _omega_apply(omega, arr):
    """Apply an angular function elementwise (ufunc fast path)."""
    try:
        out = omega(arr)
        return np.asarray(out, dtype=float)
    except (TypeError, ValueError):
        return np.vectorize(omega)(arr)


# ---------------------------------------------------------------------------
# canonical states and enumeration


@dataclass(frozen=True)
class CanonicalState:
    """Particle content of the box B_l: counts plus sorted angle lists.

    The canonical measure conditions the homogeneous product measure on
    this content; by exchangeability it is uniform over all placements
    of the angle-labeled particles onto distinct sites.
    """

    l: int
    theta_a: tuple = ()
    theta_p: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "theta_a", tuple(sorted(self.theta_a)))
        object.__setattr__(self, "theta_p", tuple(sorted(self.theta_p)))
        if self.k_total > self.sites - 2:
            raise ValueError(
                f"{self.k_total} particles on {self.sites} sites: "
                "admissibility needs at least two empty sites")

    @property
    def side(self):
        return 2 * self.l + 1

    @property
    def sites(self):
        return self.side ** 2

    @property
    def k_a(self):
        return len(self.theta_a)

    @property
    def k_p(self):
        return len(self.theta_p)

    @property
    def k_total(self):
        return self.k_a + self.k_p

    @property
    def alpha_a(self):
        return self.k_a / self.sites

    @property
    def alpha_p(self):
        return self.k_p / self.sites

    @property
    def alpha(self):
        return self.k_total / self.sites

    def omega_bar(self, species, omega):
        """Conditional mean of omega(theta_0) given the site holds `species`."""
        thetas = self.theta_a if species == ACTIVE else self.theta_p
        if not thetas:
            return 0.0
        return float(np.mean([omega(t) for t in thetas]))

    def omega_var(self, species, omega):
        """Conditional variance V^sigma(omega)."""
        thetas = self.theta_a if species == ACTIVE else self.theta_p
        if not thetas:
            return 0.0
        vals = np.array([omega(t) for t in thetas])
        return float(np.mean(vals ** 2) - np.mean(vals) ** 2)


def placement_count(ks):
    c = 1
    for i in range(ks.k_total):
        c *= ks.sites - i
    return c


def enumerate_canonical(ks):
    """All placements of the labeled particles, as (tags, angles) arrays.

    Returns (tags, angles) of shape (M, sites) with uniform weight 1/M
    per row.  Placements of identical (type, angle) particles are
    deduplicated, so rows are distinct configurations with (still)
    uniform weights.
    """
    if placement_count(ks) > _STATE_GUARD:
        raise ValueError(f"state count {placement_count(ks)} exceeds the "
                         f"enumeration guard {_STATE_GUARD}")
    particles = ([(ACTIVE, t) for t in ks.theta_a]
                 + [(PASSIVE, t) for t in ks.theta_p])
    k = len(particles)
    s = ks.sites
    seen = set()
    tag_rows = []
    ang_rows = []
    for sites_perm in itertools.permutations(range(s), k):
        key = tuple(sorted(zip(sites_perm, particles)))
        if key in seen:
            continue
        seen.add(key)
        tags = np.zeros(s, dtype=np.int8)
        angles = np.zeros(s, dtype=np.float64)
        for site, (tp, th) in zip(sites_perm, particles):
            tags[site] = tp
            angles[site] = th
        tag_rows.append(tags)
        ang_rows.append(angles)
    return np.array(tag_rows), np.array(ang_rows)


_ENUM_CACHE = {}


def _states(ks):
    if ks not in _ENUM_CACHE:
        if len(_ENUM_CACHE) > 64:
            _ENUM_CACHE.clear()
        _ENUM_CACHE[ks] = enumerate_canonical(ks)
    return _ENUM_CACHE[ks]


# ---------------------------------------------------------------------------
# observables


class Obs:
    """Small expression tree over per-site primitives.

    Nodes evaluate vectorized over enumerated state arrays (tags,
    angles) of shape (M, sites) and return a length-M vector.
    """

    def __init__(self, fn, label=""):
        self._fn = fn
        self.label = label

    def eval(self, tags, angles):
        return self._fn(tags, angles)

    def __add__(self, other):
        other = _as_obs(other)
        return Obs(lambda t, a: self.eval(t, a) + other.eval(t, a),
                   f"({self.label}+{other.label})")

    def __sub__(self, other):
        other = _as_obs(other)
        return Obs(lambda t, a: self.eval(t, a) - other.eval(t, a),
                   f"({self.label}-{other.label})")

    def __mul__(self, other):
        other = _as_obs(other)
        return Obs(lambda t, a: self.eval(t, a) * other.eval(t, a),
                   f"{self.label}*{other.label}")

    def __rmul__(self, scalar):
        return _as_obs(scalar) * self


def _as_obs(v):
    if isinstance(v, Obs):
        return v
    return const(float(v))


def const(c):
    return Obs(lambda t, a: np.full(t.shape[0], c), f"{c:g}")


def occ(x):
    """eta_x: type-blind occupancy."""
    return Obs(lambda t, a: (t[:, x] != EMPTY).astype(float), f"eta[{x}]")


def occ_s(x, species):
    """eta^sigma_x."""
    nm = "a" if species == ACTIVE else "p"
    return Obs(lambda t, a: (t[:, x] == species).astype(float),
               f"eta^{nm}[{x}]")


def occ_w(x, species, omega, shift=0.0):
    """(omega(theta_x) - shift) * eta^sigma_x; shift=omega_bar centers it."""
    nm = "a" if species == ACTIVE else "p"

    def fn(t, a):
        ind = (t[:, x] == species)
        w = _omega_apply(omega, a[:, x]) - shift
        return w * ind
    return Obs(fn, f"eta^({nm},w-{shift:g})[{x}]")


def chi(x, ks):
    """chi_x = (alpha^p/alpha) eta^a_x - (alpha^a/alpha) eta^p_x."""
    ca = ks.alpha_p / ks.alpha
    cp = ks.alpha_a / ks.alpha
    return Obs(lambda t, a: (ca * (t[:, x] == ACTIVE).astype(float)
                             - cp * (t[:, x] == PASSIVE).astype(float)),
               f"chi[{x}]")


def canonical_expectation(ks, expr):
    """Exact expectation of `expr` under the canonical measure of ks."""
    tags, angles = _states(ks)
    return float(np.mean(expr.eval(tags, angles)))


# ---------------------------------------------------------------------------
# moment identity battery


def _ita_witnesses(ks, x, y):
    """ITA-xy witness family: occupancy-only functions away from {x, y}.

    eta_x / eta_y themselves are allowed (occupancy dependence is
    type- and angle-blind).
    """
    others = [z for z in range(ks.sites) if z not in (x, y)]
    fam = [("1", const(1.0)),
           ("eta_xy", occ(x) * occ(y))]
    if others:
        z = others[0]
        fam.append((f"eta[{z}]", occ(z)))
        fam.append((f"1-eta[{z}]", const(1.0) - occ(z)))
    if len(others) >= 2:
        z, w = others[0], others[1]
        fam.append((f"eta[{z}]eta[{w}]", occ(z) * occ(w)))
    return fam


def check_moment_identities(ks, omega1, omega2, x=0, y=1):
    """Verify the canonical two-site and centered-square identities.

    Returns a list of dicts {identity, witness, lhs, rhs, abs_err}.
    Identities whose preconditions fail (too few particles) are skipped.
    """
    k, ka, kp = ks.k_total, ks.k_a, ks.k_p
    s = ks.sites
    out = []
    w1b_a = ks.omega_bar(ACTIVE, omega1)
    w2b_a = ks.omega_bar(ACTIVE, omega2)
    w2b_p = ks.omega_bar(PASSIVE, omega2)
    w12b_a = ks.omega_bar(ACTIVE, lambda t: omega1(t) * omega2(t))
    v_a = ks.omega_var(ACTIVE, omega1)

    def rec(name, wname, lhs, rhs):
        out.append({"identity": name, "witness": wname, "lhs": lhs,
                    "rhs": rhs, "abs_err": abs(lhs - rhs)})

    for wname, F in _ita_witnesses(ks, x, y):
        e_x = canonical_expectation(ks, occ(x) * F)
        e_xy = canonical_expectation(ks, occ(x) * occ(y) * F)
        if k >= 2:
            lhs = canonical_expectation(ks, occ_s(x, ACTIVE)
                                        * occ_s(y, ACTIVE) * F)
            rec("E[na_x na_y F]", wname, lhs,
                ka * (ka - 1) / (k * (k - 1)) * e_xy)
            lhs = canonical_expectation(ks, occ_s(x, ACTIVE)
                                        * occ_s(y, PASSIVE) * F)
            rec("E[na_x np_y F]", wname, lhs, ka * kp / (k * (k - 1)) * e_xy)
            lhs = canonical_expectation(
                ks, occ_w(x, ACTIVE, omega1) * occ_w(y, ACTIVE, omega2) * F)
            rec("E[na_w1_x na_w2_y F]", wname, lhs,
                ka / (k * (k - 1)) * (ka * w1b_a * w2b_a - w12b_a) * e_xy)
            lhs = canonical_expectation(
                ks, occ_w(x, ACTIVE, omega1) * occ_w(y, PASSIVE, omega2) * F)
            rec("E[na_w1_x np_w2_y F]", wname, lhs,
                ka * kp / (k * (k - 1)) * w1b_a * w2b_p * e_xy)
        if k >= 1:
            cx = chi(x, ks)
            lhs = canonical_expectation(ks, cx * cx * F)
            rec("E[chi_x^2 F]", wname, lhs,
                ks.alpha_a * ks.alpha_p / ks.alpha ** 2 * e_x)
            ca = occ_w(x, ACTIVE, omega1, shift=w1b_a)
            lhs = canonical_expectation(ks, ca * ca * F)
            rec("E[(na_hw_x)^2 F]", wname, lhs,
                v_a * ks.alpha_a / ks.alpha * e_x)
        if k >= 2:
            lhs = canonical_expectation(ks, chi(x, ks) * chi(y, ks) * F)
            rec("E[chi_x chi_y F]", wname, lhs,
                -ks.alpha_a * ks.alpha_p / (ks.alpha ** 2 * (k - 1)) * e_xy)
            ca_x = occ_w(x, ACTIVE, omega1, shift=w1b_a)
            ca_y = occ_w(y, ACTIVE, omega1, shift=w1b_a)
            lhs = canonical_expectation(ks, ca_x * ca_y * F)
            rec("E[na_hw_x na_hw_y F]", wname, lhs,
                -v_a * ka / (k * (k - 1)) * e_xy)
    return out


def admissible_states_l1(max_particles=4, angles_a=(0.7, 2.1),
                         angles_p=(1.3, 4.5)):
    """All l=1 canonical states with <= max_particles and <= 2 angles/type."""
    out = []
    for ka in range(0, max_particles + 1):
        for kp in range(0, max_particles - ka + 1):
            if ka + kp == 0:
                continue
            th_a_opts = {tuple(sorted(angles_a[i % 2] for i in range(ka)))} \
                if ka else {()}
            if ka >= 2:
                th_a_opts.add(tuple([angles_a[0]] * ka))
            th_p_opts = {tuple(sorted(angles_p[i % 2] for i in range(kp)))} \
                if kp else {()}
            if kp >= 2:
                th_p_opts.add(tuple([angles_p[0]] * kp))
            for ta in th_a_opts:
                for tp in th_p_opts:
                    out.append(CanonicalState(1, ta, tp))
    return out


# ---------------------------------------------------------------------------
# grand-canonical inner products


def _omega_moments(law, omega, quad=720):
    """(mean, variance) of omega under an angular law (see GrandCanonicalParams)."""
    from latgas.lattice import TWO_PI
    if isinstance(law, str) and law == "uniform":
        th = (np.arange(quad) + 0.5) / quad * TWO_PI
        w = np.full(quad, 1.0 / quad)
    else:
        wts = np.asarray(law, dtype=float)
        m = wts.size
        th = (np.arange(m) + 0.5) / m * TWO_PI
        w = wts / wts.sum()
    vals = _omega_apply(omega, th)
    mean = float(np.sum(w * vals))
    var = float(np.sum(w * vals ** 2) - mean ** 2)
    return mean, var


def inner_product_closed_forms(gc, omega):
    """Diagonal entries of the current/gradient inner products.

    Keys name the pair; every entry is (the scalar multiplying I_2).
    Off-diagonal (i != k) entries vanish structurally and are not
    tabulated.
    """
    a_a, a_p = gc.alpha_a, gc.alpha_p
    al = a_a + a_p
    _, v_a = _omega_moments(gc.law_a, omega)
    _, v_p = _omega_moments(gc.law_p, omega)
    return {
        "j_a.j_a": a_a * (1 - al),
        "j_p.j_p": a_p * (1 - al),
        "j_a.j_p": 0.0,
        "jw_a.jw_a": a_a * (1 - al) * v_a,
        "jw_p.jw_p": a_p * (1 - al) * v_p,
        "jw_a.jw_p": 0.0,
        "j_a.jw_a": 0.0,
        "j_p.jw_p": 0.0,
        "grad_a.j_a": -a_a * (1 - a_a),
        "grad_a.j_p": a_a * a_p,
        "grad_p.j_a": a_a * a_p,
        "grad_p.j_p": -a_p * (1 - a_p),
        "grad_a.jw_a": 0.0,
        "grad_p.jw_p": 0.0,
        "gradw_a.j_a": 0.0,
        "gradw_a.jw_a": -a_a * v_a,
        "gradw_p.jw_p": -a_p * v_p,
        "gradw_a.jw_p": 0.0,
    }


def grand_canonical_inner_products(gc, omega, samples=10 ** 6, seed=0):
    """Closed forms vs Monte-Carlo estimates of the reduced two-site moments.

    Each inner product reduces to an expectation in the occupations of
    two fixed adjacent sites, which are i.i.d. under the product
    measure.  Returns a list of dicts with closed/estimate/stderr/z.
    """
    gc.validate()
    closed = inner_product_closed_forms(gc, omega)
    if gc.alpha_a + gc.alpha_p >= 1.0 or gc.alpha_a + gc.alpha_p <= 0.0:
        return [{"pair": k, "closed": v, "estimate": None, "stderr": None,
                 "z": None} for k, v in closed.items()]

    rng = np.random.Generator(np.random.PCG64(seed))
    from latgas.sampling import _sample_angles_hist

    def draw_site(count):
        u = rng.random(count)
        tag = np.zeros(count, dtype=np.int8)
        tag[u < gc.alpha_a] = ACTIVE
        tag[(u >= gc.alpha_a) & (u < gc.alpha_a + gc.alpha_p)] = PASSIVE
        th = np.zeros(count)
        for sp, law in ((ACTIVE, gc.law_a), (PASSIVE, gc.law_p)):
            m = tag == sp
            th[m] = _sample_angles_hist(law, int(m.sum()), rng)
        return tag, th

    t0, th0 = draw_site(samples)      # site 0
    t1, th1 = draw_site(samples)      # site e_i
    wb_a, _ = _omega_moments(gc.law_a, omega)
    wb_p, _ = _omega_moments(gc.law_p, omega)
    na0 = (t0 == ACTIVE).astype(float)
    np0 = (t0 == PASSIVE).astype(float)
    na1 = (t1 == ACTIVE).astype(float)
    np1 = (t1 == PASSIVE).astype(float)
    occ0 = na0 + np0
    wa0 = (_omega_apply(omega, th0) - wb_a) * na0
    wp0 = (_omega_apply(omega, th0) - wb_p) * np0
    wa1 = (_omega_apply(omega, th1) - wb_a) * na1
    wp1 = (_omega_apply(omega, th1) - wb_p) * np1

    # per-sample reduced integrands; notation: site "1" plays e_i, "0" plays 0
    estimators = {
        "j_a.j_a": na1 * (1 - occ0) * na1,
        "j_p.j_p": np1 * (1 - occ0) * np1,
        "j_a.j_p": na1 * (1 - occ0) * np1,
        "jw_a.jw_a": wa1 * (1 - occ0) * wa1,
        "jw_p.jw_p": wp1 * (1 - occ0) * wp1,
        "jw_a.jw_p": wa1 * (1 - occ0) * wp1,
        "j_a.jw_a": na1 * (1 - occ0) * wa1,
        "j_p.jw_p": np1 * (1 - occ0) * wp1,
        "grad_a.j_a": -(na1 - na0) * na1,
        "grad_a.j_p": -(na1 - na0) * np1,
        "grad_p.j_a": -(np1 - np0) * na1,
        "grad_p.j_p": -(np1 - np0) * np1,
        "grad_a.jw_a": -(na1 - na0) * wa1,
        "grad_p.jw_p": -(np1 - np0) * wp1,
        "gradw_a.j_a": -(wa1 - wa0) * na1,
        "gradw_a.jw_a": -(wa1 - wa0) * wa1,
        "gradw_p.jw_p": -(wp1 - wp0) * wp1,
        "gradw_a.jw_p": -(wa1 - wa0) * wp1,
    }
    out = []
    for pair, vals in estimators.items():
        est = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(samples))
        ref = closed[pair]
        if se > 0:
            z = (est - ref) / se
        else:
            z = 0.0 if abs(est - ref) < 1e-14 else math.inf
        out.append({"pair": pair, "closed": ref, "estimate": est,
                    "stderr": se, "z": z})
    return out


# ---------------------------------------------------------------------------
# confined generator and spectral gap


@dataclass
class GeneratorMatrix:
    """Sparse symmetric -L of the exclusion dynamics confined to B_l."""

    ks: CanonicalState
    minus_l: sparse.csr_matrix
    index: dict  # state key -> row


def _box_edges(side):
    edges = []
    for i in range(side):
        for j in range(side):
            if i + 1 < side:
                edges.append((i * side + j, (i + 1) * side + j))
            if j + 1 < side:
                edges.append((i * side + j, i * side + j + 1))
    return edges


def _state_key(tags, angles):
    return tuple(zip(tags.tolist(), angles.tolist()))


def build_generator(ks):
    """-L on the canonical hyperplane; unit rate per particle-hole edge."""
    tags, angles = _states(ks)
    m = tags.shape[0]
    index = {_state_key(tags[i], angles[i]): i for i in range(m)}
    edges = _box_edges(ks.side)
    rows, cols = [], []
    for i in range(m):
        t = tags[i]
        a = angles[i]
        for (u, v) in edges:
            if (t[u] == EMPTY) == (t[v] == EMPTY):
                continue  # both empty or both occupied: no particle-hole move
            t2 = t.copy()
            a2 = a.copy()
            t2[u], t2[v] = t2[v], t2[u]
            a2[u], a2[v] = a2[v], a2[u]
            rows.append(i)
            cols.append(index[_state_key(t2, a2)])
    adj = sparse.coo_matrix((np.ones(len(rows)), (rows, cols)),
                            shape=(m, m)).tocsr()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    minus_l = sparse.diags(deg) - adj
    return GeneratorMatrix(ks, minus_l.tocsr(), index)


def spectral_gap(gm, dense_cutoff=3000):
    """Second-smallest eigenvalue of -L (the smallest is 0)."""
    m = gm.minus_l.shape[0]
    if m < 2:
        raise ValueError("state space too small for a gap")
    if m <= dense_cutoff:
        vals = np.linalg.eigvalsh(gm.minus_l.toarray())
        return float(vals[1])
    vals = eigsh(gm.minus_l, k=2, sigma=0.0, which="LM",
                 return_eigenvectors=False)
    vals = np.sort(vals)
    if vals[0] > 1e-8:
        raise RuntimeError(f"eigensolve lost the zero mode: {vals}")
    return float(vals[1])


# ---------------------------------------------------------------------------
# T^omega members: sampling, decomposition, variance/Dirichlet ratio


@dataclass
class TOmegaMember:
    """f = sum_x (a n^a_x + b n^p_x + c w(theta)n^a_x + d w(theta)n^p_x) F_x.

    F_x(eta) = c0_x + sum_y mask[x, y] eta_y is occupancy-only (type- and
    angle-blind), hence an admissible coefficient function.
    """

    a: float
    b: float
    c: float
    d: float
    omega: object
    c0: np.ndarray       # (sites,)
    mask: np.ndarray     # (sites, sites)

    def eval(self, tags, angles):
        occm, coef = self.precompute(tags, angles)
        return self.eval_pre(occm, coef)

    def precompute(self, tags, angles):
        """Occupancy and per-site coefficient arrays; permutation-stable."""
        occm = (tags != EMPTY).astype(float)
        na = (tags == ACTIVE).astype(float)
        npp = (tags == PASSIVE).astype(float)
        w = _omega_apply(self.omega, angles)
        coef = (self.a * na + self.b * npp
                + w * (self.c * na + self.d * npp))
        return occm, coef

    def eval_pre(self, occm, coef, perm=None):
        if perm is not None:
            occm = occm[:, perm]
            coef = coef[:, perm]
        f_x = self.c0[None, :] + occm @ self.mask.T
        return (coef * f_x).sum(axis=1)


def sample_t_omega(sites, rng, omega):
    return TOmegaMember(
        a=rng.normal(), b=rng.normal(), c=rng.normal(), d=rng.normal(),
        omega=omega, c0=rng.normal(size=sites),
        mask=rng.normal(size=(sites, sites)))


def decompose_t_omega(ks, member):
    """Evaluate the four orthogonal components on the enumerated states.

    Returns (vals_f, [v1, v2, v3, v4]) with vals_f = v1+v2+v3+v4; the
    components are pairwise orthogonal under the canonical measure.
    """
    tags, angles = _states(ks)
    occm = (tags != EMPTY).astype(float)
    f_x = member.c0[None, :] + occm @ member.mask.T
    na = (tags == ACTIVE).astype(float)
    npp = (tags == PASSIVE).astype(float)
    w = _omega_apply(member.omega, angles)
    wb_a = ks.omega_bar(ACTIVE, member.omega)
    wb_p = ks.omega_bar(PASSIVE, member.omega)
    at = member.a + member.c * wb_a
    bt = member.b + member.d * wb_p
    chi_v = (ks.alpha_p / ks.alpha) * na - (ks.alpha_a / ks.alpha) * npp
    v1 = ((at * ks.alpha_a / ks.alpha + bt * ks.alpha_p / ks.alpha)
          * (occm * f_x).sum(axis=1))
    v2 = (at - bt) * (chi_v * f_x).sum(axis=1)
    v3 = member.c * (((w - wb_a) * na) * f_x).sum(axis=1)
    v4 = member.d * (((w - wb_p) * npp) * f_x).sum(axis=1)
    return v1 + v2 + v3 + v4, [v1, v2, v3, v4]


def variance_vs_dirichlet(ks, member):
    """Ratio E[f^2]/D(f) for the centered member; None if D(f) vanishes."""
    tags, angles = _states(ks)
    occm, coef = member.precompute(tags, angles)
    raw = member.eval_pre(occm, coef)
    vals = raw - raw.mean()
    var = float(np.mean(vals ** 2))
    edges = _box_edges(ks.side)
    dir_sum = 0.0
    for (u, v) in edges:
        sw = np.arange(ks.sites)
        sw[u], sw[v] = v, u
        raw_sw = member.eval_pre(occm, coef, perm=sw)
        # the centering constant cancels in the increment
        dir_sum += float(np.mean((raw_sw - raw) ** 2))
    dirichlet = 0.5 * dir_sum
    if dirichlet <= 1e-14:
        return None
    return var / dirichlet


# ---------------------------------------------------------------------------
# equivalence of ensembles


def ensemble_witnesses(ks):
    """Exact canonical vs grand-canonical expectations of witness observables.

    Witnesses are two-site cylinder functions at adjacent sites; the
    canonical values use the exchangeability closed forms, the
    grand-canonical values use the product measure at the empirical
    density of ks.  Returns {name: (canonical, grand)}.
    """
    s = ks.sites
    k, ka, kp = ks.k_total, ks.k_a, ks.k_p
    a_a, a_p, al = ks.alpha_a, ks.alpha_p, ks.alpha
    out = {}
    if k >= 2:
        pair = k * (k - 1) / (s * (s - 1))
        out["eta_a.eta_p"] = (ka * kp / (s * (s - 1)), a_a * a_p)
        if ka >= 2:
            out["eta_a.eta_a"] = (ka * (ka - 1) / (s * (s - 1)), a_a ** 2)
        out["chi.chi"] = (-a_a * a_p / (al ** 2 * (k - 1)) * pair, 0.0)
    out["eta.eta"] = (k * (k - 1) / (s * (s - 1)), al ** 2) if k >= 2 \
        else (0.0, al ** 2)
    return out
