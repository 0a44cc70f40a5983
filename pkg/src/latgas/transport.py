"""Closed-form transport coefficients and a tagged-particle cross-check.

The self-diffusion coefficient of the 2D symmetric exclusion process is
represented by its cubic polynomial approximation

    d_s(a) = (1 - a) * (1 - g*a + g*(2g-1)/(2g+1) * a^2),   g = pi/2 - 1,

from which the collective coefficients D(a) = (1 - d_s(a))/a and
s(a) = D(a) - 1 follow.  A Monte-Carlo mean-squared-displacement
estimator of d_s provides an independent validation route.
"""

import math
from dataclasses import dataclass

import numpy as np

from latgas import _kernels

GAMMA = math.pi / 2.0 - 1.0

_C3 = GAMMA * (2.0 * GAMMA - 1.0) / (2.0 * GAMMA + 1.0)

# Below this density the quotient (1 - d_s)/a is evaluated via the
# expanded polynomial to avoid catastrophic cancellation.
ALPHA_TINY = 1e-8


def _check_density(alpha):
    a = np.asarray(alpha, dtype=np.float64)
    if np.any(a < 0.0) or np.any(a > 1.0):
        raise ValueError("density must lie in [0, 1]")
    return a


def d_s(alpha):
    """Self-diffusion coefficient (cubic approximation), alpha in [0,1]."""
    a = _check_density(alpha)
    return (1.0 - a) * (1.0 - GAMMA * a + _C3 * a * a)


def d_s_prime(alpha):
    """Derivative of the cubic d_s."""
    a = _check_density(alpha)
    # d/da [(1-a)(1 - g a + c a^2)] = -(1 - g a + c a^2) + (1-a)(-g + 2 c a)
    return -(1.0 - GAMMA * a + _C3 * a * a) + (1.0 - a) * (-GAMMA + 2.0 * _C3 * a)


def big_d(alpha):
    """Collective diffusion factor D(a) = (1 - d_s(a)) / a, extended to a=0."""
    a = _check_density(alpha)
    scalar = np.isscalar(alpha) or (hasattr(a, "ndim") and a.ndim == 0)
    a = np.atleast_1d(a)
    out = np.empty_like(a)
    small = a <= ALPHA_TINY
    # 1 - d_s(a) = (1+g) a - (g + c) a^2 + c a^3, exact expansion of the cubic
    out[small] = (1.0 + GAMMA) - (GAMMA + _C3) * a[small] + _C3 * a[small] ** 2
    big = ~small
    out[big] = (1.0 - d_s(a[big])) / a[big]
    return out[0] if scalar else out


def s_coeff(alpha):
    """Crowding slowdown s(a) = D(a) - 1."""
    return big_d(alpha) - 1.0


@dataclass
class MobilityMatrix:
    """4x4 block mobility matrix; each block is a scalar times I_2.

    Stored as the 2x2 array of scalar block coefficients
    [[aa, ap], [pa, pp]].
    """

    blocks: np.ndarray

    def dense(self):
        """Expand to the full 4x4 matrix over (active, passive) x (x, y)."""
        m = np.zeros((4, 4))
        for bi in range(2):
            for bj in range(2):
                m[2 * bi:2 * bi + 2, 2 * bj:2 * bj + 2] = (
                    self.blocks[bi, bj] * np.eye(2))
        return m


def mobility(alpha_a, alpha_p):
    """Mobility matrix at species densities (alpha_a, alpha_p)."""
    if alpha_a < 0 or alpha_p < 0:
        raise ValueError("species densities must be nonnegative")
    alpha = alpha_a + alpha_p
    if alpha <= 0.0 or alpha > 1.0:
        raise ValueError("total density must lie in (0, 1]")
    ds = float(d_s(alpha))
    cross = alpha_a * alpha_p / alpha
    aa = cross * ds + alpha_a ** 2 * (1.0 - alpha) / alpha
    pp = cross * ds + alpha_p ** 2 * (1.0 - alpha) / alpha
    off = -cross * ds + cross * (1.0 - alpha)
    return MobilityMatrix(np.array([[aa, off], [off, pp]]))


def estimate_ds_msd(alpha, side, t_max, replicas, seed, exclude=True):
    """Tagged-particle MSD estimate of d_s at density alpha.

    Runs `replicas` independent SSEP boxes (rate 1 per directed edge) on
    a side x side torus, each initialized from the product measure at
    density alpha, tracking the unwrapped displacement of every
    particle.  Returns (estimate, stderr) for MSD/(4*t_max), with the
    stderr taken over replica means.

    exclude=False turns off the exclusion rule (free walkers), which is
    the alpha -> 0 calibration limit and must return 1.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1) for the MSD estimator")
    rng_root = np.random.SeedSequence(seed)
    child_seeds = rng_root.generate_state(replicas)
    neigh = _kernels.neighbor_table(side)
    per_rep = np.empty(replicas)
    for r in range(replicas):
        rep_rng = np.random.Generator(np.random.PCG64(child_seeds[r]))
        occ = (rep_rng.random(side * side) < alpha).astype(np.int8)
        pos = np.flatnonzero(occ).astype(np.int64)
        if pos.size == 0:
            # resample until at least one particle exists
            while pos.size == 0:
                occ = (rep_rng.random(side * side) < alpha).astype(np.int8)
                pos = np.flatnonzero(occ).astype(np.int64)
        disp = np.zeros((pos.size, 2), dtype=np.int64)
        kernel_seed = int(child_seeds[r]) % (2 ** 32 - 1)
        _kernels.ssep_msd(occ, pos, neigh, float(t_max), exclude,
                          kernel_seed, disp)
        per_rep[r] = np.mean(disp[:, 0] ** 2.0 + disp[:, 1] ** 2.0) / (4.0 * t_max)
    est = float(np.mean(per_rep))
    stderr = float(np.std(per_rep, ddof=1) / math.sqrt(replicas))
    return est, stderr
