"""Hot numeric kernels, JIT-compiled with numba when available.

Set the environment variable ``LATGAS_NO_NUMBA=1`` to force the pure
Python/NumPy fallback path (identical semantics, identical random
streams, much slower).  All kernels draw randomness from the legacy
MT19937 stream and seed it themselves, so a (seed, path) pair fully
determines the output.
"""

import math
import os

import numpy as np

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a hard dep, but be safe
    _njit = None

USE_NUMBA = _njit is not None and os.environ.get("LATGAS_NO_NUMBA", "0") != "1"

TWO_PI = 2.0 * math.pi


def _jit(fn):
    if USE_NUMBA:
        return _njit(cache=True)(fn)
    return fn


def neighbor_table(n):
    """4 x n^2 table of torus neighbors (+e1, -e1, +e2, -e2), row-major.

    e1 steps the first (row) index, e2 the second (column) index.
    """
    idx = np.arange(n * n)
    i, j = idx // n, idx % n
    return np.stack([
        ((i + 1) % n) * n + j,
        ((i - 1) % n) * n + j,
        i * n + (j + 1) % n,
        i * n + (j - 1) % n,
    ]).astype(np.int64)


def _kmc_run(tag, angle, last_t, pos, site2part, neigh, big_n, d_t, v0, d_r,
             t0, t_end, max_events, seed):
    """Advance the exclusion dynamics from t0 towards t_end.

    Uniformized thinning: candidate events arrive at rate
    4*K*(N^2*D_T + N*v0/2); each candidate picks a uniform (particle,
    direction) pair and is accepted with probability rate/bound.
    Orientation angles are refreshed lazily, only when a rate reads them.

    Mutates tag/angle/last_t/pos/site2part in place.  Returns
    (t, accepted, attempts).  Stops early once `accepted` reaches
    max_events (pass -1 for no cap).
    """
    np.random.seed(seed)
    K = pos.shape[0]
    bound = big_n * big_n * d_t + big_n * 0.5 * v0
    lam = 4.0 * K * bound
    t = t0
    accepted = 0
    attempts = 0
    if K == 0 or lam <= 0.0:
        return t_end, 0, 0
    if max_events == 0:
        return t0, 0, 0
    while True:
        t += -math.log(np.random.random()) / lam
        if t >= t_end:
            t = t_end
            break
        attempts += 1
        v = np.random.randint(0, 4 * K)
        k = v >> 2
        d = v & 3
        x = pos[k]
        y = neigh[d, x]
        if tag[y] != 0:
            continue
        if tag[x] == 1 and v0 > 0.0:
            dt = t - last_t[x]
            if d_r > 0.0 and dt > 0.0:
                angle[x] = (angle[x]
                            + math.sqrt(2.0 * d_r * dt) * np.random.normal()
                            ) % TWO_PI
            last_t[x] = t
            if d == 0:
                comp = math.cos(angle[x])
            elif d == 1:
                comp = -math.cos(angle[x])
            elif d == 2:
                comp = math.sin(angle[x])
            else:
                comp = -math.sin(angle[x])
            rate = big_n * big_n * d_t + big_n * 0.5 * v0 * comp
        else:
            rate = big_n * big_n * d_t
        if np.random.random() * bound <= rate:
            tag[y] = tag[x]
            tag[x] = 0
            angle[y] = angle[x]
            angle[x] = 0.0
            last_t[y] = last_t[x]
            last_t[x] = 0.0
            site2part[y] = k
            site2part[x] = -1
            pos[k] = y
            accepted += 1
            if max_events >= 0 and accepted >= max_events:
                break
    return t, accepted, attempts


def _ssep_msd(occ, pos, neigh, t_end, exclude, seed, disp):
    """Rate-1-per-directed-edge SSEP on the n x n torus.

    Every particle is tagged: `disp` (K x 2, int64) accumulates the
    unwrapped displacement of each particle.  With exclude=False the
    particles are independent walkers (calibration mode).
    """
    np.random.seed(seed)
    K = pos.shape[0]
    if K == 0:
        return 0.0
    lam = 4.0 * K
    # Rates are constant in time, so the candidate count over [0, t_end]
    # is Poisson(lam * t_end); no per-event clock needed.
    n_attempts = np.random.poisson(lam * t_end)
    for _ in range(n_attempts):
        v = np.random.randint(0, 4 * K)
        k = v >> 2
        d = v & 3
        x = pos[k]
        y = neigh[d, x]
        if exclude and occ[y] != 0:
            continue
        occ[x] -= 1
        occ[y] += 1
        pos[k] = y
        if d == 0:
            disp[k, 0] += 1
        elif d == 1:
            disp[k, 0] -= 1
        elif d == 2:
            disp[k, 1] += 1
        else:
            disp[k, 1] -= 1
    return t_end


kmc_run = _jit(_kmc_run)
ssep_msd = _jit(_ssep_msd)

# Un-jitted references kept for the benchmark harness.
kmc_run_py = _kmc_run
ssep_msd_py = _ssep_msd
