"""Exact event-driven simulation of the accelerated exclusion dynamics.

On the macroscopic (diffusive) time scale the per-move rates are
N^2*D_T for passive particles and N^2*D_T + N*(v0/2) z.e(theta) for
active ones, with exclusion; orientations undergo independent Brownian
motion with constant D_R.  Jumps are generated by uniformized thinning
against the maximal single-move bound, which makes the sampled law
exact (no time-discretization error).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from latgas import _kernels
from latgas.lattice import ACTIVE, EMPTY, PASSIVE, Configuration, TWO_PI, neighbor

_DIR_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))  # +e1, -e1, +e2, -e2


@dataclass
class SimParams:
    """Model constants of the microscopic dynamics."""

    n: int
    d_t: float
    v0: float
    d_r: float
    t_end: float
    seed: int

    def validate(self):
        if self.n < 1:
            raise ValueError("lattice side must be positive")
        if self.d_t <= 0:
            raise ValueError("translational diffusion constant must be > 0")
        if self.v0 < 0 or self.d_r < 0:
            raise ValueError("v0 and D_R must be nonnegative")
        # all jump rates must stay nonnegative: N^2 D_T - N v0/2 >= 0
        if self.v0 > 0 and self.n <= self.v0 / (2.0 * self.d_t):
            raise ValueError(
                "lattice side too small for rate positivity: need "
                f"N > v0/(2 D_T) = {self.v0 / (2 * self.d_t):g}")
        bound = self.n ** 2 * self.d_t + self.n * self.v0 / 2.0
        if not math.isfinite(4.0 * self.n ** 2 * bound):
            raise ValueError("rate bound overflows")

    @property
    def move_bound(self):
        """Uniform upper bound on any single-move rate."""
        return self.n ** 2 * self.d_t + self.n * self.v0 / 2.0


@dataclass
class SimClock:
    t: float = 0.0
    event_count: int = 0
    last_update: np.ndarray = None  # per-site angle timestamps

    @classmethod
    def fresh(cls, n):
        return cls(0.0, 0, np.zeros((n, n), dtype=np.float64))


def jump_rate(cfg, params, x, direction):
    """Rate (events per macroscopic time) of the move x -> x+direction."""
    t = cfg.tags[x]
    if t == EMPTY:
        return 0.0
    y = neighbor(x, direction, cfg.n)
    if cfg.tags[y] != EMPTY:
        return 0.0
    base = params.n ** 2 * params.d_t
    if t == PASSIVE:
        return base
    di, dj = direction
    theta = cfg.angles[x]
    # z . e(theta) with e1 along the first index, e2 along the second
    comp = di * math.cos(theta) + dj * math.sin(theta)
    return base + params.n * 0.5 * params.v0 * comp


def refresh_angle(cfg, x, dt, d_r, rng):
    """Advance the Brownian orientation at site x by elapsed time dt."""
    if dt < 0:
        raise ValueError("elapsed time must be nonnegative")
    if cfg.tags[x] == EMPTY or dt == 0.0 or d_r == 0.0:
        return
    cfg.angles[x] = (cfg.angles[x]
                     + math.sqrt(2.0 * d_r * dt) * rng.standard_normal()
                     ) % TWO_PI


def sync_angles(cfg, clock, d_r, rng, t=None):
    """Refresh every occupied site's angle to time t (default clock.t)."""
    if t is None:
        t = clock.t
    occ = cfg.tags != EMPTY
    dt = t - clock.last_update
    if np.any(dt < -1e-12):
        raise ValueError("sync time precedes a site timestamp")
    dt = np.maximum(dt, 0.0)
    if d_r > 0.0:
        noise = rng.standard_normal(cfg.angles.shape)
        cfg.angles[occ] = np.mod(
            cfg.angles[occ] + np.sqrt(2.0 * d_r * dt[occ]) * noise[occ], TWO_PI)
    clock.last_update[...] = t


def step(cfg, clock, params, rng):
    """Advance to the next accepted jump (or to t_end), mutating cfg/clock.

    Reference implementation of one thinning event chain; the long-run
    path goes through the compiled kernel in `run`.  Returns True if a
    jump was executed, False if the horizon was reached first.
    """
    k_tot = cfg.k_active + cfg.k_passive
    if k_tot == 0:
        clock.t = params.t_end
        return False
    bound = params.move_bound
    lam = 4.0 * k_tot * bound
    particles = np.argwhere(cfg.tags != EMPTY)
    while True:
        clock.t += rng.exponential(1.0 / lam)
        if clock.t >= params.t_end:
            clock.t = params.t_end
            return False
        pick = rng.integers(0, 4 * k_tot)
        x = tuple(particles[pick >> 2])
        direction = _DIR_STEPS[pick & 3]
        if cfg.tags[x] == ACTIVE and params.v0 > 0:
            refresh_angle(cfg, x, clock.t - clock.last_update[x],
                          params.d_r, rng)
            clock.last_update[x] = clock.t
        rate = jump_rate(cfg, params, x, direction)
        accept_p = rate / bound
        assert 0.0 <= accept_p <= 1.0
        if rng.random() < accept_p:
            y = neighbor(x, direction, cfg.n)
            cfg.swap(x, direction)
            clock.last_update[y] = clock.last_update[x]
            clock.last_update[x] = clock.t
            clock.event_count += 1
            return True


def _flatten_state(cfg, clock):
    n = cfg.n
    tag = cfg.tags.ravel().copy()
    angle = cfg.angles.ravel().copy()
    last_t = clock.last_update.ravel().copy()
    pos = np.flatnonzero(tag != EMPTY).astype(np.int64)
    site2part = np.full(n * n, -1, dtype=np.int64)
    site2part[pos] = np.arange(pos.size)
    return tag, angle, last_t, pos, site2part


def run(cfg0, params, observer_times=(), observer=None, max_events=-1):
    """Run the dynamics to params.t_end, calling `observer` at the given times.

    observer_times must be sorted and within [0, t_end]; at each observer
    time all angles are synchronized before `observer(t, cfg)` is called.
    Returns (final Configuration, SimClock).  Deterministic given
    params.seed.
    """
    params.validate()
    times = list(observer_times)
    if any(t1 > t2 for t1, t2 in zip(times, times[1:])):
        raise ValueError("observer times must be sorted")
    if times and (times[0] < 0 or times[-1] > params.t_end):
        raise ValueError("observer times must lie in [0, t_end]")

    cfg = cfg0.copy()
    clock = SimClock.fresh(cfg.n)
    neigh = _kernels.neighbor_table(cfg.n)
    seedseq = np.random.SeedSequence(params.seed)
    sync_rng = np.random.Generator(np.random.PCG64(seedseq.spawn(1)[0]))
    kernel_seeds = seedseq.generate_state(len(times) + 1)

    tag, angle, last_t, pos, site2part = _flatten_state(cfg, clock)

    def rebuild():
        c = Configuration(cfg.n, tag.reshape(cfg.n, cfg.n).copy(),
                          angle.reshape(cfg.n, cfg.n).copy())
        return c

    segment_ends = times + [params.t_end]
    seg = 0
    for t_stop in segment_ends:
        remaining = -1 if max_events < 0 else max(max_events - clock.event_count, 0)
        t_new, acc, att = _kernels.kmc_run(
            tag, angle, last_t, pos, site2part, neigh,
            params.n, params.d_t, params.v0, params.d_r,
            clock.t, float(t_stop), remaining,
            int(kernel_seeds[seg]) % (2 ** 32 - 1))
        clock.t = t_new
        clock.event_count += acc
        # synchronize angles at the stop time
        occ_sites = pos
        dt = clock.t - last_t[occ_sites]
        if params.d_r > 0.0 and occ_sites.size:
            noise = sync_rng.standard_normal(occ_sites.size)
            angle[occ_sites] = np.mod(
                angle[occ_sites] + np.sqrt(2.0 * params.d_r
                                           * np.maximum(dt, 0.0)) * noise,
                TWO_PI)
        last_t[occ_sites] = clock.t
        if seg < len(times) and observer is not None:
            observer(clock.t, rebuild())
        seg += 1
        if max_events >= 0 and clock.event_count >= max_events:
            break

    out = rebuild()
    clock.last_update = last_t.reshape(cfg.n, cfg.n)
    return out, clock
