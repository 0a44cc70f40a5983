"""Periodic 2D lattice geometry and the microscopic configuration state."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

EMPTY = 0
ACTIVE = 1
PASSIVE = 2

_TAG_CHARS = {EMPTY: "E", ACTIVE: "A", PASSIVE: "P"}
_CHAR_TAGS = {v: k for k, v in _TAG_CHARS.items()}

TWO_PI = 2.0 * math.pi

# Unit steps +e1, -e1, +e2, -e2 as (di, dj) row-major offsets;
# e1 moves the first index, e2 the second.
DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def wrap_angle(theta):
    """Normalize an angle (scalar or array) into [0, 2*pi).

    Single canonical wrap used everywhere so that equal orientations
    compare equal after any sequence of updates.
    """
    return np.mod(theta, TWO_PI)


def neighbor(idx, direction, n):
    """Torus-shifted neighbor of site `idx` = (i, j) along `direction`.

    `direction` is one of the four (di, dj) unit steps in DIRECTIONS.
    """
    i, j = idx
    di, dj = direction
    return ((i + di) % n, (j + dj) % n)


def box_iter(center, l, n):
    """Yield the (2l+1)^2 torus-wrapped indices of the box B_l(center).

    Raises ValueError if the box does not fit on the lattice.
    """
    if 2 * l + 1 > n:
        raise ValueError(f"box radius {l} too large for lattice side {n}")
    ci, cj = center
    for di in range(-l, l + 1):
        for dj in range(-l, l + 1):
            yield ((ci + di) % n, (cj + dj) % n)


@dataclass
class Configuration:
    """Microscopic state: per-site occupancy tag and orientation angle.

    tags[i, j] is EMPTY/ACTIVE/PASSIVE; angles[i, j] is in [0, 2*pi) and
    is 0 whenever the site is empty.  Particle counts are cached.
    """

    n: int
    tags: np.ndarray = None
    angles: np.ndarray = None
    k_active: int = field(default=0)
    k_passive: int = field(default=0)

    def __post_init__(self):
        if self.tags is None:
            self.tags = np.zeros((self.n, self.n), dtype=np.int8)
        if self.angles is None:
            self.angles = np.zeros((self.n, self.n), dtype=np.float64)
        self.tags = np.asarray(self.tags, dtype=np.int8)
        self.angles = np.asarray(self.angles, dtype=np.float64)
        self.recount()

    def recount(self):
        self.k_active = int(np.count_nonzero(self.tags == ACTIVE))
        self.k_passive = int(np.count_nonzero(self.tags == PASSIVE))

    def set_site(self, idx, tag, angle=0.0):
        """Write one site, keeping counts and the empty-angle convention."""
        old = self.tags[idx]
        if old == ACTIVE:
            self.k_active -= 1
        elif old == PASSIVE:
            self.k_passive -= 1
        self.tags[idx] = tag
        self.angles[idx] = 0.0 if tag == EMPTY else wrap_angle(angle)
        if tag == ACTIVE:
            self.k_active += 1
        elif tag == PASSIVE:
            self.k_passive += 1

    def swap(self, x, direction):
        """Exchange the contents of x and its neighbor x+direction."""
        y = neighbor(x, direction, self.n)
        self.tags[x], self.tags[y] = self.tags[y], self.tags[x]
        self.angles[x], self.angles[y] = self.angles[y], self.angles[x]

    def copy(self):
        return Configuration(self.n, self.tags.copy(), self.angles.copy())

    # -- snapshot format -------------------------------------------------

    def to_snapshot(self):
        """JSON-serializable snapshot; angles omitted for empty sites."""
        sites = []
        flat_t = self.tags.ravel()
        flat_a = self.angles.ravel()
        for t, a in zip(flat_t, flat_a):
            if t == EMPTY:
                sites.append([_TAG_CHARS[EMPTY]])
            else:
                sites.append([_TAG_CHARS[int(t)], float(a)])
        return {"n": self.n, "sites": sites}

    @classmethod
    def from_snapshot(cls, snap):
        n = snap["n"]
        sites = snap["sites"]
        if len(sites) != n * n:
            raise ValueError(f"snapshot has {len(sites)} sites, expected {n * n}")
        tags = np.zeros(n * n, dtype=np.int8)
        angles = np.zeros(n * n, dtype=np.float64)
        for k, entry in enumerate(sites):
            tag = _CHAR_TAGS[entry[0]]
            tags[k] = tag
            if tag != EMPTY:
                angles[k] = entry[1]
        return cls(n, tags.reshape(n, n), angles.reshape(n, n))

    def to_json(self):
        return json.dumps(self.to_snapshot())

    @classmethod
    def from_json(cls, text):
        return cls.from_snapshot(json.loads(text))
