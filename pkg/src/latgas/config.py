"""Flat key=value run configuration with strict validation.

Config files are plain text: one ``key = value`` pair per line, ``#``
comments, blank lines ignored.  Every subcommand has a fixed key
schema; unknown keys are rejected and all violations are reported
together.
"""

import math
from dataclasses import dataclass

from latgas.kmc import SimParams
from latgas.sampling import DensityProfile, SpeciesProfile

_PROFILE_KEYS = {}
for _side in ("active", "passive"):
    _PROFILE_KEYS.update({
        f"{_side}_family": (str, "constant"),
        f"{_side}_mass": (float, 0.0),
        f"{_side}_amp": (float, 0.0),
        f"{_side}_kx": (int, 1),
        f"{_side}_ky": (int, 0),
        f"{_side}_center_x": (float, 0.5),
        f"{_side}_center_y": (float, 0.5),
        f"{_side}_width": (float, 0.1),
        f"{_side}_ang_amp": (float, 0.0),
        f"{_side}_ang_mode": (int, 1),
    })

_COMMON = {"seed": (int, 0), "out": (str, "out")}

_DYN = {"d_t": (float, 1.0), "v0": (float, 0.0), "d_r": (float, 1.0),
        "t_end": (float, 0.1)}


def _int_list(text):
    return [int(v) for v in str(text).split(",") if v.strip() != ""]


def _float_list(text):
    return [float(v) for v in str(text).split(",") if v.strip() != ""]


SCHEMAS = {
    "simulate": {**_COMMON, **_DYN, **_PROFILE_KEYS,
                 "n": (int, 32), "eps": (float, 0.125),
                 "n_theta": (int, 8), "frames": (int, 5)},
    "pde": {**_COMMON, **_DYN, **_PROFILE_KEYS,
            "grid": (int, 32), "n_theta": (int, 8), "dt": (str, "auto"),
            "frames": (int, 5), "llf": (int, 0)},
    "msd": {**_COMMON, "alphas": (_float_list, [0.1, 0.3, 0.5, 0.7]),
            "side": (int, 128), "t_max": (float, 1000.0),
            "replicas": (int, 200)},
    "coeffs": {**_COMMON, "grid_points": (int, 10001)},
    "identities": {**_COMMON, "max_particles": (int, 4)},
    "gap": {**_COMMON, "l_values": (_int_list, [1, 2]),
            "members": (int, 100)},
    "converge": {**_COMMON, **_DYN, **_PROFILE_KEYS,
                 "n_list": (_int_list, [16, 32, 64]),
                 "eps_list": (_float_list, [0.125]),
                 "replicas": (int, 50), "frames": (int, 6),
                 "grid": (int, 64), "n_theta": (int, 8)},
}


@dataclass
class RunConfig:
    """Validated parameters of one subcommand invocation."""

    subcommand: str
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def profile(self):
        """DensityProfile built from the active_*/passive_* keys."""
        v = self.values
        species = {}
        for side in ("active", "passive"):
            species[side] = SpeciesProfile(
                family=v[f"{side}_family"], mass=v[f"{side}_mass"],
                amp=v[f"{side}_amp"], kx=v[f"{side}_kx"],
                ky=v[f"{side}_ky"],
                center=(v[f"{side}_center_x"], v[f"{side}_center_y"]),
                width=v[f"{side}_width"], ang_amp=v[f"{side}_ang_amp"],
                ang_mode=v[f"{side}_ang_mode"])
        prof = DensityProfile(active=species["active"],
                              passive=species["passive"])
        prof.validate()
        return prof

    def sim_params(self, n=None):
        v = self.values
        p = SimParams(n=n if n is not None else v.get("n"),
                      d_t=v["d_t"], v0=v["v0"], d_r=v["d_r"],
                      t_end=v["t_end"], seed=v["seed"])
        p.validate()
        return p


def parse_pairs(text):
    """key=value lines -> dict of raw strings; malformed lines collected."""
    pairs = {}
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected key = value, got {raw!r}")
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        if key in pairs:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        pairs[key] = val.strip()
    return pairs, errors


def _cross_validate(cfg):
    """Invariants spanning several keys; returns a list of messages."""
    errors = []
    v = cfg.values
    if cfg.subcommand in ("simulate", "pde", "converge"):
        try:
            cfg.profile()
        except ValueError as exc:
            errors.append(f"profile: {exc}")
    if cfg.subcommand == "simulate":
        try:
            cfg.sim_params()
        except ValueError as exc:
            errors.append(f"dynamics: {exc}")
    if cfg.subcommand == "converge":
        ns = v["n_list"]
        if any(n2 <= n1 for n1, n2 in zip(ns, ns[1:])) or not ns:
            errors.append("n_list must be strictly increasing and nonempty")
        for n in ns:
            try:
                cfg.sim_params(n=n)
            except ValueError as exc:
                errors.append(f"dynamics at N={n}: {exc}")
        for eps in v["eps_list"]:
            if not 0 < eps < 0.5:
                errors.append(f"eps {eps} outside (0, 0.5)")
            if v["grid"] < 2.0 / eps:
                errors.append(f"pde grid {v['grid']} does not resolve "
                              f"eps={eps} (need >= {2.0 / eps:g})")
        if v["frames"] < 2 or v["frames"] > 16:
            errors.append("frames must be in [2, 16]")
    if cfg.subcommand in ("msd",):
        if v["replicas"] < 2:
            errors.append("msd needs at least 2 replicas for a stderr")
    return errors


def load_config(path, subcommand, overrides=None):
    """Parse, type-check and validate; raises ValueError with all issues."""
    if subcommand not in SCHEMAS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    schema = SCHEMAS[subcommand]
    with open(path) as fh:
        pairs, errors = parse_pairs(fh.read())
    if overrides:
        pairs.update({k: str(v) for k, v in overrides.items()})
    values = {k: default for k, (_, default) in schema.items()}
    for key, raw in pairs.items():
        if key not in schema:
            errors.append(f"unknown key {key!r} for subcommand {subcommand}")
            continue
        typ = schema[key][0]
        try:
            values[key] = typ(raw)
        except (TypeError, ValueError):
            errors.append(f"key {key!r}: cannot parse {raw!r} as "
                          f"{getattr(typ, '__name__', str(typ))}")
    cfg = RunConfig(subcommand, values)
    if not errors:
        errors.extend(_cross_validate(cfg))
    if errors:
        raise ValueError("invalid config:\n  " + "\n  ".join(errors))
    return cfg


def default_config(subcommand, **overrides):
    """RunConfig from schema defaults plus keyword overrides (validated)."""
    schema = SCHEMAS[subcommand]
    values = {k: default for k, (_, default) in schema.items()}
    for k, v in overrides.items():
        if k not in schema:
            raise ValueError(f"unknown key {k!r} for subcommand {subcommand}")
        values[k] = v
    cfg = RunConfig(subcommand, values)
    errors = _cross_validate(cfg)
    if errors:
        raise ValueError("invalid config:\n  " + "\n  ".join(errors))
    return cfg


def config_text(cfg):
    """Canonical serialization (sorted keys) used for hashing/manifests."""
    lines = [f"subcommand = {cfg.subcommand}"]
    for k in sorted(cfg.values):
        v = cfg.values[k]
        if isinstance(v, list):
            v = ",".join(str(x) for x in v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"
