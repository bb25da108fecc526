"""Flat ``section.key`` run configuration with typed defaults.

Values may be given in a config file (``section.key = value`` lines, ``#``
comments) and overridden by ``--set section.key=value``.  Keys whose
default is :data:`DERIVED` are computed from other values by
:meth:`RunConfig.resolve`; setting them explicitly overrides the
derivation.  Unknown keys are an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError

__all__ = ["DERIVED", "SCHEMA", "RunConfig", "parse_config_text", "load_config"]


class _Derived:
    def __repr__(self):
        return "DERIVED"


DERIVED = _Derived()


def _floats(text):
    if isinstance(text, (tuple, list)):
        return tuple(float(v) for v in text)
    parts = [p for p in str(text).replace(";", ",").split(",") if p.strip()]
    return tuple(float(p) for p in parts)


def _str(text):
    return str(text).strip()


# key -> (parser, default); DERIVED defaults are filled in by resolve()
SCHEMA = {
    "run.rng_seed": (int, 12345),

    "beam.W0": (float, 1.0),
    "beam.k": (float, 100.0),
    "beam.z0": (float, DERIVED),          # k W0^2 / 2
    "beam.lam": (float, DERIVED),         # 1 / k
    "beam.curvature": (_str, "standard"),

    "slits.a": (float, 3.0),
    "slits.x_min": (float, -15.0),
    "slits.x_max": (float, 15.0),
    "slits.z_screen": (float, DERIVED),   # 10 z0
    "slits.n_seeds": (int, 200),
    "slits.seed_halfwidth": (float, DERIVED),  # a + 2 W0
    "slits.screen_samples": (int, 3001),
    "slits.rel_prominence": (float, 0.1),
    "slits.grid_nx": (int, 301),
    "slits.grid_nz": (int, 101),
    "slits.path_stride": (int, 100),

    "integrator.dz": (float, DERIVED),    # z0 / 2000
    "integrator.max_steps": (int, 1_000_000),
    "integrator.vz_min": (float, 0.5),
    "integrator.h_fd": (float, DERIVED),  # min(W0, lam) / 100
    "integrator.floor_rel": (float, 1e-12),

    "equivariance.n": (int, 20000),
    "equivariance.bins": (int, 40),
    "equivariance.dz": (float, DERIVED),  # z0 / 25
    "equivariance.x_min": (float, DERIVED),  # slits.x_min
    "equivariance.x_max": (float, DERIVED),  # slits.x_max
    "equivariance.tv_max": (float, 0.02),

    "lattice.n": (int, 16),
    "lattice.h": (float, DERIVED),        # 2 pi / n
    "lattice.modes": (_floats, (2.0, 1.0, 1.0, 0.0)),
    "lattice.eps": (_floats, (0.0, 0.0, 0.0, 1.0)),
    "lattice.div_eps": (_floats, (1.0, -2.0, 0.0, 0.0)),
    "lattice.null_modes": (_floats, (3.0, 2.0, 2.0, 1.0)),
    "lattice.phase": (float, 0.3),
    "lattice.div_tol": (float, 1e-6),

    "caratheodory.m": (float, 1.0),
    "caratheodory.c": (float, 1.0),
    "caratheodory.rapidity": (float, 0.7),
    "caratheodory.scales": (_floats, (0.5, 1.0, 7.3)),
    "caratheodory.s_max": (float, 10.0),
    "caratheodory.steps": (int, 200),

    "inversion.n0c": (float, 1.0),
    "inversion.pi": (_floats, DERIVED),   # (n0c, 0, 0, 0)
    "inversion.s": (float, 1.0),
    "inversion.tol": (float, 1e-9),
    "inversion.n_random": (int, 100),

    "fresnel.n": (int, 4096),
    "fresnel.x_min": (float, -16.0),
    "fresnel.x_max": (float, 16.0),
    "fresnel.z_factors": (_floats, (0.5, 1.0, 2.0, 3.0)),
    "fresnel.width_tol": (float, 0.005),
}


def _format_value(v):
    if isinstance(v, tuple):
        return ",".join("%.17g" % x for x in v)
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


@dataclass
class RunConfig:
    """Raw user settings; call :meth:`resolve` for a complete typed mapping."""

    settings: dict = field(default_factory=dict)

    def set(self, key, value):
        key = key.strip()
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        parser = SCHEMA[key][0]
        try:
            self.settings[key] = parser(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None

    def set_assignment(self, text):
        key, sep, value = text.partition("=")
        if not sep:
            raise ConfigError(f"expected section.key=value, got {text!r}")
        self.set(key, value.strip())

    def update(self, mapping):
        for k, v in mapping.items():
            self.set(k, v)
        return self

    def resolve(self) -> dict:
        """Every schema key with a concrete value, derived ones included."""
        r = {k: self.settings.get(k, default) for k, (_, default) in SCHEMA.items()}

        def fill(key, value):
            if r[key] is DERIVED:
                r[key] = value

        W0, k = r["beam.W0"], r["beam.k"]
        if not (W0 > 0 and k > 0):
            raise ConfigError("beam.W0 and beam.k must be > 0")
        fill("beam.z0", k * W0 * W0 / 2.0)
        fill("beam.lam", 1.0 / k)
        z0 = r["beam.z0"]
        if abs(W0 - math.sqrt(2.0 * z0 / k)) > 1e-12 * W0:
            raise ConfigError("beam.z0 inconsistent with beam.W0 and beam.k")
        fill("slits.z_screen", 10.0 * z0)
        fill("slits.seed_halfwidth", r["slits.a"] + 2.0 * W0)
        fill("integrator.dz", z0 / 2000.0)
        fill("integrator.h_fd", min(W0, r["beam.lam"]) / 100.0)
        fill("equivariance.dz", z0 / 25.0)
        fill("equivariance.x_min", r["slits.x_min"])
        fill("equivariance.x_max", r["slits.x_max"])
        fill("lattice.h", 2.0 * math.pi / r["lattice.n"])
        fill("inversion.pi", (r["inversion.n0c"], 0.0, 0.0, 0.0))
        for key in ("lattice.modes", "lattice.eps", "lattice.div_eps", "lattice.null_modes",
                    "inversion.pi"):
            if len(r[key]) != 4:
                raise ConfigError(f"{key} needs 4 components")
        for key in ("slits.n_seeds", "equivariance.n", "equivariance.bins", "lattice.n",
                    "fresnel.n", "slits.path_stride", "slits.grid_nx", "slits.grid_nz"):
            if r[key] < 1:
                raise ConfigError(f"{key} must be >= 1")
        return r

    def echo(self):
        """Resolved values as ordered ``(key, text)`` pairs for output headers."""
        return [(k, _format_value(v)) for k, v in sorted(self.resolve().items())]


def parse_config_text(text) -> RunConfig:
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected section.key = value")
        cfg.set_assignment(line)
    return cfg


def load_config(path=None, overrides=(), rng_seed=None) -> RunConfig:
    """Config file (optional), then ``--set`` overrides, then ``--rng-seed``."""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            cfg = parse_config_text(fh.read())
    else:
        cfg = RunConfig()
    for item in overrides:
        cfg.set_assignment(item)
    if rng_seed is not None:
        cfg.set("run.rng_seed", rng_seed)
    return cfg
