"""Integral curves of planar velocity fields: Bohmian trajectories and rays.

Bohmian trajectories are integrated in the forward coordinate z with
``dx/dz = vx/vz`` using fixed-step classical RK4.  Seeds are integrated
as a vectorized batch; each trajectory stops independently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import SeedInvalid, ZeroDensityRange

__all__ = [
    "Termination",
    "Trajectory",
    "IntegratorConfig",
    "integrate_bohmian",
    "integrate_bohmian_batch",
    "integrate_eikonal_ray",
    "seed_uniform",
    "seed_density_sampled",
    "landing_histogram",
    "terminal_x",
    "ordering_violations",
]


class Termination(enum.Enum):
    REACHED_SCREEN = "ReachedScreen"
    LEFT_DOMAIN = "LeftDomain"
    DENSITY_FLOOR = "DensityFloor"
    MAX_STEPS = "MaxSteps"


@dataclass
class Trajectory:
    """Ordered ``(x, z)`` points, shape ``(n, 2)``, with a sqrt(rho) seed weight."""

    points: np.ndarray
    weight: float
    terminated_by: Termination

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def z(self):
        return self.points[:, 1]


@dataclass(frozen=True)
class IntegratorConfig:
    dz: float
    z_screen: float
    x_bounds: float
    max_steps: int = 1_000_000
    vz_min: float = 0.5

    def __post_init__(self):
        if not self.dz > 0:
            raise ValueError("dz must be > 0")
        if not self.max_steps > 0:
            raise ValueError("max_steps must be > 0")
        if not self.vz_min > 0:
            raise ValueError("vz_min must be > 0")
        if not self.x_bounds > 0:
            raise ValueError("x_bounds must be > 0")


def _z_grid(z_start, cfg):
    """Step boundaries from z_start to z_screen; the last step is clipped."""
    span = cfg.z_screen - z_start
    if span <= 0:
        return np.array([z_start])
    n = int(math.ceil(span / cfg.dz - 1e-9))
    zs = z_start + cfg.dz * np.arange(n + 1)
    zs[-1] = cfg.z_screen
    return zs


def integrate_bohmian_batch(seeds_x, z_start, field, cfg: IntegratorConfig,
                            weight=None, keep_path=True):
    """Integrate many seeds through ``field(x, z) -> (vx, vz, valid)``.

    ``weight`` is an optional callable ``rho(x, z)``; trajectory weights are
    ``sqrt(rho)`` at the seed (1.0 if omitted).  With ``keep_path=False``
    only the seed and the final point are stored.

    Raises :class:`SeedInvalid` if any seed has an invalid field or
    ``vz < vz_min``.
    """
    x = np.array(seeds_x, dtype=float).ravel()
    n = x.size
    vx0, vz0, ok0 = field(x, np.full(n, z_start))
    bad = ~ok0 | ~(vz0 >= cfg.vz_min)
    if np.any(bad):
        idx = np.flatnonzero(bad)
        raise SeedInvalid(f"{idx.size} invalid seed(s), first at x={x[idx[0]]!r}")
    w = np.ones(n) if weight is None else np.sqrt(weight(x, np.full(n, z_start)))

    zs = _z_grid(z_start, cfg)
    nsteps = min(len(zs) - 1, cfg.max_steps)
    path = np.full((nsteps + 1, n), np.nan) if keep_path else None
    if keep_path:
        path[0] = x
    last = np.zeros(n, dtype=int)  # index of the last stored step
    final_x = x.copy()
    status = np.full(n, None, dtype=object)
    active = np.ones(n, dtype=bool)

    def slope(xa, z):
        vx, vz, ok = field(xa, z)
        ok = ok & (vz >= cfg.vz_min)
        return np.where(ok, vx / np.where(ok, vz, 1.0), 0.0), ok

    for i in range(nsteps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        z, h = zs[i], zs[i + 1] - zs[i]
        xa = final_x[idx]
        k1, ok1 = slope(xa, z)
        k2, ok2 = slope(xa + 0.5 * h * k1, z + 0.5 * h)
        k3, ok3 = slope(xa + 0.5 * h * k2, z + 0.5 * h)
        k4, ok4 = slope(xa + h * k3, z + h)
        xn = xa + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ok = ok1 & ok2 & ok3 & ok4
        out = ok & (np.abs(xn) > cfg.x_bounds)
        good = ok & ~out

        floor_idx = idx[~ok]
        status[floor_idx] = Termination.DENSITY_FLOOR
        active[floor_idx] = False
        out_idx = idx[out]
        status[out_idx] = Termination.LEFT_DOMAIN
        active[out_idx] = False

        gidx = idx[good]
        final_x[gidx] = xn[good]
        last[gidx] = i + 1
        if keep_path:
            path[i + 1, gidx] = xn[good]

    reached = nsteps == len(zs) - 1
    status[active] = Termination.REACHED_SCREEN if reached else Termination.MAX_STEPS

    trajs = []
    for j in range(n):
        if keep_path:
            pts = np.column_stack([path[: last[j] + 1, j], zs[: last[j] + 1]])
        else:
            pts = np.array([[x[j], zs[0]], [final_x[j], zs[last[j]]]])
            if last[j] == 0:
                pts = pts[:1]
        trajs.append(Trajectory(pts, float(w[j]), status[j]))
    return trajs


def integrate_bohmian(seed_x, z_start, field, cfg: IntegratorConfig, weight=None):
    return integrate_bohmian_batch([seed_x], z_start, field, cfg, weight)[0]


def integrate_eikonal_ray(seed, grad_S, n, cfg: IntegratorConfig):
    """Integrate ``dr/ds = grad_S(r) / n(r)`` by RK4 in arclength, step ``cfg.dz``.

    ``grad_S(x, z) -> (gx, gz)`` and ``n(x, z) -> index``.  Stops when z
    reaches ``cfg.z_screen`` (the last step is shortened to land on it),
    when |x| exceeds ``cfg.x_bounds`` or after ``cfg.max_steps`` steps.
    """

    def rhs(r):
        nn = float(n(r[0], r[1]))
        if not nn > 0:
            raise SeedInvalid(f"refractive index {nn} <= 0 at {tuple(r)}")
        gx, gz = grad_S(r[0], r[1])
        return np.array([gx, gz], dtype=float) / nn

    def step(r, h):
        k1 = rhs(r)
        k2 = rhs(r + 0.5 * h * k1)
        k3 = rhs(r + 0.5 * h * k2)
        k4 = rhs(r + h * k3)
        return r + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    r = np.array(seed, dtype=float)
    rhs(r)
    pts = [r.copy()]
    status = Termination.MAX_STEPS
    for _ in range(cfg.max_steps):
        if r[1] >= cfg.z_screen:
            status = Termination.REACHED_SCREEN
            break
        rn = step(r, cfg.dz)
        if rn[1] > cfg.z_screen and rn[1] > r[1]:
            h = cfg.dz * (cfg.z_screen - r[1]) / (rn[1] - r[1])
            rn = step(r, h)
            rn[1] = cfg.z_screen if abs(rn[1] - cfg.z_screen) < 1e-9 * max(1.0, abs(cfg.z_screen)) else rn[1]
        if abs(rn[0]) > cfg.x_bounds:
            status = Termination.LEFT_DOMAIN
            break
        r = rn
        pts.append(r.copy())
    else:
        if r[1] >= cfg.z_screen:
            status = Termination.REACHED_SCREEN
    return Trajectory(np.array(pts), 1.0, status)


def seed_uniform(n, x_min, x_max, z_start=0.0):
    """``n`` equally spaced seeds on ``[x_min, x_max]`` (midpoint if n == 1)."""
    if n < 1 or not x_min < x_max:
        raise ValueError("need n >= 1 and x_min < x_max")
    if n == 1:
        xs = np.array([0.5 * (x_min + x_max)])
    else:
        xs = np.linspace(x_min, x_max, n)
    return np.column_stack([xs, np.full(n, float(z_start))])


def seed_density_sampled(n, x_min, x_max, z_start, rho, rng_seed, table_size=4096,
                         stratified=True):
    """Draw ``n`` seeds from ``rho(., z_start)`` restricted to ``[x_min, x_max]``.

    Inverse-CDF sampling on a ``table_size``-point trapezoid table.  With
    ``stratified`` (the default) the i-th uniform is drawn from
    ``[i/n, (i+1)/n)`` and the draws are shuffled, so every seed is still
    distributed as rho but histogram noise drops far below the i.i.d. level.
    """
    if n < 1 or not x_min < x_max:
        raise ValueError("need n >= 1 and x_min < x_max")
    xs = np.linspace(x_min, x_max, table_size)
    r = np.asarray(rho(xs, np.full(table_size, float(z_start))), dtype=float)
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ValueError("density must be finite and >= 0")
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (r[1:] + r[:-1]) * np.diff(xs))])
    if not cdf[-1] > 0:
        raise ZeroDensityRange(f"density vanishes on [{x_min}, {x_max}]")
    cdf /= cdf[-1]
    rng = np.random.default_rng(rng_seed)
    if stratified:
        u = rng.permutation((np.arange(n) + rng.random(n)) / n)
    else:
        u = rng.random(n)
    # keep only table nodes that bound a rising CDF step, so inversion never
    # lands inside a zero-density stretch
    rise = np.diff(cdf) > 0
    keep = np.concatenate([rise, [False]]) | np.concatenate([[False], rise])
    sx = np.interp(u, cdf[keep], xs[keep])
    return np.column_stack([sx, np.full(n, float(z_start))])


def terminal_x(trajs, only_reached=True):
    return np.array([t.points[-1, 0] for t in trajs
                     if not only_reached or t.terminated_by is Termination.REACHED_SCREEN])


def landing_histogram(trajs, bins, x_min, x_max):
    """Counts of terminal x over ``bins`` equal bins; screen arrivals only."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts, _ = np.histogram(terminal_x(trajs), bins=bins, range=(x_min, x_max))
    return counts


def ordering_violations(trajs):
    """Count steps at which neighbouring trajectories (sorted by seed) swap order.

    Only steps where both neighbours are still present are compared.
    """
    order = np.argsort([t.points[0, 0] for t in trajs], kind="stable")
    longest = max(len(t.points) for t in trajs)
    X = np.full((longest, len(trajs)), np.nan)
    for col, j in enumerate(order):
        xs = trajs[j].x
        X[: len(xs), col] = xs
    d = np.diff(X, axis=1)
    both = np.isfinite(d)
    return int(np.count_nonzero(both & (d <= 0)))
