"""Screen-plane statistics: fringe maxima, fringe period, landing bands, TV distance."""

from __future__ import annotations

import numpy as np
from scipy.signal import find_peaks

from .trajectories import Termination

__all__ = [
    "prominent_maxima",
    "dark_fringes",
    "fringe_period",
    "transported_density",
    "band_count",
    "bin_probabilities",
    "tv_distance",
]


def prominent_maxima(values, rel_prominence=0.1):
    """Indices of local maxima whose prominence is at least ``rel_prominence``
    times their own height.  Plateaus count once."""
    values = np.asarray(values, dtype=float)
    peaks, props = find_peaks(values, prominence=0.0)
    if peaks.size == 0:
        return peaks
    keep = props["prominences"] >= rel_prominence * values[peaks]
    return peaks[keep]


def dark_fringes(values):
    """Indices of local minima."""
    peaks, _ = find_peaks(-np.asarray(values, dtype=float))
    return peaks


def fringe_period(x, rho):
    """Separation of the two dark fringes flanking the central bright fringe.

    The central bright fringe is the global maximum; returns NaN if there
    is no dark fringe on either side.
    """
    x = np.asarray(x, dtype=float)
    rho = np.asarray(rho, dtype=float)
    centre = int(np.argmax(rho))
    mins = dark_fringes(rho)
    left = mins[mins < centre]
    right = mins[mins > centre]
    if left.size == 0 or right.size == 0:
        return float("nan")
    return float(_refine_min(x, rho, right[0]) - _refine_min(x, rho, left[-1]))


def _refine_min(x, y, i):
    # vertex of the parabola through three samples
    if i <= 0 or i >= len(x) - 1:
        return x[i]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom <= 0:
        return x[i]
    h = x[i + 1] - x[i]
    return x[i] + 0.5 * h * (y0 - y2) / denom


def transported_density(trajs, rho0, n_sub=64):
    """Screen density carried by the flux tubes between neighbouring trajectories.

    Each tube between consecutive (by seed) trajectories that both reached
    the screen carries the seed-plane probability ``int rho0(x, z_start) dx``
    between their seeds; spreading it over the landing interval gives a
    density estimate built only from the trajectories.

    Returns ``(centres, density)`` ordered by landing position.
    """
    reached = [t for t in trajs if t.terminated_by is Termination.REACHED_SCREEN]
    reached.sort(key=lambda t: t.points[0, 0])
    if len(reached) < 2:
        return np.empty(0), np.empty(0)
    x0 = np.array([t.points[0, 0] for t in reached])
    z0 = reached[0].points[0, 1]
    xe = np.array([t.points[-1, 0] for t in reached])
    # Gauss-Legendre quadrature of the seed density over each tube
    g, gw = np.polynomial.legendre.leggauss(n_sub)
    a, b = x0[:-1], x0[1:]
    xq = 0.5 * (b - a)[:, None] * g[None, :] + 0.5 * (a + b)[:, None]
    mass = 0.5 * (b - a) * (rho0(xq, np.full(xq.shape, z0)) @ gw)
    width = np.diff(xe)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.where(width > 0, mass / width, np.inf)
    return 0.5 * (xe[1:] + xe[:-1]), dens


def band_count(trajs, rho0, rel_prominence=0.1):
    """Number of landing bands: prominent maxima of :func:`transported_density`."""
    _, dens = transported_density(trajs, rho0)
    if dens.size == 0:
        return 0
    return int(prominent_maxima(dens, rel_prominence).size)


def bin_probabilities(rho, z, bins, x_min, x_max, n_sub=64):
    """Normalized per-bin probabilities of ``rho(., z)`` by Gauss-Legendre quadrature."""
    edges = np.linspace(x_min, x_max, bins + 1)
    g, gw = np.polynomial.legendre.leggauss(n_sub)
    a, b = edges[:-1], edges[1:]
    xq = 0.5 * (b - a)[:, None] * g[None, :] + 0.5 * (a + b)[:, None]
    p = 0.5 * (b - a) * (rho(xq, np.full(xq.shape, float(z))) @ gw)
    return p / p.sum()


def tv_distance(counts, probs):
    """Total-variation distance between a count histogram and bin probabilities."""
    counts = np.asarray(counts, dtype=float)
    return 0.5 * float(np.abs(counts / counts.sum() - np.asarray(probs)).sum())
