"""Residuals of the real/imaginary splittings of Helmholtz, Schrodinger and
the massive (Proca-type) wave equation, evaluated on uniform grids.

All first derivatives are second-order central differences and all second
derivatives are compact three-point differences.  Residual statistics are
taken over the interior only, excluding a two-point margin on every side,
so every reported value comes from pure central stencils.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NonpositiveAmplitude, NonpositiveDensity

__all__ = [
    "Grid",
    "ResidualReport",
    "helmholtz_residual",
    "optical_split_residuals",
    "schrodinger_split_residuals",
    "quantum_potential",
    "shortwave_split_residuals",
    "hj_continuity_check",
    "d1",
    "d2",
]

MARGIN = 2
MINKOWSKI_3 = (1.0, -1.0, -1.0)


@dataclass
class Grid:
    """Samples on a uniform rectilinear grid (real or complex, any dimension).

    Axis order is the caller's; for 2-D optical/Schrodinger grids it is
    ``(x, z)``, for the short-wave checks ``(x0, x1, x3)``.
    """

    values: np.ndarray
    spacing: tuple
    origin: tuple = None

    def __post_init__(self):
        self.values = np.asarray(self.values)
        self.spacing = tuple(float(h) for h in self.spacing)
        if self.origin is None:
            self.origin = (0.0,) * self.values.ndim
        self.origin = tuple(float(o) for o in self.origin)
        if len(self.spacing) != self.values.ndim or len(self.origin) != self.values.ndim:
            raise ValueError("spacing/origin length must match values.ndim")
        if any(n < 5 for n in self.values.shape):
            raise ValueError(f"every axis needs >= 5 points, got {self.values.shape}")
        if any(not h > 0 for h in self.spacing):
            raise ValueError("spacings must be > 0")

    @property
    def shape(self):
        return self.values.shape

    @property
    def ndim(self):
        return self.values.ndim

    def axis(self, i):
        return self.origin[i] + self.spacing[i] * np.arange(self.shape[i])

    def mesh(self):
        return np.meshgrid(*(self.axis(i) for i in range(self.ndim)), indexing="ij")

    @classmethod
    def sample(cls, func, origin, spacing, shape, dtype=None):
        """Evaluate ``func(*coords)`` on the grid (``ij`` indexing)."""
        axes = [o + h * np.arange(n) for o, h, n in zip(origin, spacing, shape)]
        vals = np.broadcast_to(func(*np.meshgrid(*axes, indexing="ij")), tuple(shape))
        return cls(np.array(vals, dtype=dtype), spacing, origin)

    def like(self, values):
        return Grid(values, self.spacing, self.origin)

    def congruent(self, other):
        return (self.shape == other.shape
                and np.allclose(self.spacing, other.spacing, rtol=1e-12, atol=0)
                and np.allclose(self.origin, other.origin, rtol=1e-12, atol=1e-12))


@dataclass(frozen=True)
class ResidualReport:
    rms: float
    max_abs: float
    interior_count: int

    @classmethod
    def of(cls, r):
        r = np.abs(np.asarray(r))
        if r.size == 0:
            return cls(0.0, 0.0, 0)
        return cls(float(np.sqrt(np.mean(r * r))), float(r.max()), int(r.size))


def _check(*grids):
    first = grids[0]
    for g in grids[1:]:
        if not first.congruent(g):
            raise GridMismatch(f"grid {g.shape} not congruent with {first.shape}")


def _interior(a, margin=MARGIN):
    return a[(slice(margin, -margin),) * a.ndim]


def d1(f, axis, h):
    """Central first derivative; second-order one-sided at the two ends."""
    return np.gradient(f, h, axis=axis, edge_order=2)


def d2(f, axis, h):
    """Compact second derivative; second-order one-sided at the two ends."""
    f = np.moveaxis(np.asarray(f), axis, 0)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (h * h)
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h)
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / (h * h)
    return np.moveaxis(out, 0, axis)


def _laplacian(f, spacing, signs=None):
    signs = signs or (1.0,) * len(spacing)
    return sum(s * d2(f, i, h) for i, (h, s) in enumerate(zip(spacing, signs)))


def _grad(f, spacing):
    return [d1(f, i, h) for i, h in enumerate(spacing)]


def _require_positive(arr, exc, what):
    if np.any(~(_interior(arr) > 0)):
        raise exc(f"{what} must be > 0 on the interior")


def helmholtz_residual(U: Grid, k: float, n: Grid) -> ResidualReport:
    """``lap U + (n k)^2 U`` on the interior."""
    _check(U, n)
    r = _laplacian(U.values, U.spacing) + (n.values * k) ** 2 * U.values
    return ResidualReport.of(_interior(r))


def optical_split_residuals(a: Grid, S: Grid, n: Grid, lambda_bar: float):
    """Real part ``|grad S|^2 - n^2 - lambda_bar^2 lap(a)/a`` and imaginary
    part ``2 grad a . grad S + a lap S``."""
    _check(a, S, n)
    _require_positive(a.values, NonpositiveAmplitude, "amplitude")
    gS = _grad(S.values, S.spacing)
    ga = _grad(a.values, a.spacing)
    real = (sum(g * g for g in gS) - n.values ** 2
            - lambda_bar ** 2 * _laplacian(a.values, a.spacing) / a.values)
    imag = 2.0 * sum(x * y for x, y in zip(ga, gS)) + a.values * _laplacian(S.values, S.spacing)
    return ResidualReport.of(_interior(real)), ResidualReport.of(_interior(imag))


def schrodinger_split_residuals(R: Grid, S: Grid, V: Grid, m: float, hbar: float, E: float):
    """Stationary Madelung split of the Schrodinger equation.

    Real part: ``-E + |grad S|^2/2m + V - (hbar^2/2m) lap(R)/R``;
    imaginary part: ``div(R^2 grad S / m)``.
    """
    _check(R, S, V)
    _require_positive(R.values, NonpositiveAmplitude, "R")
    gS = _grad(S.values, S.spacing)
    real = (-E + sum(g * g for g in gS) / (2.0 * m) + V.values
            - hbar ** 2 / (2.0 * m) * _laplacian(R.values, R.spacing) / R.values)
    R2 = R.values ** 2
    imag = sum(d1(R2 * g / m, i, h) for i, (g, h) in enumerate(zip(gS, S.spacing)))
    return ResidualReport.of(_interior(real)), ResidualReport.of(_interior(imag))


def quantum_potential(R: Grid, m: float, hbar: float) -> Grid:
    """``Q = -hbar^2 lap(R) / (2 m R)`` everywhere (one-sided stencils at the edges)."""
    if np.any(~(R.values > 0)):
        raise NonpositiveAmplitude("R must be > 0")
    return R.like(-hbar ** 2 * _laplacian(R.values, R.spacing) / (2.0 * m * R.values))


def _metric(signature, ndim):
    sig = tuple(float(s) for s in (signature or MINKOWSKI_3))
    if len(sig) != ndim:
        raise ValueError(f"signature has {len(sig)} entries for a {ndim}-d grid")
    return sig


def shortwave_split_residuals(rho: Grid, S: Grid, lam: float, signature=MINKOWSKI_3):
    """Real/imaginary parts of the Proca-type equation for ``sqrt(rho) exp(i S/lam)``.

    Real: ``eta dS dS - 1 - lam^2 box(sqrt rho)/sqrt rho``;
    imaginary: ``2 eta dS d(sqrt rho) + sqrt(rho) box S``.
    ``signature`` gives the diagonal metric per grid axis.
    """
    _check(rho, S)
    _require_positive(rho.values, NonpositiveDensity, "rho")
    eta = _metric(signature, rho.ndim)
    r = np.sqrt(np.where(rho.values > 0, rho.values, 0.0))
    gS = _grad(S.values, S.spacing)
    gr = _grad(r, rho.spacing)
    box_r = _laplacian(r, rho.spacing, eta)
    box_S = _laplacian(S.values, S.spacing, eta)
    with np.errstate(divide="ignore", invalid="ignore"):
        real = sum(e * g * g for e, g in zip(eta, gS)) - 1.0 - lam ** 2 * box_r / r
    imag = 2.0 * sum(e * a * b for e, a, b in zip(eta, gS, gr)) + r * box_S
    return ResidualReport.of(_interior(real)), ResidualReport.of(_interior(imag))


def hj_continuity_check(rho: Grid, S: Grid, signature=MINKOWSKI_3):
    """Leading orders in lam: ``eta dS dS - 1`` and ``d_nu(rho d^nu S)``."""
    _check(rho, S)
    _require_positive(rho.values, NonpositiveDensity, "rho")
    eta = _metric(signature, rho.ndim)
    gS = _grad(S.values, S.spacing)
    hj = sum(e * g * g for e, g in zip(eta, gS)) - 1.0
    cont = sum(e * d1(rho.values * g, i, h)
               for i, (e, g, h) in enumerate(zip(eta, gS, S.spacing)))
    return ResidualReport.of(_interior(hj)), ResidualReport.of(_interior(cont))
