"""Closed-form two-slit Gaussian field and its Madelung decomposition.

The field is a sum of two paraxial Gaussian beams centred at x = +a and
x = -a, propagating along z in the x-z plane.  All functions broadcast
over numpy arrays of x and z.

Units: c = 1, lengths in units of the waist radius unless the caller
chooses otherwise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BeamParams",
    "CurvatureFormula",
    "SlitConfig",
    "MadelungSample",
    "beam_width",
    "inverse_curvature",
    "gouy_phase",
    "single_beam",
    "slit_field",
    "carrier_field",
    "madelung",
    "default_h_fd",
    "density_floor",
    "velocity_field",
    "phase_velocity_unwrapped",
    "gaussian_1d",
]

_CONSISTENCY_TOL = 1e-12


class CurvatureFormula(enum.Enum):
    STANDARD = "standard"
    PAPER_LITERAL = "paper_literal"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"standard": cls.STANDARD, "paperliteral": cls.PAPER_LITERAL,
                   "paper_literal": cls.PAPER_LITERAL, "literal": cls.PAPER_LITERAL}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown curvature formula {value!r}") from None


@dataclass(frozen=True)
class BeamParams:
    """Gaussian beam parameters.

    ``W0``, ``z0`` and ``k`` are tied by ``W0 = sqrt(2 z0 / k)``; use
    :meth:`from_any` to give two of them and derive the third.  ``lam`` is
    the length scale of the Madelung phase (``u = sqrt(rho) exp(i S/lam)``)
    and defaults to ``1/k``.
    """

    W0: float
    z0: float
    k: float
    lam: float

    def __post_init__(self):
        for name in ("W0", "z0", "k", "lam"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be finite and > 0, got {val!r}")
        if abs(self.W0 - math.sqrt(2.0 * self.z0 / self.k)) / self.W0 > _CONSISTENCY_TOL:
            raise ValueError(
                f"inconsistent beam: W0={self.W0} but sqrt(2 z0/k)="
                f"{math.sqrt(2.0 * self.z0 / self.k)}")

    @classmethod
    def from_any(cls, W0=None, z0=None, k=None, lam=None):
        given = sum(v is not None for v in (W0, z0, k))
        if given < 2:
            raise ValueError("need at least two of W0, z0, k")
        if W0 is None:
            W0 = math.sqrt(2.0 * z0 / k)
        elif z0 is None:
            z0 = k * W0 ** 2 / 2.0
        elif k is None:
            k = 2.0 * z0 / W0 ** 2
        if lam is None:
            lam = 1.0 / k
        return cls(float(W0), float(z0), float(k), float(lam))


@dataclass(frozen=True)
class SlitConfig:
    a: float = 3.0
    curvature: CurvatureFormula = CurvatureFormula.STANDARD

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ValueError(f"slit half-separation must be >= 0, got {self.a!r}")
        object.__setattr__(self, "curvature", CurvatureFormula.parse(self.curvature))


@dataclass
class MadelungSample:
    """Density and planar velocity; ``vx``/``vz`` are NaN where ``valid`` is False."""

    rho: np.ndarray
    vx: np.ndarray
    vz: np.ndarray
    valid: np.ndarray


def beam_width(z, p: BeamParams):
    z = np.asarray(z, dtype=float)
    return p.W0 * np.sqrt(1.0 + (z / p.z0) ** 2)


def inverse_curvature(z, p: BeamParams, f=CurvatureFormula.STANDARD):
    """Return 1/R(z), finite everywhere.

    ``STANDARD`` uses R = z (1 + z0^2/z^2); ``PAPER_LITERAL`` uses
    R = z (1 + z^2/z0^2) and returns 0 at z = 0 by continuity.
    """
    f = CurvatureFormula.parse(f)
    z = np.asarray(z, dtype=float)
    if f is CurvatureFormula.STANDARD:
        return z / (z * z + p.z0 * p.z0)
    R = z * (1.0 + (z / p.z0) ** 2)
    with np.errstate(divide="ignore"):
        return np.where(z == 0.0, 0.0, 1.0 / np.where(z == 0.0, 1.0, R))


def gouy_phase(z, p: BeamParams):
    return np.arctan(np.asarray(z, dtype=float) / p.z0)


def single_beam(x, z, p: BeamParams, centre=0.0, f=CurvatureFormula.STANDARD):
    """One Gaussian-beam term of the two-slit field, centred at ``centre``."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    W = beam_width(z, p)
    C = inverse_curvature(z, p, f)
    d2 = (x - centre) ** 2
    expo = -d2 / (W * W) + 1j * (0.5 * p.k * d2 * C - gouy_phase(z, p))
    return (p.W0 / W) * np.exp(expo)


def slit_field(x, z, p: BeamParams, s: SlitConfig):
    """Slowly varying envelope v(x, z) of the two-slit field."""
    return (single_beam(x, z, p, s.a, s.curvature)
            + single_beam(x, z, p, -s.a, s.curvature))


def carrier_field(x, z, p: BeamParams, s: SlitConfig):
    """Stationary field u = v exp(ikz); the exp(-i omega t) factor is dropped."""
    z = np.asarray(z, dtype=float)
    return slit_field(x, z, p, s) * np.exp(1j * p.k * z)


def default_h_fd(p: BeamParams) -> float:
    return min(p.W0, p.lam) / 100.0


def density_floor(p: BeamParams, s: SlitConfig, rel=1e-12) -> float:
    """``rel`` times the density at a slit centre in the waist plane."""
    return rel * float(abs(slit_field(s.a, 0.0, p, s)) ** 2)


def madelung(x, z, p: BeamParams, s: SlitConfig, h_fd=None, floor=None):
    """Density and velocity ``v_i = lam Im(conj(u) d_i u) / |u|^2``.

    Derivatives are central differences of step ``h_fd`` on the carrier
    field; no phase unwrapping is involved.  Points with ``rho < floor``
    are flagged invalid instead of dividing by a vanishing density.
    """
    if h_fd is None:
        h_fd = default_h_fd(p)
    if floor is None:
        floor = density_floor(p, s)
    if not h_fd > 0:
        raise ValueError("h_fd must be > 0")
    if floor < 0:
        raise ValueError("floor must be >= 0")
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    # one vectorized evaluation at (x, z), (x +- h, z), (x, z +- h); z stays
    # un-broadcast so the z-only factors are computed on the smallest shape
    ex = (Ellipsis,) + (None,) * max(x.ndim, z.ndim)
    sx = np.array([0.0, h_fd, -h_fd, 0.0, 0.0])[ex]
    sz = np.array([0.0, 0.0, 0.0, h_fd, -h_fd])[ex]
    U = carrier_field(x + sx, z + sz, p, s)
    u = U[0]
    du_x = (U[1] - U[2]) / (2 * h_fd)
    du_z = (U[3] - U[4]) / (2 * h_fd)
    rho = u.real ** 2 + u.imag ** 2
    valid = rho >= floor
    if floor == 0:
        valid &= rho > 0
    safe = np.where(valid, rho, 1.0)
    uc = np.conj(u)
    vx = np.where(valid, p.lam * (uc * du_x).imag / safe, np.nan)
    vz = np.where(valid, p.lam * (uc * du_z).imag / safe, np.nan)
    return MadelungSample(rho, vx, vz, valid)


def velocity_field(p: BeamParams, s: SlitConfig, h_fd=None, floor=None):
    """Return ``field(x, z) -> (vx, vz, valid)`` for the trajectory engine."""
    if h_fd is None:
        h_fd = default_h_fd(p)
    if floor is None:
        floor = density_floor(p, s)

    def field(x, z):
        m = madelung(x, z, p, s, h_fd, floor)
        return m.vx, m.vz, m.valid

    field.rho = lambda x, z: np.abs(carrier_field(x, z, p, s)) ** 2
    return field


def phase_velocity_unwrapped(x, z, p: BeamParams, s: SlitConfig, h_fd=None):
    """``lam * d(arg u)/dx`` from an unwrapped phase along a line of constant z.

    Only meaningful on node-free segments; used to cross-check
    :func:`madelung`.
    """
    if h_fd is None:
        h_fd = default_h_fd(p)
    x = np.asarray(x, dtype=float)
    ph = np.unwrap(np.angle(np.stack([carrier_field(x - h_fd, z, p, s),
                                      carrier_field(x + h_fd, z, p, s)])), axis=0)
    return p.lam * (ph[1] - ph[0]) / (2 * h_fd)


def gaussian_1d(x, z, p: BeamParams):
    """Exact solution of the one-transverse-dimension paraxial equation that
    equals ``exp(-x^2/W0^2)`` at the waist, carrier included.

    Compared with :func:`single_beam` (a slice of a beam with two transverse
    dimensions), the amplitude is ``sqrt(W0/W)`` and the Gouy phase is halved.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    W = beam_width(z, p)
    C = inverse_curvature(z, p)
    expo = -x * x / (W * W) + 1j * (0.5 * p.k * x * x * C - 0.5 * gouy_phase(z, p) + p.k * z)
    return np.sqrt(p.W0 / W) * np.exp(expo)
