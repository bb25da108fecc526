"""Finite-difference tensor calculus on uniform 4-D Minkowski lattices.

Coordinates are ``x^mu = h_mu * i_mu`` (``x^0 = ct``) and the metric is
``eta = diag(+1, -1, -1, -1)``.  First derivatives are second-order
central differences, second derivatives compact three-point differences;
periodic axes wrap, other axes use second-order one-sided stencils at the
ends and are excluded (two-site margin) from residual statistics.

Contravariant derivatives ``d^mu = eta^{mu nu} d_nu`` are a sign flip on the
spatial axes applied to the differenced result.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DivergenceTooLarge, GridMismatch, IncommensurateWave,
                     NonPeriodicLattice, NonTimelikeField, VanishingDenominator)
from .splits import MARGIN, ResidualReport, d2 as _d2_open

__all__ = [
    "ETA",
    "PAIRS",
    "Lattice4",
    "VecFieldLattice",
    "AntisymTensorLattice",
    "KappaEstimate",
    "partial",
    "second_partial",
    "raise_index",
    "divergence",
    "dalembertian",
    "field_tensor",
    "maxwell_residual",
    "bianchi_residual",
    "wave_residual",
    "proca_residual",
    "proca_residual_K",
    "kappa_k1",
    "kappa_k2",
    "first_model_residuals",
    "make_plane_wave",
    "plane_wave_tensor",
    "mode_vector",
    "discrete_wavevector",
    "minkowski_dot",
]

ETA = (1.0, -1.0, -1.0, -1.0)
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_PAIR_INDEX = {p: i for i, p in enumerate(PAIRS)}
_COMMENSURATE_TOL = 1e-9


@dataclass(frozen=True)
class Lattice4:
    dims: tuple
    h: tuple
    periodic: tuple = (True, True, True, True)

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        h = tuple(float(x) for x in self.h)
        per = tuple(bool(p) for p in self.periodic)
        if len(dims) != 4 or len(h) != 4 or len(per) != 4:
            raise ValueError("a 4-D lattice needs four dims, spacings and periodic flags")
        if any(n < 5 for n in dims):
            raise ValueError(f"every axis needs >= 5 sites, got {dims}")
        if any(not (math.isfinite(x) and x > 0) for x in h):
            raise ValueError(f"spacings must be finite and > 0, got {h}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "periodic", per)

    @classmethod
    def cube(cls, n, h, periodic=True):
        return cls((n,) * 4, (h,) * 4, (periodic,) * 4)

    @property
    def lengths(self):
        return tuple(n * h for n, h in zip(self.dims, self.h))

    @property
    def cell_volume(self):
        return float(np.prod(self.h))

    @property
    def fully_periodic(self):
        return all(self.periodic)

    def coord(self, mu):
        """``x^mu`` as an array broadcastable against the lattice shape."""
        shape = [1, 1, 1, 1]
        shape[mu] = self.dims[mu]
        return (self.h[mu] * np.arange(self.dims[mu])).reshape(shape)

    def coords(self):
        return [self.coord(mu) for mu in range(4)]

    def refined(self):
        """Same physical box with every spacing halved."""
        return Lattice4(tuple(2 * n for n in self.dims), tuple(x / 2 for x in self.h),
                        self.periodic)

    def region(self):
        """Index tuple of the sites used for residual statistics."""
        return tuple(slice(None) if p else slice(MARGIN, n - MARGIN)
                     for p, n in zip(self.periodic, self.dims))


def _as_components(values, lat, count):
    arrs = [np.broadcast_to(np.asarray(v, dtype=float), lat.dims).copy() for v in values]
    if len(arrs) != count:
        raise ValueError(f"expected {count} components, got {len(arrs)}")
    return arrs


@dataclass
class VecFieldLattice:
    """Contravariant components ``pi^mu`` on every lattice site."""

    lattice: Lattice4
    values: list = field(default_factory=list)

    def __post_init__(self):
        self.values = _as_components(self.values, self.lattice, 4)

    @classmethod
    def sample(cls, lattice, func):
        """``func(x0, x1, x2, x3) -> 4 components`` evaluated on the lattice."""
        return cls(lattice, list(func(*lattice.coords())))

    def lowered(self):
        return [e * v for e, v in zip(ETA, self.values)]

    def square(self):
        """``pi_mu pi^mu`` per site."""
        return sum(e * v * v for e, v in zip(ETA, self.values))


@dataclass
class AntisymTensorLattice:
    """Independent components ``K^{ab}`` for ``(a, b)`` in :data:`PAIRS` order."""

    lattice: Lattice4
    values: list = field(default_factory=list)

    def __post_init__(self):
        self.values = _as_components(self.values, self.lattice, 6)

    def component(self, a, b):
        """``K^{ab}`` for any index pair, using antisymmetry."""
        if a == b:
            return np.zeros(self.lattice.dims)
        if a < b:
            return self.values[_PAIR_INDEX[(a, b)]]
        return -self.values[_PAIR_INDEX[(b, a)]]

    def contraction(self):
        """``K_{ab} K^{ab}`` per site."""
        return 2.0 * sum(ETA[a] * ETA[b] * v * v for (a, b), v in zip(PAIRS, self.values))


@dataclass(frozen=True)
class KappaEstimate:
    value: float
    numerator: float
    denominator: float


# -- primitive operators ---------------------------------------------------

def _check_index(mu):
    if mu not in (0, 1, 2, 3):
        raise ValueError(f"index must be in 0..3, got {mu!r}")


def partial(f, mu, lattice: Lattice4):
    """Discrete ``d_mu f`` (covariant index)."""
    _check_index(mu)
    f = np.asarray(f, dtype=float)
    h = lattice.h[mu]
    if lattice.periodic[mu]:
        return (np.roll(f, -1, axis=mu) - np.roll(f, 1, axis=mu)) / (2.0 * h)
    return np.gradient(f, h, axis=mu, edge_order=2)


def second_partial(f, mu, lattice: Lattice4):
    _check_index(mu)
    f = np.asarray(f, dtype=float)
    h = lattice.h[mu]
    if lattice.periodic[mu]:
        return (np.roll(f, -1, axis=mu) - 2.0 * f + np.roll(f, 1, axis=mu)) / (h * h)
    return _d2_open(f, mu, h)


def raise_index(w):
    """Raise (or lower) a 4-tuple with eta; the map is its own inverse."""
    w = tuple(w)
    if len(w) != 4:
        raise ValueError("need a 4-tuple")
    return tuple(e * x for e, x in zip(ETA, w))


def minkowski_dot(a, b):
    """``eta_{mu nu} a^mu b^nu`` for two contravariant 4-tuples."""
    return float(sum(e * x * y for e, x, y in zip(ETA, a, b)))


def _upper_partial(f, mu, lattice):
    return ETA[mu] * partial(f, mu, lattice)


def divergence(pi: VecFieldLattice):
    lat = pi.lattice
    return sum(partial(pi.values[mu], mu, lat) for mu in range(4))


def dalembertian(f, lattice: Lattice4):
    return sum(ETA[mu] * second_partial(f, mu, lattice) for mu in range(4))


def field_tensor(pi: VecFieldLattice) -> AntisymTensorLattice:
    """``K^{ab} = d^a pi^b - d^b pi^a``."""
    lat = pi.lattice
    comps = [_upper_partial(pi.values[b], a, lat) - _upper_partial(pi.values[a], b, lat)
             for a, b in PAIRS]
    return AntisymTensorLattice(lat, comps)


# -- residuals -------------------------------------------------------------

def _report(lattice, comps):
    """Combined RMS/max over all components on the statistics region."""
    reg = lattice.region()
    stacked = np.stack([np.asarray(c)[reg] for c in comps])
    return ResidualReport.of(stacked)


def _same_lattice(a, b):
    if a != b:
        raise GridMismatch(f"lattice {a} does not match {b}")


def maxwell_residual(K: AntisymTensorLattice, pi: VecFieldLattice, kappa) -> ResidualReport:
    """``d_a K^{ab} - kappa pi^b`` for each b."""
    _same_lattice(K.lattice, pi.lattice)
    lat = K.lattice
    res = [sum(partial(K.component(a, b), a, lat) for a in range(4) if a != b)
           - kappa * pi.values[b] for b in range(4)]
    return _report(lat, res)


def bianchi_residual(K: AntisymTensorLattice) -> ResidualReport:
    """Cyclic sum ``d^a K^{bc} + d^b K^{ca} + d^c K^{ab}`` over all a < b < c."""
    lat = K.lattice
    res = [_upper_partial(K.component(b, c), a, lat)
           + _upper_partial(K.component(c, a), b, lat)
           + _upper_partial(K.component(a, b), c, lat)
           for a, b, c in itertools.combinations(range(4), 3)]
    return _report(lat, res)


def wave_residual(pi: VecFieldLattice) -> ResidualReport:
    lat = pi.lattice
    return _report(lat, [dalembertian(v, lat) for v in pi.values])


def _check_lambda(lam):
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError(f"lambda must be finite and > 0, got {lam!r}")


def proca_residual(pi: VecFieldLattice, lam) -> ResidualReport:
    """``(box + 1/lam^2) pi^mu`` for each component."""
    _check_lambda(lam)
    lat = pi.lattice
    m2 = 1.0 / (lam * lam)
    return _report(lat, [dalembertian(v, lat) + m2 * v for v in pi.values])


def proca_residual_K(K: AntisymTensorLattice, lam) -> ResidualReport:
    _check_lambda(lam)
    lat = K.lattice
    m2 = 1.0 / (lam * lam)
    return _report(lat, [dalembertian(v, lat) + m2 * v for v in K.values])


# -- kappa estimators --------------------------------------------------------

def _require_periodic(lat):
    if not lat.fully_periodic:
        raise NonPeriodicLattice("kappa estimators need a fully periodic lattice")


def _denominator(pi):
    den = float(np.sum(pi.square())) * pi.lattice.cell_volume
    scale = float(sum(np.sum(v * v) for v in pi.values)) * pi.lattice.cell_volume
    if scale == 0.0 or abs(den) <= 1e-12 * scale:
        raise VanishingDenominator("sum of pi_mu pi^mu vanishes")
    return den


def kappa_k1(pi: VecFieldLattice) -> KappaEstimate:
    """``-sum (d_s pi_m)(d^s pi^m) / sum pi_m pi^m``."""
    lat = pi.lattice
    _require_periodic(lat)
    den = _denominator(pi)
    num = 0.0
    for m in range(4):
        for s in range(4):
            g = partial(pi.values[m], s, lat)
            num += ETA[s] * ETA[m] * float(np.sum(g * g))
    num *= lat.cell_volume
    return KappaEstimate(-num / den, num, den)


def kappa_k2(pi: VecFieldLattice, div_tol=1e-6) -> KappaEstimate:
    """``-(1/2) sum K_{sm} K^{sm} / sum pi_m pi^m``.

    The identity behind this form assumes a divergence-free field; raises
    :class:`DivergenceTooLarge` when the RMS divergence exceeds ``div_tol``
    times the RMS of all first derivatives of ``pi``.
    """
    lat = pi.lattice
    _require_periodic(lat)
    den = _denominator(pi)
    div_rms = float(np.sqrt(np.mean(divergence(pi) ** 2)))
    grad_ms = sum(float(np.mean(partial(v, s, lat) ** 2)) for v in pi.values for s in range(4))
    scale = math.sqrt(grad_ms)
    if div_rms > div_tol * scale:
        raise DivergenceTooLarge(f"rms divergence {div_rms:.3e} exceeds {div_tol:g} x {scale:.3e}")
    num = float(np.sum(field_tensor(pi).contraction())) * lat.cell_volume
    return KappaEstimate(-0.5 * num / den, num, den)


# -- first probabilistic model ---------------------------------------------------

def first_model_residuals(v: VecFieldLattice, n0c):
    """Build ``pi = rho v`` with ``rho = n0c (v.v)^(-1/2)``; return the
    (box pi, divergence) residual reports."""
    vv = v.square()
    if np.any(~(vv > 0)):
        raise NonTimelikeField("velocity field is not timelike at every site")
    rho = n0c / np.sqrt(vv)
    pi = VecFieldLattice(v.lattice, [rho * c for c in v.values])
    return wave_residual(pi), _report(v.lattice, [divergence(pi)])


# -- constructors ----------------------------------------------------------------

def mode_vector(modes, lattice: Lattice4):
    """Covariant wavevector ``k_mu = 2 pi m_mu / L_mu`` for integer mode numbers."""
    return tuple(2.0 * math.pi * m / L for m, L in zip(modes, lattice.lengths))


def discrete_wavevector(k, lattice: Lattice4):
    """``sin(k_mu h_mu) / h_mu``: what the central first difference sees of
    ``exp(i k.x)``.  A polarization with ``eps^mu k~_mu = 0`` is exactly
    divergence-free on the lattice."""
    return tuple(math.sin(km * h) / h for km, h in zip(k, lattice.h))


def _phase(k, lattice, phase):
    return sum(k[mu] * lattice.coord(mu) for mu in range(4)) + phase


def _check_commensurate(k, lattice):
    for mu in range(4):
        if not lattice.periodic[mu]:
            continue
        cycles = k[mu] * lattice.lengths[mu] / (2.0 * math.pi)
        if abs(cycles - round(cycles)) > _COMMENSURATE_TOL * max(1.0, abs(cycles)):
            raise IncommensurateWave(
                f"k_{mu} L_{mu} / 2pi = {cycles:.12g} is not an integer")


def make_plane_wave(eps, k, phase, lattice: Lattice4) -> VecFieldLattice:
    """``pi^mu = eps^mu cos(k_nu x^nu + phase)``; ``k`` is covariant."""
    eps = tuple(float(e) for e in eps)
    k = tuple(float(x) for x in k)
    if len(eps) != 4 or len(k) != 4:
        raise ValueError("eps and k must be 4-tuples")
    _check_commensurate(k, lattice)
    c = np.cos(_phase(k, lattice, phase))
    return VecFieldLattice(lattice, [e * c for e in eps])


def plane_wave_tensor(eps, k, phase, lattice: Lattice4) -> AntisymTensorLattice:
    """Continuum ``K^{ab}`` of :func:`make_plane_wave` sampled on the lattice:
    ``-(k^a eps^b - k^b eps^a) sin(k.x + phase)``."""
    ku = raise_index(k)
    s = np.sin(_phase(k, lattice, phase))
    return AntisymTensorLattice(lattice, [-(ku[a] * eps[b] - ku[b] * eps[a]) * s
                                          for a, b in PAIRS])
