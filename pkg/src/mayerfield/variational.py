"""Caratheodory checks for the free relativistic particle.

The Lagrangian is ``L(v) = m c phi`` with ``phi = (eta_{mu nu} v^mu v^nu)^(1/2)``.
Velocity fields come either from a linear auxiliary function
``S(x) = p_mu x^mu`` (``v^mu = s eta^{mu nu} p_nu / (m c)``), from a constant
4-vector, or from an arbitrary callable (used for counterexamples).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonTimelikeVelocity
from .lattice import minkowski_dot, raise_index
from .splits import ResidualReport

__all__ = [
    "LinearAux",
    "SpecKind",
    "VelocitySpec",
    "free_lagrangian",
    "fundamental_residuals",
    "hj_residual",
    "straightness_check",
    "integrate_extremal",
    "euler_lagrange_residual",
    "boost",
]


@dataclass(frozen=True)
class LinearAux:
    """``S(x) = p_mu x^mu`` with covariant ``p``."""

    p: tuple

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        if len(p) != 4:
            raise ValueError("p must be a 4-tuple")
        object.__setattr__(self, "p", p)

    def S(self, x):
        return float(sum(pm * xm for pm, xm in zip(self.p, x)))

    def grad(self, x=None):
        """``d_mu S``, independent of x."""
        return self.p


class SpecKind(enum.Enum):
    FROM_AUX = "FromAux"
    EXPLICIT_CONSTANT = "ExplicitConstant"
    FUNCTION = "Function"


@dataclass(frozen=True)
class VelocitySpec:
    kind: SpecKind
    aux: Optional[LinearAux] = None
    scale: float = 1.0
    constant: Optional[tuple] = None
    func: Optional[Callable] = None
    m: float = 1.0
    c: float = 1.0

    @classmethod
    def from_aux(cls, aux, scale=1.0, m=1.0, c=1.0):
        if not scale > 0:
            raise ValueError("scale must be > 0")
        return cls(SpecKind.FROM_AUX, aux=aux, scale=float(scale), m=m, c=c)

    @classmethod
    def explicit(cls, v):
        v = tuple(float(x) for x in v)
        if len(v) != 4:
            raise ValueError("need a 4-tuple")
        return cls(SpecKind.EXPLICIT_CONSTANT, constant=v)

    @classmethod
    def from_function(cls, func):
        """Arbitrary ``func(x) -> v^mu``; not a Mayer field in general."""
        return cls(SpecKind.FUNCTION, func=func)

    def velocity(self, x):
        """Contravariant ``v^mu`` at ``x``."""
        if self.kind is SpecKind.FROM_AUX:
            pu = raise_index(self.aux.p)
            return np.array(pu) * (self.scale / (self.m * self.c))
        if self.kind is SpecKind.EXPLICIT_CONSTANT:
            return np.array(self.constant)
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


def _phi(v):
    vv = minkowski_dot(v, v)
    if not vv > 0:
        raise NonTimelikeVelocity(f"v = {tuple(v)} is not timelike (v.v = {vv})")
    return math.sqrt(vv)


def free_lagrangian(v, m=1.0, c=1.0):
    """Return ``(L, phi)`` with ``L = m c phi``."""
    phi = _phi(v)
    return m * c * phi, phi


def _dL_dv(v, m, c):
    """``dL/dv^mu = m c v_mu / phi`` (analytic)."""
    phi = _phi(v)
    return np.array(raise_index(v)) * (m * c / phi)


def fundamental_residuals(spec: VelocitySpec, aux: LinearAux, x, m=1.0, c=1.0):
    """``(L - v^mu d_mu S, dL/dv^mu - d_mu S)`` at ``x``."""
    v = spec.velocity(x)
    L, _ = free_lagrangian(v, m, c)
    dS = np.array(aux.grad(x))
    first = L - float(np.dot(v, dS))
    second = _dL_dv(v, m, c) - dS
    return first, tuple(float(r) for r in second)


def hj_residual(aux: LinearAux, m=1.0, c=1.0):
    """``eta^{mu nu} p_mu p_nu - m^2 c^2``."""
    return minkowski_dot(aux.p, aux.p) - (m * c) ** 2


def integrate_extremal(spec: VelocitySpec, seed_x, s_max, steps):
    """RK4 solution of ``dx^mu/ds = v^mu(x)``; returns ``(s, x)`` with x of shape (steps+1, 4)."""
    if steps < 1 or not s_max > 0:
        raise ValueError("need steps >= 1 and s_max > 0")

    def rhs(x):
        v = spec.velocity(x)
        _phi(v)
        return v

    h = s_max / steps
    xs = np.empty((steps + 1, 4))
    xs[0] = np.asarray(seed_x, dtype=float)
    for i in range(steps):
        x = xs[i]
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        xs[i + 1] = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    rhs(xs[-1])
    return np.linspace(0.0, s_max, steps + 1), xs


def straightness_check(spec: VelocitySpec, seed_x, s_max, steps=200):
    """Maximum coordinate distance of the integrated curve from its chord,
    divided by the polygonal path length."""
    _, xs = integrate_extremal(spec, seed_x, s_max, steps)
    chord = xs[-1] - xs[0]
    length = float(np.sum(np.linalg.norm(np.diff(xs, axis=0), axis=1)))
    if length == 0:
        return 0.0
    rel = xs - xs[0]
    cn = float(np.dot(chord, chord))
    if cn == 0:
        dev = np.linalg.norm(rel, axis=1)
    else:
        dev = np.linalg.norm(rel - np.outer(rel @ chord / cn, chord), axis=1)
    return float(dev.max() / length)


def euler_lagrange_residual(spec: VelocitySpec, seed_x, s_max, steps=200, m=1.0, c=1.0):
    """``d/ds (dL/dxdot^mu) - dL/dx^mu`` along the integrated curve.

    The free Lagrangian has no explicit x dependence, so the second term is
    zero; the first is a second-order finite difference in s.
    """
    s, xs = integrate_extremal(spec, seed_x, s_max, steps)
    mom = np.array([_dL_dv(spec.velocity(x), m, c) for x in xs])
    dmom = np.gradient(mom, s, axis=0, edge_order=2)
    return ResidualReport.of(dmom)


def boost(w, chi, axis=1):
    """Lorentz boost of contravariant components with rapidity ``chi`` along
    spatial ``axis``.  Covariant components transform with ``-chi``; both
    preserve the Minkowski square."""
    w = np.array(w, dtype=float)
    ch, sh = math.cosh(chi), math.sinh(chi)
    out = w.copy()
    out[0] = ch * w[0] + sh * w[axis]
    out[axis] = sh * w[0] + ch * w[axis]
    return tuple(out)
