"""Velocity fields from a probability current, ``rho v^nu = pi^nu`` with
``rho = n0c / phi``.

Squaring the four component equations gives a homogeneous linear system
``M ((v^0)^2, ..., (v^3)^2)^T = 0``; it has non-trivial solutions iff
``det M = (n0c)^6 [(n0c)^2 - pi.pi]`` vanishes.  Without the squaring, the
solutions are ``v = s pi`` for any scale ``s > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .errors import NoNontrivialSolution, NotTimelike
from .lattice import minkowski_dot

__all__ = [
    "CurrentSample",
    "VelocityFamily",
    "build_M",
    "det_M",
    "closed_form_det",
    "recover_velocity",
    "velocity_family",
]


@dataclass(frozen=True)
class CurrentSample:
    pi: tuple
    n0c: float = 1.0

    def __post_init__(self):
        pi = tuple(float(x) for x in self.pi)
        if len(pi) != 4:
            raise ValueError("pi must be a 4-tuple")
        if not (self.n0c > 0 and math.isfinite(self.n0c)):
            raise ValueError("n0c must be finite and > 0")
        object.__setattr__(self, "pi", pi)

    @property
    def square(self):
        return minkowski_dot(self.pi, self.pi)


@dataclass(frozen=True)
class VelocityFamily:
    """``v(s) = s pi`` with ``rho(s) = 1/s`` for every ``s > 0``."""

    direction: tuple
    n0c: float

    def v(self, s):
        return tuple(s * p for p in self.direction)

    @staticmethod
    def rho(s):
        return 1.0 / s


def build_M(c: CurrentSample) -> np.ndarray:
    """Row nu: ``n0c^2 (v^nu)^2 - [(v^0)^2 - |v|^2] pi_nu^2``."""
    n2 = c.n0c ** 2
    u = np.array(c.pi) ** 2
    return n2 * np.eye(4) + np.outer(u, [-1.0, 1.0, 1.0, 1.0])


def _exact_det(M):
    # Leibniz expansion in exact rationals; 24 terms for 4x4
    F = [[Fraction(float(x)) for x in row] for row in M]
    total = Fraction(0)
    n = len(F)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i in range(n):
            term *= F[i][perm[i]]
        total += term
    return total


def closed_form_det(c: CurrentSample) -> float:
    n2 = c.n0c ** 2
    u = [p * p for p in c.pi]
    return c.n0c ** 6 * math.fsum([n2, -u[0], u[1], u[2], u[3]])


def det_M(c: CurrentSample):
    """``(numeric, closed_form)``.

    The numeric value is the determinant of :func:`build_M` evaluated exactly
    on its floating-point entries and rounded once, so it stays accurate
    near the solvability boundary where ``pi.pi ~ n0c^2``.
    """
    return float(_exact_det(build_M(c))), closed_form_det(c)


def velocity_family(c: CurrentSample) -> VelocityFamily:
    return VelocityFamily(c.pi, c.n0c)


def recover_velocity(c: CurrentSample, s=1.0, tol=1e-9):
    """Return ``(v, rho)`` with ``v = s pi`` and ``rho = 1/s``.

    Raises :class:`NotTimelike` unless ``pi.pi > 0`` and
    :class:`NoNontrivialSolution` unless ``|pi.pi - n0c^2| <= tol n0c^2``.
    """
    if not s > 0:
        raise ValueError("scale s must be > 0")
    sq = c.square
    if not sq > 0:
        raise NotTimelike(f"pi = {c.pi} is not timelike (pi.pi = {sq})")
    n2 = c.n0c ** 2
    if abs(sq - n2) > tol * n2:
        raise NoNontrivialSolution(
            f"pi.pi = {sq!r} differs from n0c^2 = {n2!r}; det M = {closed_form_det(c)!r}")
    fam = velocity_family(c)
    v = fam.v(s)
    rho = fam.rho(s)
    phi = math.sqrt(minkowski_dot(v, v))
    if abs(phi - s * c.n0c) > 10 * tol * s * c.n0c:
        raise NoNontrivialSolution(f"phi(v) = {phi} != s n0c = {s * c.n0c}")
    return v, rho
