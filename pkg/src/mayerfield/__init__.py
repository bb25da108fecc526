"""Numerical checks of Mayer-field / Bohmian descriptions of wave propagation.

Submodules: :mod:`beam` (two-slit Gaussian field), :mod:`trajectories`,
:mod:`analysis`, :mod:`splits` (real/imaginary splitting residuals),
:mod:`fresnel`, :mod:`lattice` (4-D Minkowski finite differences),
:mod:`variational`, :mod:`inversion`, :mod:`config`, :mod:`io` and
:mod:`cli`.
"""

from .errors import MayerFieldError

__version__ = "0.1.0"
