import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mayerfield import beam, splits
from mayerfield.errors import GridMismatch, NonpositiveAmplitude, NonpositiveDensity
from mayerfield.splits import Grid

EXACT = 1e-12


def grid2(func, h=0.05, n=41, origin=(-1.0, 0.0), dtype=None):
    return Grid.sample(func, origin, (h, h), (n, n), dtype)


def grid3(func, h=0.05, n=21):
    return Grid.sample(func, (0.0, -0.5, -0.5), (h, h, h), (n, n, n))


ONE = lambda x, z: np.ones_like(x)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(np.zeros((4, 10)), (0.1, 0.1))
    with pytest.raises(ValueError):
        Grid(np.zeros((5, 5)), (0.1, 0.0))
    with pytest.raises(ValueError):
        Grid(np.zeros((5, 5)), (0.1,))
    g = Grid(np.zeros((5, 6)), (0.1, 0.2), (1.0, 2.0))
    np.testing.assert_allclose(g.axis(1), 2.0 + 0.2 * np.arange(6))


def test_residual_report_invariants():
    r = splits.ResidualReport.of(np.array([3.0, -4.0]))
    assert r.max_abs == 4.0
    assert r.rms == pytest.approx(math.sqrt(12.5))
    assert r.rms <= r.max_abs and r.interior_count == 2


def test_derivative_stencils_exact_on_quadratics():
    x = np.linspace(0, 1, 11)
    f = 3 * x * x - x
    np.testing.assert_allclose(splits.d1(f, 0, 0.1), 6 * x - 1, atol=1e-12)
    np.testing.assert_allclose(splits.d2(f, 0, 0.1), np.full_like(x, 6.0), atol=1e-10)


# -- Helmholtz -------------------------------------------------------------

def _plane_helmholtz(h, k=10.0, factor=1.0):
    U = grid2(lambda x, z: np.exp(1j * factor * k * z), h=h, n=int(round(1 / h)) + 1, dtype=complex)
    return splits.helmholtz_residual(U, k, U.like(np.ones(U.shape)))


def test_helmholtz_plane_wave_converges_second_order():
    ratio = _plane_helmholtz(0.02).rms / _plane_helmholtz(0.01).rms
    assert 3.5 <= ratio <= 4.5


def test_helmholtz_zero_field():
    U = grid2(lambda x, z: 0 * x, dtype=complex)
    assert splits.helmholtz_residual(U, 5.0, grid2(ONE)).rms == 0.0


def test_helmholtz_wrong_wavenumber():
    # (k^2 - 4 k^2) U with |U| = 1 -> 3 k^2, up to the O(h^2) stencil error
    k = 10.0
    r = _plane_helmholtz(0.005, k, factor=2.0)
    assert r.rms == pytest.approx(3 * k * k, rel=0.01)


def test_helmholtz_grid_mismatch():
    U = grid2(ONE, dtype=complex)
    with pytest.raises(GridMismatch):
        splits.helmholtz_residual(U, 1.0, grid2(ONE, h=0.1))


# -- optical split ----------------------------------------------------------------

def test_optical_plane_wave_exact():
    re, im = splits.optical_split_residuals(grid2(ONE), grid2(lambda x, z: z), grid2(ONE), 0.01)
    assert re.max_abs <= EXACT and im.max_abs <= EXACT


def test_optical_wrong_index():
    re, im = splits.optical_split_residuals(grid2(ONE), grid2(lambda x, z: z),
                                            grid2(lambda x, z: 2 + 0 * x), 0.01)
    assert re.rms == pytest.approx(3.0, abs=EXACT) and re.max_abs == pytest.approx(3.0, abs=EXACT)
    assert im.max_abs <= EXACT


def test_optical_nonpositive_amplitude():
    with pytest.raises(NonpositiveAmplitude):
        splits.optical_split_residuals(grid2(lambda x, z: x), grid2(lambda x, z: z),
                                       grid2(ONE), 0.01)


def _gaussian_optical(h):
    p = beam.BeamParams.from_any(W0=1.0, k=100.0)
    sh = (int(round(6 / h)) + 1, int(round(20 / h)) + 1)
    W = lambda z: beam.beam_width(z, p)
    a = Grid.sample(lambda x, z: np.sqrt(p.W0 / W(z)) * np.exp(-x * x / W(z) ** 2),
                    (-3.0, 40.0), (h, h), sh)
    S = Grid.sample(lambda x, z: z + x * x * beam.inverse_curvature(z, p) / 2
                    - beam.gouy_phase(z, p) / (2 * p.k), (-3.0, 40.0), (h, h), sh)
    return splits.optical_split_residuals(a, S, a.like(np.ones(sh)), 1 / p.k)


def test_optical_paraxial_gaussian_beam():
    # exact solution of the paraxial equation in one transverse dimension
    re1, im1 = _gaussian_optical(0.1)
    re2, im2 = _gaussian_optical(0.05)
    assert 3.5 <= im1.rms / im2.rms <= 4.5
    assert re2.rms < re1.rms < 1e-4          # paraxial error (W0 k)^-2 = 1e-4


# -- Schrodinger split ------------------------------------------------------------

def test_schrodinger_plane_wave_and_constant():
    m, hbar, p = 2.0, 0.5, 1.3
    zero = grid2(lambda x, z: 0 * x)
    re, im = splits.schrodinger_split_residuals(grid2(ONE), grid2(lambda x, z: p * z), zero,
                                                m, hbar, p * p / (2 * m))
    assert re.max_abs <= EXACT and im.max_abs <= EXACT
    re, im = splits.schrodinger_split_residuals(grid2(ONE), zero, grid2(lambda x, z: 0.7 + 0 * x),
                                                m, hbar, 0.7)
    assert re.max_abs <= EXACT and im.max_abs <= EXACT


def _oscillator(h):
    m, hbar, w = 1.0, 1.0, 2.0
    n = int(round(4 / h)) + 1
    org, sp, sh = (-2.0, 0.0), (h, h), (n, 5)
    R = Grid.sample(lambda x, z: np.exp(-x * x * m * w / (2 * hbar)) + 0 * z, org, sp, sh)
    V = Grid.sample(lambda x, z: 0.5 * m * w * w * x * x + 0 * z, org, sp, sh)
    return splits.schrodinger_split_residuals(R, R.like(np.zeros(sh)), V, m, hbar, hbar * w / 2)


def test_schrodinger_ground_state():
    re1, im1 = _oscillator(0.02)
    re2, im2 = _oscillator(0.01)
    assert 3.5 <= re1.rms / re2.rms <= 4.5
    assert im1.max_abs == 0.0 and im2.max_abs == 0.0


def test_quantum_potential_gaussian_converges():
    sigma, m, hbar = 0.7, 1.0, 1.0
    errs = []
    for h in (0.02, 0.01):
        n = int(round(4 / h)) + 1
        R = Grid.sample(lambda x, z: np.exp(-x * x / (2 * sigma ** 2)) + 0 * z,
                        (-2.0, 0.0), (h, h), (n, 5))
        x = R.mesh()[0]
        Q = splits.quantum_potential(R, m, hbar).values
        exact = hbar ** 2 / (2 * m * sigma ** 2) * (1 - x * x / sigma ** 2)
        errs.append(np.abs(Q - exact)[2:-2, 2:-2].max())
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_quantum_potential_constant_is_zero():
    assert np.abs(splits.quantum_potential(grid2(lambda x, z: 3 + 0 * x), 1.0, 1.0).values).max() <= EXACT


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_quantum_potential_scale_invariant(c):
    R = grid2(lambda x, z: np.exp(-x * x) * (1 + 0.1 * np.sin(z)))
    q1 = splits.quantum_potential(R, 1.0, 1.0).values
    q2 = splits.quantum_potential(R.like(c * R.values), 1.0, 1.0).values
    np.testing.assert_allclose(q2, q1, rtol=1e-12, atol=1e-12 * np.abs(q1).max())


def test_quantum_potential_rejects_nonpositive():
    with pytest.raises(NonpositiveAmplitude):
        splits.quantum_potential(grid2(lambda x, z: x), 1.0, 1.0)


# -- relativistic short-wave split (t, x, z) ---------------------------------------

ONE3 = lambda t, x, z: np.ones_like(t)


@pytest.mark.parametrize("chi", [0.0, 0.4, -1.1])
def test_shortwave_boosted_plane_wave(chi):
    S = grid3(lambda t, x, z: t * math.cosh(chi) - x * math.sinh(chi))
    re, im = splits.shortwave_split_residuals(grid3(ONE3), S, 0.01)
    assert re.max_abs <= EXACT and im.max_abs <= EXACT
    hj, cont = splits.hj_continuity_check(grid3(ONE3), S)
    assert hj.max_abs <= EXACT and cont.max_abs <= EXACT


def test_shortwave_wrong_frequency():
    re, im = splits.shortwave_split_residuals(grid3(ONE3), grid3(lambda t, x, z: 2 * t), 0.01)
    assert re.rms == pytest.approx(3.0, abs=EXACT) and im.max_abs <= EXACT


def test_hj_static_density():
    hj, cont = splits.hj_continuity_check(grid3(lambda t, x, z: np.exp(-x * x)),
                                          grid3(lambda t, x, z: t))
    assert hj.max_abs <= EXACT and cont.max_abs <= EXACT


def test_hj_signature_sign():
    # d_nu(rho d^nu S) with S = t + 0.1 x^2 picks up eta^{11} = -1
    hj, cont = splits.hj_continuity_check(grid3(ONE3), grid3(lambda t, x, z: t + 0.1 * x * x))
    assert cont.rms == pytest.approx(0.2, abs=1e-12) and cont.max_abs == pytest.approx(0.2, abs=1e-12)


def test_shortwave_rejects_nonpositive_density():
    with pytest.raises(NonpositiveDensity):
        splits.shortwave_split_residuals(grid3(lambda t, x, z: x), grid3(lambda t, x, z: t), 0.1)
    with pytest.raises(ValueError):
        splits.hj_continuity_check(grid3(ONE3), grid3(lambda t, x, z: t), signature=(1, -1))
