"""Experiment suites behind the CLI subcommands and the acceptance checks.

Each ``run_*`` function takes a resolved config mapping (see
:mod:`mayerfield.config`) and returns a plain dict of results.  Nothing
here writes files; wall-clock timings are kept under the ``"seconds"`` key
and never enter file outputs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import analysis, beam, fresnel, inversion, lattice, splits, trajectories, variational
from .errors import DivergenceTooLarge, MayerFieldError

__all__ = [
    "Criterion",
    "beam_setup",
    "run_slits",
    "run_equivariance",
    "run_lattice",
    "run_caratheodory",
    "run_inversion",
    "run_fresnel",
    "run_splits",
    "evaluate_criteria",
]


@dataclass
class Criterion:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float = None

    @property
    def within_budget(self):
        return self.budget is None or self.seconds < self.budget

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.number:2d} {self.name}: {self.detail}"


def _g(x):
    return "%.6g" % x


# -- two-slit experiments ------------------------------------------------------------

def beam_setup(r):
    p = beam.BeamParams.from_any(W0=r["beam.W0"], k=r["beam.k"], z0=r["beam.z0"],
                                 lam=r["beam.lam"])
    s = beam.SlitConfig(r["slits.a"], beam.CurvatureFormula.parse(r["beam.curvature"]))
    floor = beam.density_floor(p, s, r["integrator.floor_rel"])
    field = beam.velocity_field(p, s, r["integrator.h_fd"], floor)
    return p, s, field


def _rho(p, s):
    return lambda x, z: np.abs(beam.carrier_field(x, z, p, s)) ** 2


def run_slits(r, trajectories_out=True):
    """Screen density scan, 200 uniformly seeded trajectories, band count,
    ordering check and the density grid."""
    t0 = time.perf_counter()
    p, s, field = beam_setup(r)
    rho = _rho(p, s)
    zs = r["slits.z_screen"]
    xs = np.linspace(r["slits.x_min"], r["slits.x_max"], r["slits.screen_samples"])
    screen = rho(xs, zs)
    peaks = analysis.prominent_maxima(screen, r["slits.rel_prominence"])
    period = analysis.fringe_period(xs, screen)
    expected = math.pi * zs / (p.k * s.a) if s.a > 0 else float("nan")

    hw = r["slits.seed_halfwidth"]
    seeds = trajectories.seed_uniform(r["slits.n_seeds"], -hw, hw, 0.0)
    cfg = trajectories.IntegratorConfig(r["integrator.dz"], zs, max(abs(r["slits.x_min"]),
                                        abs(r["slits.x_max"])), r["integrator.max_steps"],
                                        r["integrator.vz_min"])
    trajs = trajectories.integrate_bohmian_batch(seeds[:, 0], 0.0, field, cfg, weight=rho)
    bands = analysis.band_count(trajs, rho, r["slits.rel_prominence"])
    violations = trajectories.ordering_violations(trajs)
    status = {}
    for t in trajs:
        status[t.terminated_by.value] = status.get(t.terminated_by.value, 0) + 1
    seconds = time.perf_counter() - t0

    gx = np.linspace(r["slits.x_min"], r["slits.x_max"], r["slits.grid_nx"])
    gz = np.linspace(0.0, zs, r["slits.grid_nz"])
    grid = rho(gx[:, None], gz[None, :])
    return {
        "params": p, "slits": s,
        "screen_x": xs, "screen_rho": screen,
        "maxima": xs[peaks], "fringe_count": int(peaks.size),
        "period": period, "expected_period": expected,
        "trajectories": trajs if trajectories_out else None,
        "band_count": bands, "ordering_violations": violations,
        "termination": dict(sorted(status.items())),
        "grid_x": gx, "grid_z": gz, "grid_rho": grid,
        "seconds": seconds,
    }


def run_equivariance(r):
    t0 = time.perf_counter()
    p, s, field = beam_setup(r)
    rho = _rho(p, s)
    x_min, x_max = r["equivariance.x_min"], r["equivariance.x_max"]
    zs = r["slits.z_screen"]
    seeds = trajectories.seed_density_sampled(r["equivariance.n"], x_min, x_max, 0.0, rho,
                                              r["run.rng_seed"])
    cfg = trajectories.IntegratorConfig(r["equivariance.dz"], zs, max(abs(x_min), abs(x_max)),
                                        r["integrator.max_steps"], r["integrator.vz_min"])
    trajs = trajectories.integrate_bohmian_batch(seeds[:, 0], 0.0, field, cfg, keep_path=False)
    counts = trajectories.landing_histogram(trajs, r["equivariance.bins"], x_min, x_max)
    probs = analysis.bin_probabilities(rho, zs, r["equivariance.bins"], x_min, x_max)
    tv = analysis.tv_distance(counts, probs)
    return {"counts": counts, "probs": probs, "tv": tv, "landed": int(counts.sum()),
            "seconds": time.perf_counter() - t0}


# -- lattice suite ------------------------------------------------------------------

def _lattice_level(lat, r):
    modes = r["lattice.modes"]
    eps = r["lattice.eps"]
    phase = r["lattice.phase"]
    k = lattice.mode_vector(modes, lat)
    ku = lattice.raise_index(k)
    kk = lattice.minkowski_dot(ku, ku)
    out = {"h": lat.h[0], "kk": kk}
    pi = lattice.make_plane_wave(eps, k, phase, lat)
    K = lattice.field_tensor(pi)
    lam = 1.0 / math.sqrt(kk) if kk > 0 else float("nan")
    out["proca"] = lattice.proca_residual(pi, lam).rms
    out["proca_K"] = lattice.proca_residual_K(K, lam).rms
    out["maxwell"] = lattice.maxwell_residual(K, pi, -kk).rms
    out["bianchi_discrete"] = lattice.bianchi_residual(K).rms
    out["bianchi"] = lattice.bianchi_residual(lattice.plane_wave_tensor(eps, k, phase, lat)).rms
    k1 = lattice.kappa_k1(pi)
    out["kappa1"] = k1.value
    try:
        out["kappa2"] = lattice.kappa_k2(pi, r["lattice.div_tol"]).value
    except DivergenceTooLarge:
        out["kappa2"] = float("nan")
    out["kappa_error"] = abs(k1.value + kk)
    out["kappa_gap"] = abs(out["kappa1"] - out["kappa2"]) / abs(k1.value)
    # a continuum-transverse polarization that the stencil does not annihilate
    pd = lattice.make_plane_wave(r["lattice.div_eps"], k, phase, lat)
    out["divergence"] = float(np.sqrt(np.mean(lattice.divergence(pd) ** 2)))
    kn = lattice.mode_vector(r["lattice.null_modes"], lat)
    null = lattice.make_plane_wave((1.0, 0.0, 0.0, 0.0), kn, phase, lat)
    out["wave_null"] = lattice.wave_residual(null).rms
    return out, pi


RATIO_KEYS = ("proca", "proca_K", "maxwell", "bianchi", "divergence", "kappa_error", "wave_null")


def run_lattice(r):
    t0 = time.perf_counter()
    n, h = r["lattice.n"], r["lattice.h"]
    base = lattice.Lattice4.cube(n, h)
    coarse, pi = _lattice_level(base, r)
    fine, _ = _lattice_level(base.refined(), r)
    ratios = {key: (coarse[key] / fine[key] if fine[key] > 0 else float("nan"))
              for key in RATIO_KEYS}
    return {"coarse": coarse, "fine": fine, "ratios": ratios, "field": pi,
            "seconds": time.perf_counter() - t0}


# -- Caratheodory ----------------------------------------------------------------

def run_caratheodory(r):
    t0 = time.perf_counter()
    m, c = r["caratheodory.m"], r["caratheodory.c"]
    chi = r["caratheodory.rapidity"]
    s_max, steps = r["caratheodory.s_max"], r["caratheodory.steps"]
    cases = []
    for label, p, seed in (("rest", (m * c, 0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0)),
                           ("boosted", variational.boost((m * c, 0.0, 0.0, 0.0), chi),
                            variational.boost((0.3, 0.1, -0.2, 0.5), chi))):
        aux = variational.LinearAux(p)
        hj = variational.hj_residual(aux, m, c)
        for sc in r["caratheodory.scales"]:
            spec = variational.VelocitySpec.from_aux(aux, sc, m, c)
            first, second = variational.fundamental_residuals(spec, aux, seed, m, c)
            fund = max(abs(first), max(abs(x) for x in second))
            straight = variational.straightness_check(spec, seed, s_max, steps)
            el = variational.euler_lagrange_residual(spec, seed, s_max, steps, m, c).max_abs
            cases.append({"case": label, "scale": sc, "hj": hj, "fundamental": fund,
                          "straightness": straight, "euler_lagrange": el})
    const = variational.VelocitySpec.explicit((1.5, 0.3, 0.0, 0.0))
    const_straight = variational.straightness_check(const, (0.0, 0.0, 0.0, 0.0), s_max, steps)
    const_el = variational.euler_lagrange_residual(const, (0.0, 0.0, 0.0, 0.0), s_max, steps,
                                                   m, c).max_abs
    # p.p = 2 m^2 c^2 violates Hamilton-Jacobi
    bad = variational.LinearAux((math.sqrt(2.0) * m * c, 0.0, 0.0, 0.0))
    bad_first, _ = variational.fundamental_residuals(
        variational.VelocitySpec.from_aux(bad, 1.0, m, c), bad, (0.0,) * 4, m, c)
    # not a Mayer field: v^1 grows with x^0
    counter = variational.VelocitySpec.from_function(lambda x: (1.0, 0.2 * x[0], 0.0, 0.0))
    counter_straight = variational.straightness_check(counter, (0.0,) * 4, 2.0, steps)
    counter_el = variational.euler_lagrange_residual(counter, (0.0,) * 4, 2.0, steps,
                                                     m, c).max_abs
    return {"cases": cases, "constant_straightness": const_straight,
            "constant_euler_lagrange": const_el, "hj_violation_first": bad_first,
            "counter_straightness": counter_straight, "counter_euler_lagrange": counter_el,
            "seconds": time.perf_counter() - t0}


# -- current inversion --------------------------------------------------------------

def run_inversion(r):
    t0 = time.perf_counter()
    n0c = r["inversion.n0c"]
    sample = inversion.CurrentSample(r["inversion.pi"], n0c)
    M = inversion.build_M(sample)
    numeric, closed = inversion.det_M(sample)
    try:
        v, rho = inversion.recover_velocity(sample, r["inversion.s"], r["inversion.tol"])
        recovered = {"v": v, "rho": rho, "error": None}
    except MayerFieldError as exc:
        recovered = {"v": None, "rho": None, "error": type(exc).__name__}

    rng = np.random.default_rng(r["run.rng_seed"])
    worst = 0.0
    agree_solvable = True
    for _ in range(r["inversion.n_random"]):
        cs = inversion.CurrentSample(tuple(rng.uniform(-2.0, 2.0, 4) * n0c), n0c)
        a, b = inversion.det_M(cs)
        worst = max(worst, abs(a - b) / abs(b) if b != 0 else abs(a - b))
        solvable = cs.square > 0 and abs(b) <= r["inversion.tol"] * n0c ** 8
        try:
            inversion.recover_velocity(cs, 1.0, r["inversion.tol"])
            ok = True
        except MayerFieldError:
            ok = False
        agree_solvable &= ok == solvable

    chi = 0.9
    boosted = inversion.CurrentSample((n0c * math.cosh(chi), n0c * math.sinh(chi), 0.0, 0.0), n0c)
    roundtrip = 0.0
    for sc in (0.1, 1.0, 10.0):
        v, rho = inversion.recover_velocity(boosted, sc, r["inversion.tol"])
        roundtrip = max(roundtrip, max(abs(rho * vi - pi) / n0c for vi, pi in zip(v, boosted.pi)))
    return {"sample": sample, "M": M, "det_numeric": numeric, "det_closed": closed,
            "recovered": recovered, "random_worst": worst, "solvable_agree": agree_solvable,
            "roundtrip": roundtrip, "seconds": time.perf_counter() - t0}


# -- Fresnel -----------------------------------------------------------------------

def run_fresnel(r):
    t0 = time.perf_counter()
    p, _, _ = beam_setup(r)
    src = fresnel.TransverseField.sample(lambda x: np.exp(-x * x / p.W0 ** 2),
                                         r["fresnel.x_min"], r["fresnel.x_max"],
                                         r["fresnel.n"], p.k)
    rows = []
    outputs = []
    for f in r["fresnel.z_factors"]:
        z = f * p.z0
        out = fresnel.propagate(src, z)
        w = fresnel.intensity_half_width(out)
        W = float(beam.beam_width(z, p))
        exact = beam.gaussian_1d(out.x, z, p)
        field_err = float(np.abs(out.samples - exact).max() / np.abs(exact).max())
        rows.append({"z": z, "width": w, "expected": W, "rel_error": abs(w - W) / W,
                     "field_error": field_err,
                     "power_error": abs(fresnel.power(out) - fresnel.power(src)) / fresnel.power(src)})
        outputs.append(out)
    z1 = p.z0
    once = fresnel.propagate(src, 2 * z1)
    twice = fresnel.propagate(fresnel.propagate(src, z1), z1)
    semigroup = float(np.abs(twice.samples - once.samples).max() / np.abs(once.samples).max())
    return {"params": p, "input": src, "outputs": outputs, "rows": rows,
            "semigroup": semigroup, "seconds": time.perf_counter() - t0}


# -- splitting residuals on closed-form solutions -------------------------------------

def run_splits(r):
    """Closed-form solutions of every split, plus the quantum-potential
    convergence of a Gaussian."""
    t0 = time.perf_counter()
    G = splits.Grid.sample
    o2, h2, sh2 = (-2.0, 0.0), (0.05, 0.05), (41, 41)
    ones = G(lambda x, z: np.ones_like(x), o2, h2, sh2)
    zS = G(lambda x, z: z, o2, h2, sh2)
    exact = {}
    re, im = splits.optical_split_residuals(ones, zS, ones, 0.01)
    exact["optical plane wave"] = max(re.max_abs, im.max_abs)
    m, hbar, pz = 1.0, 1.0, 1.7
    S = G(lambda x, z: pz * z, o2, h2, sh2)
    zero = G(lambda x, z: np.zeros_like(x), o2, h2, sh2)
    re, im = splits.schrodinger_split_residuals(ones, S, zero, m, hbar, pz ** 2 / (2 * m))
    exact["schrodinger plane wave"] = max(re.max_abs, im.max_abs)
    V0 = 0.4
    re, im = splits.schrodinger_split_residuals(ones, zero, G(lambda x, z: V0 + 0 * x, o2, h2, sh2),
                                                m, hbar, V0)
    exact["schrodinger constant"] = max(re.max_abs, im.max_abs)

    o3, h3, sh3 = (0.0, -1.0, -1.0), (0.05, 0.05, 0.05), (21, 21, 21)
    ones3 = G(lambda t, x, z: np.ones_like(t), o3, h3, sh3)
    chi = r["caratheodory.rapidity"]
    for label, func in (("shortwave rest frame", lambda t, x, z: t),
                        ("shortwave boosted", lambda t, x, z: t * math.cosh(chi) - x * math.sinh(chi))):
        re, im = splits.shortwave_split_residuals(ones3, G(func, o3, h3, sh3), 0.01)
        exact[label] = max(re.max_abs, im.max_abs)
        re, im = splits.hj_continuity_check(ones3, G(func, o3, h3, sh3))
        exact[label.replace("shortwave", "hj")] = max(re.max_abs, im.max_abs)
    re, im = splits.hj_continuity_check(G(lambda t, x, z: np.exp(-x * x), o3, h3, sh3),
                                        G(lambda t, x, z: t, o3, h3, sh3))
    exact["hj static density"] = max(re.max_abs, im.max_abs)

    sigma = 0.7
    errs = []
    for h in (0.04, 0.02):
        n = int(round(6.0 / h)) + 1
        R = G(lambda x, z: np.exp(-x * x / (2 * sigma ** 2)) + 0 * z, (-3.0, 0.0), (h, h), (n, 5))
        x = R.mesh()[0]
        Q = splits.quantum_potential(R, m, hbar).values
        Qx = hbar ** 2 / (2 * m * sigma ** 2) * (1 - x * x / sigma ** 2)
        errs.append(float(np.abs(Q - Qx)[2:-2, 2:-2].max()))
    return {"exact": exact, "qp_errors": errs, "qp_ratio": errs[0] / errs[1],
            "seconds": time.perf_counter() - t0}


# -- acceptance ----------------------------------------------------------------------

def _in_band(x, lo=3.5, hi=4.5):
    return lo <= x <= hi


def evaluate_criteria(res, r):
    """``res`` holds the outputs of the ``run_*`` suites keyed by name."""
    out = []
    sl = res["slits"]
    rel = abs(sl["period"] / sl["expected_period"] - 1.0)
    ok = sl["fringe_count"] == sl["band_count"] and rel < 0.05
    out.append(Criterion(1, "two-slit structure", ok,
                         f"maxima={sl['fringe_count']} bands={sl['band_count']} "
                         f"period={_g(sl['period'])} expected={_g(sl['expected_period'])} "
                         f"rel_err={_g(rel)} (< 0.05)", sl["seconds"], 30.0))
    eq = res["equivariance"]
    out.append(Criterion(2, "equivariance", eq["tv"] < r["equivariance.tv_max"],
                         f"n={r['equivariance.n']} landed={eq['landed']} bins={r['equivariance.bins']} "
                         f"tv={_g(eq['tv'])} (< {_g(r['equivariance.tv_max'])})",
                         eq["seconds"], 60.0))
    out.append(Criterion(3, "no-crossing", sl["ordering_violations"] == 0,
                         f"violations={sl['ordering_violations']} over {r['slits.n_seeds']} trajectories"))
    la = res["lattice"]
    rat = la["ratios"]
    keys4 = ("proca", "maxwell", "bianchi", "divergence")
    out.append(Criterion(4, "lattice convergence", all(_in_band(rat[k]) for k in keys4),
                         " ".join(f"{k}={_g(rat[k])}" for k in keys4) + " (in [3.5, 4.5])",
                         la["seconds"], 20.0))
    gaps = (la["coarse"]["kappa_gap"], la["fine"]["kappa_gap"])
    ok = max(gaps) < 1e-6 and _in_band(rat["kappa_error"])
    out.append(Criterion(5, "kappa agreement", ok,
                         f"gap={_g(max(gaps))} (< 1e-6) kappa1={_g(la['coarse']['kappa1'])} "
                         f"target={_g(-la['coarse']['kk'])} error_ratio={_g(rat['kappa_error'])}"))
    inv = res["inversion"]
    ok = inv["random_worst"] <= 1e-12 and inv["roundtrip"] <= 4 * np.finfo(float).eps \
        and inv["solvable_agree"]
    out.append(Criterion(6, "det M identity", ok,
                         f"worst_rel={_g(inv['random_worst'])} (<= 1e-12) "
                         f"roundtrip={_g(inv['roundtrip'])} solvability_matches={inv['solvable_agree']}"))
    ca = res["caratheodory"]
    fund = max(c["fundamental"] for c in ca["cases"])
    straight = max([c["straightness"] for c in ca["cases"]] + [ca["constant_straightness"]])
    el = max([c["euler_lagrange"] for c in ca["cases"]] + [ca["constant_euler_lagrange"]])
    hj = max(abs(c["hj"]) for c in ca["cases"])
    ok = fund <= 1e-12 and straight <= 1e-12 and el <= 1e-10 and hj <= 1e-12
    out.append(Criterion(7, "caratheodory free particle", ok,
                         f"fundamental={_g(fund)} straightness={_g(straight)} "
                         f"euler_lagrange={_g(el)} hj={_g(hj)}"))
    fr = res["fresnel"]
    werr = max(row["rel_error"] for row in fr["rows"])
    ok = werr < r["fresnel.width_tol"] and fr["semigroup"] <= 1e-6
    out.append(Criterion(8, "fresnel oracle", ok,
                         f"width_rel_err={_g(werr)} (< {_g(r['fresnel.width_tol'])}) "
                         f"semigroup={_g(fr['semigroup'])} (<= 1e-6)", fr["seconds"], 30.0))
    sp = res["splits"]
    worst = max(sp["exact"].values())
    ok = worst <= 1e-12 and _in_band(sp["qp_ratio"])
    out.append(Criterion(9, "madelung/eikonal residuals", ok,
                         f"closed_form_max={_g(worst)} (<= 1e-12) qp_ratio={_g(sp['qp_ratio'])}"))
    return out
