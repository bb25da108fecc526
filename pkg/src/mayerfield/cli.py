"""Command-line front end.

    mayerfield <subcommand> [--config FILE] [--set section.key=value ...]
               [--out DIR] [--rng-seed N]

Subcommands: slits, lattice-verify, caratheodory, invert-current, fresnel,
all-checks.  Every file written starts with the resolved configuration.
"""

from __future__ import annotations

import argparse
import filecmp
import os
import sys
import tempfile
import time

import numpy as np

from . import checks, io
from .config import load_config
from .errors import MayerFieldError

__all__ = ["main", "cmd_slits", "cmd_lattice_verify", "cmd_caratheodory",
           "cmd_invert_current", "cmd_fresnel", "cmd_all_checks", "run_all_checks"]


def _g(x):
    return repr(float(x))


def _vec(v):
    return "(" + ", ".join(_g(x) for x in v) + ")"


def _report(path, echo, lines):
    io.write_text(path, "\n".join(io.header_lines(echo) + list(lines)) + "\n")


# -- writers -----------------------------------------------------------------------

def write_slits(out, echo, sl, eq):
    trajs = sl["trajectories"]
    stride = dict(echo)["slits.path_stride"]
    stride = int(stride)
    cols = {"traj_id": [], "step": [], "x": [], "z": [], "weight": []}
    for tid, t in enumerate(trajs):
        steps = np.arange(0, len(t.points), stride)
        if steps[-1] != len(t.points) - 1:
            steps = np.append(steps, len(t.points) - 1)
        cols["traj_id"].append(np.full(steps.size, tid))
        cols["step"].append(steps)
        cols["x"].append(t.points[steps, 0])
        cols["z"].append(t.points[steps, 1])
        cols["weight"].append(np.full(steps.size, t.weight))
    data = {k: np.concatenate(v) for k, v in cols.items()}
    io.write_csv(os.path.join(out, "trajectories.csv"), list(cols), data, echo,
                 int_columns=("traj_id", "step"))
    io.write_grid_csv(os.path.join(out, "density.csv"), sl["grid_x"], sl["grid_z"],
                      sl["grid_rho"], echo)
    amp = np.sqrt(sl["grid_rho"])
    img = 255.0 * amp.T / amp.max()   # rows = z (down), columns = x
    io.write_pgm(os.path.join(out, "density.pgm"), img, echo)
    lines = [
        f"fringe_count = {sl['fringe_count']}",
        "maxima_x = " + ", ".join(_g(x) for x in sl["maxima"]),
        f"fringe_period = {_g(sl['period'])}",
        f"expected_period_pi_z_over_k_a = {_g(sl['expected_period'])}",
        f"band_count = {sl['band_count']}",
        f"ordering_violations = {sl['ordering_violations']}",
        "termination = " + ", ".join(f"{k}:{v}" for k, v in sl["termination"].items()),
    ]
    if eq is not None:
        lines += [f"equivariance_landed = {eq['landed']}",
                  f"equivariance_tv = {_g(eq['tv'])}"]
    _report(os.path.join(out, "report.txt"), echo, lines)


def write_lattice(out, echo, la, r):
    lines = [f"k.k = {_g(la['coarse']['kk'])}"]
    for level in ("coarse", "fine"):
        d = la[level]
        lines.append(f"[{level}] h = {_g(d['h'])}")
        for key in ("proca", "proca_K", "maxwell", "bianchi", "bianchi_discrete",
                    "divergence", "wave_null", "kappa1", "kappa2", "kappa_error", "kappa_gap"):
            lines.append(f"  {key} = {_g(d[key])}")
    lines.append("[ratios coarse/fine]")
    lines += [f"  {k} = {_g(v)}" for k, v in la["ratios"].items()]
    _report(os.path.join(out, "lattice_report.txt"), echo, lines)
    pi = la["field"]
    io.write_lattice_csv(os.path.join(out, "lattice_pi.csv"), pi.lattice, pi.values,
                         ["pi0", "pi1", "pi2", "pi3"], echo)


def write_caratheodory(out, echo, ca):
    lines = []
    for c in ca["cases"]:
        lines.append(f"{c['case']} s={_g(c['scale'])}: hj={_g(c['hj'])} "
                     f"fundamental={_g(c['fundamental'])} straightness={_g(c['straightness'])} "
                     f"euler_lagrange={_g(c['euler_lagrange'])}")
    lines += [f"explicit constant: straightness={_g(ca['constant_straightness'])} "
              f"euler_lagrange={_g(ca['constant_euler_lagrange'])}",
              f"HJ violated (p.p = 2 m^2 c^2): first residual={_g(ca['hj_violation_first'])}",
              f"non-Mayer field v^1 = 0.2 x^0: straightness={_g(ca['counter_straightness'])} "
              f"euler_lagrange={_g(ca['counter_euler_lagrange'])}"]
    _report(os.path.join(out, "caratheodory_report.txt"), echo, lines)


def write_inversion(out, echo, inv):
    lines = [f"pi = {_vec(inv['sample'].pi)}", f"n0c = {_g(inv['sample'].n0c)}", "M ="]
    lines += ["  " + " ".join(_g(x) for x in row) for row in inv["M"]]
    lines += [f"det_M_numeric = {_g(inv['det_numeric'])}",
              f"det_M_closed_form = {_g(inv['det_closed'])}"]
    rec = inv["recovered"]
    if rec["error"] is None:
        lines += [f"recovered v = {_vec(rec['v'])}", f"recovered rho = {_g(rec['rho'])}",
                  "family: v(s) = s * pi, rho(s) = 1/s for every s > 0"]
    else:
        lines.append(f"recover_velocity: {rec['error']}")
    lines += [f"random currents worst relative det mismatch = {_g(inv['random_worst'])}",
              f"solvability matches determinant = {inv['solvable_agree']}",
              f"round-trip max |rho v - pi| / n0c = {_g(inv['roundtrip'])}"]
    _report(os.path.join(out, "invert_report.txt"), echo, lines)


def write_fresnel(out, echo, fr):
    io.write_transverse_csv(os.path.join(out, "fresnel_input.csv"), fr["input"], echo)
    lines = []
    for i, (row, field) in enumerate(zip(fr["rows"], fr["outputs"])):
        io.write_transverse_csv(os.path.join(out, f"fresnel_output_{i}.csv"), field,
                                echo + [("output.z", _g(row["z"]))])
        status = "ok" if row["rel_error"] < 0.005 else "EXCEEDS"
        lines.append(f"z = {_g(row['z'])}: width = {_g(row['width'])} W(z) = {_g(row['expected'])} "
                     f"rel_error = {_g(row['rel_error'])} < 0.5% {status}; "
                     f"field_error = {_g(row['field_error'])} power_error = {_g(row['power_error'])}")
    lines.append(f"semigroup max relative difference = {_g(fr['semigroup'])}")
    _report(os.path.join(out, "fresnel_report.txt"), echo, lines)


# -- subcommands --------------------------------------------------------------------

def cmd_slits(cfg, out):
    r = cfg.resolve()
    sl = checks.run_slits(r)
    eq = checks.run_equivariance(r)
    write_slits(out, cfg.echo(), sl, eq)
    return 0


def cmd_lattice_verify(cfg, out):
    r = cfg.resolve()
    la = checks.run_lattice(r)
    write_lattice(out, cfg.echo(), la, r)
    ok = all(checks._in_band(la["ratios"][k]) for k in checks.RATIO_KEYS)
    return 0 if ok else 1


def cmd_caratheodory(cfg, out):
    write_caratheodory(out, cfg.echo(), checks.run_caratheodory(cfg.resolve()))
    return 0


def cmd_invert_current(cfg, out):
    write_inversion(out, cfg.echo(), checks.run_inversion(cfg.resolve()))
    return 0


def cmd_fresnel(cfg, out):
    fr = checks.run_fresnel(cfg.resolve())
    write_fresnel(out, cfg.echo(), fr)
    return 0


def _run_everything(cfg, out):
    r = cfg.resolve()
    echo = cfg.echo()
    res = {"slits": checks.run_slits(r), "equivariance": checks.run_equivariance(r),
           "lattice": checks.run_lattice(r), "caratheodory": checks.run_caratheodory(r),
           "inversion": checks.run_inversion(r), "fresnel": checks.run_fresnel(r),
           "splits": checks.run_splits(r)}
    write_slits(out, echo, res["slits"], res["equivariance"])
    write_lattice(out, echo, res["lattice"], r)
    write_caratheodory(out, echo, res["caratheodory"])
    write_inversion(out, echo, res["inversion"])
    write_fresnel(out, echo, res["fresnel"])
    return res, checks.evaluate_criteria(res, r)


def _same_tree(a, b):
    """Compare every file of the fresh directory ``b`` with its namesake in ``a``."""
    names = sorted(os.listdir(b))
    _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    if mismatch or errors:
        return False, "differs: " + ", ".join(mismatch + errors)
    return True, f"{len(names)} files byte-identical"


def run_all_checks(cfg, out):
    """Run criteria 1-9, then repeat every output-producing run in a scratch
    directory and compare bytes (criterion 10).  Writes ``all_checks.txt``
    and returns the criteria."""
    _, crits = _run_everything(cfg, out)
    with tempfile.TemporaryDirectory() as tmp:
        _run_everything(cfg, tmp)
        same, detail = _same_tree(out, tmp)
    crits.append(checks.Criterion(10, "determinism", same, detail))
    _report(os.path.join(out, "all_checks.txt"), cfg.echo(), [c.line() for c in crits])
    return crits


def cmd_all_checks(cfg, out, stream=None):
    """Exit status 0 iff every criterion passes within its runtime budget.
    Timings are printed to ``stream`` only, never written to files."""
    stream = stream or sys.stdout
    t0 = time.perf_counter()
    failed = False
    for c in run_all_checks(cfg, out):
        print(c.line(), file=stream)
        failed |= not c.passed
        if c.budget is not None:
            verdict = "ok" if c.within_budget else "OVER BUDGET"
            print(f"     runtime {c.seconds:.1f} s (budget {c.budget:g} s) {verdict}", file=stream)
            failed |= not c.within_budget
    print(f"total {time.perf_counter() - t0:.1f} s", file=stream)
    return 1 if failed else 0


COMMANDS = {
    "slits": cmd_slits,
    "lattice-verify": cmd_lattice_verify,
    "caratheodory": cmd_caratheodory,
    "invert-current": cmd_invert_current,
    "fresnel": cmd_fresnel,
    "all-checks": cmd_all_checks,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="mayerfield", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="file of 'section.key = value' lines")
    ap.add_argument("--set", dest="overrides", action="append", default=[],
                    metavar="SECTION.KEY=VALUE", help="override a config value (repeatable)")
    ap.add_argument("--out", default="out", help="output directory (default: ./out)")
    ap.add_argument("--rng-seed", type=int, default=None)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides, args.rng_seed)
        cfg.resolve()
        os.makedirs(args.out, exist_ok=True)
        code = COMMANDS[args.command](cfg, args.out)
    except MayerFieldError as exc:
        print(f"FAIL {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.command != "all-checks":
        print(f"wrote outputs to {args.out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
