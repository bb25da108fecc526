"""Deterministic text outputs: CSV tables and ASCII PGM images.

Every file starts with ``#`` comment lines echoing the resolved run
configuration.  CSV floats are written with 17 significant digits so they
round-trip exactly; lines end in LF regardless of platform.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "format_float",
    "header_lines",
    "write_csv",
    "read_csv",
    "write_grid_csv",
    "write_lattice_csv",
    "write_transverse_csv",
    "write_pgm",
    "read_pgm",
    "write_text",
]


def format_float(x) -> str:
    return "%.17g" % float(x)


def header_lines(echo):
    """``echo`` is a mapping (or iterable of pairs) of resolved config values."""
    items = echo.items() if hasattr(echo, "items") else echo
    return ["# %s = %s" % (k, v) for k, v in items]


def _fmt_cell(v, is_int):
    return str(int(v)) if is_int else format_float(v)


def write_csv(path, columns, data, echo=(), int_columns=()):
    """Write ``data`` (mapping column -> 1-d array) in ``columns`` order."""
    cols = [np.asarray(data[c]) for c in columns]
    n = len(cols[0]) if cols else 0
    if any(len(c) != n for c in cols):
        raise ValueError("all columns must have the same length")
    ints = [c in int_columns for c in columns]
    lines = header_lines(echo)
    lines.append(",".join(columns))
    # column-wise formatting keeps this fast for large tables
    text_cols = [[_fmt_cell(v, isint) for v in col.tolist()] for col, isint in zip(cols, ints)]
    lines.extend(",".join(row) for row in zip(*text_cols))
    write_text(path, "\n".join(lines) + "\n")


def read_csv(path):
    """Return ``(echo_dict, columns, float array of shape (rows, ncols))``."""
    echo = {}
    columns = None
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, val = line[1:].partition("=")
                echo[key.strip()] = val.strip()
            elif columns is None:
                columns = line.split(",")
            elif line:
                rows.append([float(v) for v in line.split(",")])
    arr = np.array(rows, dtype=float).reshape(len(rows), len(columns or []))
    return echo, columns, arr


def write_grid_csv(path, x, z, rho, echo=()):
    """``rho[i, j]`` at ``(x[i], z[j])`` as rows ``i, j, x, z, rho``."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (x.size, z.size):
        raise ValueError("rho must have shape (len(x), len(z))")
    I, J = np.meshgrid(np.arange(x.size), np.arange(z.size), indexing="ij")
    X, Z = np.meshgrid(x, z, indexing="ij")
    write_csv(path, ["i", "j", "x", "z", "rho"],
              {"i": I.ravel(), "j": J.ravel(), "x": X.ravel(), "z": Z.ravel(), "rho": rho.ravel()},
              echo, int_columns=("i", "j"))


def write_lattice_csv(path, lattice, components, names, echo=()):
    """One row per site: four integer indices followed by the components."""
    idx = np.meshgrid(*(np.arange(n) for n in lattice.dims), indexing="ij")
    data = {f"i{mu}": idx[mu].ravel() for mu in range(4)}
    for name, comp in zip(names, components):
        data[name] = np.broadcast_to(comp, lattice.dims).ravel()
    write_csv(path, [f"i{mu}" for mu in range(4)] + list(names), data, echo,
              int_columns=tuple(f"i{mu}" for mu in range(4)))


def write_transverse_csv(path, field, echo=()):
    a = field.samples
    write_csv(path, ["i", "x", "re", "im"],
              {"i": np.arange(a.size), "x": field.x, "re": a.real, "im": a.imag},
              echo, int_columns=("i",))


def write_pgm(path, image, echo=(), maxval=255):
    """ASCII (P2) greyscale; ``image`` rows are written top to bottom.

    Comment lines go right after the magic number, where the format allows
    them.
    """
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError("image must be 2-d")
    img = np.clip(np.rint(img), 0, maxval).astype(int)
    h, w = img.shape
    lines = ["P2"] + header_lines(echo) + [f"{w} {h}", str(maxval)]
    lines.extend(" ".join(str(v) for v in row) for row in img.tolist())
    write_text(path, "\n".join(lines) + "\n")


def read_pgm(path):
    tokens = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    if tokens[0] != "P2":
        raise ValueError("not an ASCII PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array([int(t) for t in tokens[4:4 + w * h]]).reshape(h, w)
    return data, maxval


def write_text(path, text):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
