"""Plain-text grid and trajectory files.

Grid CSV layout::

    # qprop-grid v1
    # nq=256 np=256 qmin=-8 qmax=8 pmin=-8 pmax=8 ordering=0,0,0 t=0
    q,p,re,im
    ...

Rows run q-major (q outer, p inner). Numbers are written with 17
significant digits so identical runs give byte-identical files. A JSON
sidecar next to the CSV repeats the metadata and adds the normalization sum.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .ordering import OrderingParams
from .phasegrid import Geometry, PhaseGrid

__all__ = [
    "GRID_MAGIC",
    "format_number",
    "grid_metadata",
    "write_grid",
    "read_grid",
    "write_columns",
    "write_json",
    "sidecar_path",
]

GRID_MAGIC = "# qprop-grid v1"


def format_number(x: float) -> str:
    return "%.17g" % x


def grid_metadata(F: PhaseGrid) -> dict:
    g = F.geometry
    norm = F.normalization()
    return {
        "format": "qprop-grid v1",
        "nq": g.n_q,
        "np": g.n_p,
        "qmin": g.q_min,
        "qmax": g.q_max,
        "pmin": g.p_min,
        "pmax": g.p_max,
        "ordering": list(F.ordering.as_tuple()),
        "t": F.t,
        "normalization": [norm.real, norm.imag],
    }


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def write_json(path: str | Path, data: dict) -> None:
    """JSON with sorted keys and shortest round-trip floats."""
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True, allow_nan=True) + "\n")


def write_grid(path: str | Path, F: PhaseGrid, fmt: str = "csv") -> Path:
    """Write ``F`` as CSV (or ``npz``) plus a JSON sidecar; returns the data path."""
    path = Path(path)
    g = F.geometry
    if fmt == "npz":
        path = path.with_suffix(".npz")
        with open(path, "wb") as fh:
            np.savez(fh, q=g.q, p=g.p, values=F.values, ordering=np.array(F.ordering.as_tuple()), t=F.t)
    elif fmt == "csv":
        f = format_number
        head = (
            f"# nq={g.n_q} np={g.n_p} qmin={f(g.q_min)} qmax={f(g.q_max)} "
            f"pmin={f(g.p_min)} pmax={f(g.p_max)} "
            f"ordering={','.join(f(x) for x in F.ordering.as_tuple())} t={f(F.t)}"
        )
        Q, P = g.mesh()
        table = np.column_stack([Q.ravel(), P.ravel(), F.values.real.ravel(), F.values.imag.ravel()])
        with open(path, "w") as fh:
            fh.write(GRID_MAGIC + "\n" + head + "\nq,p,re,im\n")
            np.savetxt(fh, table, fmt="%.17g", delimiter=",")
    else:
        raise ValueError(f"unknown grid format {fmt!r}; expected 'csv' or 'npz'")
    write_json(sidecar_path(path), grid_metadata(F))
    return path


def read_grid(path: str | Path) -> PhaseGrid:
    """Read a grid written by :func:`write_grid`."""
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path) as z:
            q, p = z["q"], z["p"]
            dq, dp = q[1] - q[0], p[1] - p[0]
            geom = Geometry(len(q), len(p), float(q[0]), float(q[0] + dq * len(q)), float(p[0]), float(p[0] + dp * len(p)))
            return PhaseGrid(geom, z["values"], OrderingParams(*map(float, z["ordering"])), float(z["t"]))
    with open(path) as fh:
        magic = fh.readline().strip()
        if magic != GRID_MAGIC:
            raise ValueError(f"{path}: not a qprop grid file (first line {magic!r})")
        meta_line = fh.readline().strip()
        if not meta_line.startswith("#"):
            raise ValueError(f"{path}: missing metadata line")
        meta = dict(item.split("=", 1) for item in meta_line[1:].split())
        geom = Geometry(
            int(meta["nq"]), int(meta["np"]),
            float(meta["qmin"]), float(meta["qmax"]),
            float(meta["pmin"]), float(meta["pmax"]),
        )
        g = OrderingParams(*map(float, meta["ordering"].split(",")))
        data = np.loadtxt(fh, delimiter=",", skiprows=1, ndmin=2)
    if data.shape != (geom.n_q * geom.n_p, 4):
        raise ValueError(f"{path}: expected {geom.n_q * geom.n_p} rows of 4 columns, got {data.shape}")
    vals = (data[:, 2] + 1j * data[:, 3]).reshape(geom.n_q, geom.n_p)
    if not (math.isclose(data[0, 0], geom.q_min) and math.isclose(data[0, 1], geom.p_min)):
        raise ValueError(f"{path}: first row does not sit at (qmin, pmin)")
    return PhaseGrid(geom, vals, g, float(meta["t"]))


def write_columns(path_or_fh, t, values, prefix: str, comment: str | None = None) -> None:
    """Write ``t, Re x1, Im x1, ..., Re xn, Im xn`` rows.

    ``values`` has shape ``(len(t), n)`` and is complex.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=complex)
    n = values.shape[1]
    cols = ["t"] + [f"{part} {prefix}{i + 1}" for i in range(n) for part in ("Re", "Im")]
    table = np.empty((len(t), 1 + 2 * n))
    table[:, 0] = t
    table[:, 1::2] = values.real
    table[:, 2::2] = values.imag
    own = isinstance(path_or_fh, (str, Path))
    fh = open(path_or_fh, "w") if own else path_or_fh
    try:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(",".join(cols) + "\n")
        np.savetxt(fh, table, fmt="%.17g", delimiter=",")
    finally:
        if own:
            fh.close()
