"""Plain-text formats: grid masks, distance and h tables, curves, meshes and JSON reports."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .base_manifold import Grid
from .fmm import GridLevelSet


# ---------------------------------------------------------------------------
# mask files

def read_mask(path) -> GridLevelSet:
    """Read ``nx ny [nz] h ox oy [oz]`` followed by rows of 0/1 flags.

    Rows run along x; the first row is ``j = 0`` (and ``k = 0`` for 3-D,
    with ``ny`` rows per ``k`` layer).  Blank lines and ``#`` comments are
    ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError(f"{path}: empty mask file")
    head = lines[0].split()
    if len(head) == 5:
        dims = 2
    elif len(head) == 7:
        dims = 3
    else:
        raise ValueError(f"{path}: header must be 'nx ny [nz] h ox oy [oz]'")
    shape = tuple(int(x) for x in head[:dims])
    h = float(head[dims])
    origin = tuple(float(x) for x in head[dims + 1:])
    rows = [ln.replace(",", " ").split() for ln in lines[1:]]
    nx = shape[0]
    n_rows = int(np.prod(shape[1:]))
    if len(rows) != n_rows or any(len(r) != nx for r in rows):
        raise ValueError(f"{path}: expected {n_rows} rows of {nx} flags")
    flags = np.array([[int(x) for x in r] for r in rows])
    if not np.isin(flags, (0, 1)).all():
        raise ValueError(f"{path}: flags must be 0 or 1")
    # rows are (k, j) major; store as [i, j, k]
    mask = flags.reshape(tuple(reversed(shape))).transpose().astype(bool)
    return GridLevelSet(Grid(shape, h, origin), mask)


def write_mask(path, level_set: GridLevelSet):
    g = level_set.grid
    head = " ".join([str(n) for n in g.shape] + [repr(g.h)] + [repr(o) for o in g.origin])
    flags = level_set.mask.transpose().reshape(-1, g.shape[0]).astype(int)
    body = "\n".join(" ".join(map(str, r)) for r in flags)
    Path(path).write_text(head + "\n" + body + "\n")


# ---------------------------------------------------------------------------
# CSV tables

def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_distance_csv(path, grid: Grid, values):
    """Columns ``i, j[, k], x, y[, z], d``; one row per node."""
    values = np.asarray(values, float)
    names = "ijk"[: grid.ndim]
    coords = "xyz"[: grid.ndim]
    nodes = grid.nodes()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(names) + list(coords) + ["d"])
        for idx in np.ndindex(*grid.shape):
            w.writerow(list(idx) + [_fmt(c) for c in nodes[idx]] + [_fmt(values[idx])])


def read_distance_csv(path):
    """Inverse of :func:`write_distance_csv`; returns ``(grid, values)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, data = rows[0], np.array([[float(x) for x in r] for r in rows[1:]])
    dims = (len(head) - 1) // 2
    idx = data[:, :dims].astype(int)
    shape = tuple(idx.max(axis=0) + 1)
    values = np.full(shape, np.nan)
    values[tuple(idx.T)] = data[:, -1]
    origin_row = data[np.all(idx == 0, axis=1)][0]
    step_row = data[np.argmax(idx[:, 0])]
    h = (step_row[dims] - origin_row[dims]) / (shape[0] - 1)
    return Grid(shape, float(h), tuple(origin_row[dims:2 * dims])), values


def write_h_table(path, builder):
    """Columns ``r, s`` with ``s = h(r)`` on the builder's adaptive nodes."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "s"])
        for r, s in zip(builder.table_r, builder.table_s):
            w.writerow([_fmt(r), _fmt(s)])


def write_curve_csv(path, curve):
    """Columns ``s, t, p..., tangential, normal, expected_normal`` (residuals blank at the ends)."""
    pts = curve.points
    n = pts.shape[1] - 1
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "t"] + [f"p{k}" for k in range(n)]
                   + ["tangential", "normal", "expected_normal"])
        for i, (s, x) in enumerate(zip(curve.s, pts)):
            j = i - 1
            res = ["", "", ""]
            if 0 <= j < curve.tangential_residual.size:
                res = [_fmt(curve.tangential_residual[j]), _fmt(curve.normal_component[j]),
                       _fmt(curve.expected_normal[j])]
            w.writerow([_fmt(s)] + [_fmt(c) for c in x] + res)


# ---------------------------------------------------------------------------
# meshes

def write_obj(path, mesh):
    with open(path, "w") as fh:
        fh.write("# constant angle surface\n")
        for v in mesh.vertices:
            fh.write("v " + " ".join(_fmt(c) for c in v) + "\n")
        for n in mesh.normals:
            fh.write("vn " + " ".join(_fmt(c) for c in n) + "\n")
        for f in mesh.faces:
            fh.write("f " + " ".join(f"{i + 1}//{i + 1}" for i in f) + "\n")


def write_ply(path, mesh):
    """ASCII PLY with normals and one float property per vertex attribute."""
    names = list(mesh.attributes)
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"comment skipped_cells {mesh.skipped}\n")
        fh.write(f"element vertex {len(mesh.vertices)}\n")
        for p in ("x", "y", "z", "nx", "ny", "nz", *names):
            fh.write(f"property double {p}\n")
        fh.write(f"element face {len(mesh.faces)}\n")
        fh.write("property list uchar int vertex_indices\nend_header\n")
        for i, (v, n) in enumerate(zip(mesh.vertices, mesh.normals)):
            vals = list(v) + list(n) + [mesh.attributes[k][i] for k in names]
            fh.write(" ".join(_fmt(c) for c in vals) + "\n")
        for f in mesh.faces:
            fh.write("3 " + " ".join(str(int(i)) for i in f) + "\n")


def read_ply_header(path):
    """Vertex/face counts and property names of an ASCII PLY file."""
    out = {"properties": []}
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if parts[:2] == ["element", "vertex"]:
                out["vertices"] = int(parts[2])
            elif parts[:2] == ["element", "face"]:
                out["faces"] = int(parts[2])
            elif parts[:2] == ["property", "double"]:
                out["properties"].append(parts[2])
            elif parts == ["end_header"]:
                break
    return out


# ---------------------------------------------------------------------------
# JSON

def _to_json(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_to_json(str(k), indent, level + 1)}: {_to_json(v, indent, level + 1)}"
                 for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        return "[\n" + ",\n".join(pad + _to_json(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no NaN/inf literals
        return f'"{_fmt(x)}"' if not math.isfinite(x) else _fmt(x)
    return json.dumps(str(obj))


def dumps_report(obj, indent=2) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    return _to_json(obj, indent, 0) + "\n"


def write_report(path, obj):
    Path(path).write_text(dumps_report(obj))
