"""Point-cloud data model, file I/O and sampling-density estimation.

Supported formats: PLY (ascii / binary_little_endian) and XYZ for clouds,
PLY / OBJ for relief meshes.  Coordinates are stored as float64 regardless
of the on-disk precision; normals are renormalized at load time.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyMesh, IOFailure, MalformedFile, MissingNormals, TooFewPoints


@dataclass(frozen=True)
class PointCloud:
    """Positions with unit normals.  Immutable after construction."""

    points: np.ndarray   # (N, 3) float64
    normals: np.ndarray  # (N, 3) float64, unit length

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        nrm = np.ascontiguousarray(self.normals, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3 or nrm.shape != pts.shape:
            raise MalformedFile("points/normals must both be (N, 3)")
        if len(pts) < 4:
            raise TooFewPoints(f"need at least 4 points, got {len(pts)}")
        if not np.isfinite(pts).all() or not np.isfinite(nrm).all():
            raise MalformedFile("NaN/Inf coordinates rejected")
        lengths = np.linalg.norm(nrm, axis=1)
        if np.any(lengths < 1e-12):
            raise MissingNormals("zero-length normal encountered")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "normals", nrm / lengths[:, None])

    def __len__(self):
        return len(self.points)

    @property
    def bbox(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    @property
    def diagonal(self) -> float:
        lo, hi = self.bbox
        return float(np.linalg.norm(hi - lo))


def estimate_density(cloud: PointCloud) -> float:
    """Mean nearest-neighbor distance over all points."""
    if len(cloud) < 2:
        raise TooFewPoints("density needs at least 2 points")
    d, _ = cKDTree(cloud.points).query(cloud.points, k=2)
    return float(d[:, 1].mean())


# ---------------------------------------------------------------------------
# PLY parsing (the slice of the format this pipeline needs)

_PLY_DTYPES = {
    "float": "f4", "float32": "f4", "double": "f8", "float64": "f8",
    "char": "i1", "int8": "i1", "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2", "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4", "uint": "u4", "uint32": "u4",
}


def _read_ply_header(stream):
    if stream.readline().strip() != b"ply":
        raise MalformedFile("not a PLY file")
    fmt = None
    elements = []  # (name, count, [(prop_name, dtype)], list_props)
    while True:
        line = stream.readline()
        if not line:
            raise MalformedFile("unterminated PLY header")
        tok = line.decode("ascii", "replace").split()
        if not tok or tok[0] == "comment":
            continue
        if tok[0] == "format":
            fmt = tok[1]
            if fmt not in ("ascii", "binary_little_endian"):
                raise MalformedFile(f"unsupported PLY format {fmt!r}")
        elif tok[0] == "element":
            elements.append((tok[1], int(tok[2]), []))
        elif tok[0] == "property":
            if not elements:
                raise MalformedFile("property before element")
            if tok[1] == "list":
                elements[-1][2].append((tok[4], ("list", tok[2], tok[3])))
            else:
                if tok[1] not in _PLY_DTYPES:
                    raise MalformedFile(f"unsupported property type {tok[1]!r}")
                elements[-1][2].append((tok[2], _PLY_DTYPES[tok[1]]))
        elif tok[0] == "end_header":
            break
    if fmt is None:
        raise MalformedFile("PLY header missing format line")
    return fmt, elements


def _read_ply(stream):
    """Return {element_name: dict of property arrays}."""
    fmt, elements = _read_ply_header(stream)
    out = {}
    if fmt == "ascii":
        text = stream.read().decode("ascii", "replace").split("\n")
        rows = [t.split() for t in text if t.strip()]
        pos = 0
        for name, count, props in elements:
            if pos + count > len(rows):
                raise MalformedFile(f"PLY element {name!r} truncated")
            cols = {}
            if any(isinstance(d, tuple) for _, d in props):
                # list property rows (faces): parse per row
                lists = []
                for r in rows[pos:pos + count]:
                    n = int(r[0])
                    lists.append([int(v) for v in r[1:1 + n]])
                cols[props[0][0]] = lists
            else:
                block = np.array(rows[pos:pos + count], dtype=np.float64)
                if block.shape[1] != len(props):
                    raise MalformedFile(f"PLY element {name!r} column mismatch")
                for j, (pname, _) in enumerate(props):
                    cols[pname] = block[:, j]
            out[name] = cols
            pos += count
    else:
        for name, count, props in elements:
            if any(isinstance(d, tuple) for _, d in props):
                pname, (_, cnt_t, val_t) = props[0]
                cnt_dt = np.dtype("<" + _PLY_DTYPES[cnt_t])
                val_dt = np.dtype("<" + _PLY_DTYPES[val_t])
                lists = []
                for _ in range(count):
                    n = int(np.frombuffer(stream.read(cnt_dt.itemsize), cnt_dt)[0])
                    lists.append(np.frombuffer(stream.read(val_dt.itemsize * n),
                                               val_dt).astype(np.int64).tolist())
                out[name] = {pname: lists}
            else:
                dt = np.dtype([(p, "<" + d) for p, d in props])
                raw = stream.read(dt.itemsize * count)
                if len(raw) != dt.itemsize * count:
                    raise MalformedFile(f"PLY element {name!r} truncated")
                rec = np.frombuffer(raw, dt)
                out[name] = {p: rec[p].astype(np.float64) for p, _ in props}
    return out


def load_cloud(source, format: str) -> PointCloud:
    """Load a point cloud with normals from a byte stream.

    format: "ply" or "xyz" (case-insensitive).  XYZ files carry six
    whitespace-separated columns: x y z nx ny nz.
    """
    fmt = format.lower()
    if fmt == "ply":
        data = _read_ply(source)
        if "vertex" not in data:
            raise MalformedFile("PLY has no vertex element")
        v = data["vertex"]
        for c in ("x", "y", "z"):
            if c not in v:
                raise MalformedFile(f"PLY vertex missing {c!r}")
        if not all(c in v for c in ("nx", "ny", "nz")):
            raise MissingNormals("PLY vertex element lacks nx/ny/nz")
        pts = np.column_stack([v["x"], v["y"], v["z"]])
        nrm = np.column_stack([v["nx"], v["ny"], v["nz"]])
    elif fmt == "xyz":
        try:
            arr = np.loadtxt(io.BytesIO(source.read()), dtype=np.float64, ndmin=2)
        except ValueError as e:
            raise MalformedFile(f"bad XYZ file: {e}") from None
        if arr.shape[1] < 6:
            raise MissingNormals("XYZ file needs 6 columns (x y z nx ny nz)")
        pts, nrm = arr[:, :3], arr[:, 3:6]
    else:
        raise MalformedFile(f"unknown cloud format {format!r}")
    if len(pts) < 4:
        raise TooFewPoints(f"need at least 4 points, got {len(pts)}")
    return PointCloud(pts, nrm)


def load_cloud_path(path) -> PointCloud:
    fmt = str(path).rsplit(".", 1)[-1].lower()
    try:
        with open(path, "rb") as f:
            return load_cloud(f, fmt)
    except OSError as e:
        raise IOFailure(str(e)) from None


# ---------------------------------------------------------------------------
# Mesh output

def save_mesh(mesh, sink, format: str = "ply") -> None:
    """Write a relief mesh (vertices, triangles, vertex normals) as PLY or OBJ."""
    v = np.asarray(mesh.vertices, dtype=np.float64)
    f = np.asarray(mesh.triangles, dtype=np.int64)
    n = None if mesh.normals is None else np.asarray(mesh.normals, dtype=np.float64)
    if len(v) < 3 or len(f) < 1:
        raise EmptyMesh(f"mesh has {len(v)} vertices / {len(f)} faces")
    fmt = format.lower()
    try:
        if fmt == "ply":
            _write_ply(v, f, n, sink)
        elif fmt == "obj":
            _write_obj(v, f, n, sink)
        else:
            raise IOFailure(f"unknown mesh format {format!r}")
    except OSError as e:
        raise IOFailure(str(e)) from None


def _write_ply(v, f, n, sink):
    props = ["property double x", "property double y", "property double z"]
    if n is not None:
        props += ["property double nx", "property double ny", "property double nz"]
    header = (
        "ply\nformat binary_little_endian 1.0\n"
        f"element vertex {len(v)}\n" + "\n".join(props) + "\n"
        f"element face {len(f)}\n"
        "property list uchar int vertex_indices\nend_header\n"
    )
    sink.write(header.encode("ascii"))
    block = v if n is None else np.hstack([v, n])
    sink.write(np.ascontiguousarray(block, dtype="<f8").tobytes())
    face_dt = np.dtype([("n", "u1"), ("idx", "<i4", 3)])
    faces = np.empty(len(f), face_dt)
    faces["n"] = 3
    faces["idx"] = f
    sink.write(faces.tobytes())


def _write_obj(v, f, n, sink):
    lines = [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in v]
    if n is not None:
        lines += [f"vn {x:.9g} {y:.9g} {z:.9g}" for x, y, z in n]
        lines += [f"f {a+1}//{a+1} {b+1}//{b+1} {c+1}//{c+1}" for a, b, c in f]
    else:
        lines += [f"f {a+1} {b+1} {c+1}" for a, b, c in f]
    sink.write(("\n".join(lines) + "\n").encode("ascii"))


def load_mesh(source, format: str = "ply"):
    """Read back a saved mesh; returns (vertices, triangles, normals-or-None)."""
    fmt = format.lower()
    if fmt == "ply":
        data = _read_ply(source)
        v = data["vertex"]
        pts = np.column_stack([v["x"], v["y"], v["z"]])
        nrm = None
        if all(c in v for c in ("nx", "ny", "nz")):
            nrm = np.column_stack([v["nx"], v["ny"], v["nz"]])
        faces = np.array(next(iter(data["face"].values())), dtype=np.int64) \
            if "face" in data else np.zeros((0, 3), np.int64)
        return pts, faces, nrm
    if fmt == "obj":
        pts, nrm, faces = [], [], []
        for line in source.read().decode("ascii", "replace").splitlines():
            t = line.split()
            if not t:
                continue
            if t[0] == "v":
                pts.append([float(x) for x in t[1:4]])
            elif t[0] == "vn":
                nrm.append([float(x) for x in t[1:4]])
            elif t[0] == "f":
                faces.append([int(x.split("/")[0]) - 1 for x in t[1:4]])
        return (np.array(pts), np.array(faces, dtype=np.int64),
                np.array(nrm) if nrm else None)
    raise MalformedFile(f"unknown mesh format {format!r}")
