"""Geometric base types and ascii mesh / point-cloud file IO.

Supported formats are deliberately ascii-only so that files stay inspectable
and round-trips are bit-exact: OBJ and OFF for triangle meshes, XYZ / ascii
PLY / CSV (header ``x,y,z``) for point clouds. Binary variants are rejected
with a ParseError. Coordinates are written with 17 significant digits, which
round-trips IEEE doubles exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyMeshError, FaceIndexError, ParseError

_MESH_FORMATS = ("obj", "off")
_CLOUD_FORMATS = ("xyz", "ply", "csv")

# ignored OBJ keywords outside the v/f subset
_OBJ_PASSTHROUGH = {"vn", "vt", "vp", "o", "g", "s", "usemtl", "mtllib", "l"}


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


@dataclass(frozen=True)
class TriangleMesh:
    """Indexed triangle surface: (V, 3) float64 vertices, (F, 3) int64 faces."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        f = np.ascontiguousarray(np.asarray(self.faces, dtype=np.int64))
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must be (V, 3), got {v.shape}")
        if f.size == 0:
            f = f.reshape(0, 3)
        if f.ndim != 2 or f.shape[1] != 3:
            raise ValueError(f"faces must be (F, 3), got {f.shape}")
        if not np.isfinite(v).all():
            raise ValueError("vertex coordinates must be finite")
        if f.shape[0]:
            if f.min() < 0 or f.max() >= len(v):
                raise ValueError("face index out of range")
            if (
                (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
            ).any():
                raise ValueError("face repeats a vertex index")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class PointCloud:
    """Unordered set of 3-D points, stored as an (N, 3) float64 array."""

    points: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if p.size == 0:
            p = p.reshape(0, 3)
        if p.ndim != 2 or p.shape[1] != 3:
            raise ValueError(f"points must be (N, 3), got {p.shape}")
        if not np.isfinite(p).all():
            raise ValueError("point coordinates must be finite")
        object.__setattr__(self, "points", p)

    @property
    def count(self) -> int:
        return len(self.points)


def _resolve_format(path, fmt, allowed, kind):
    if fmt is None:
        fmt = Path(path).suffix.lstrip(".").lower()
    fmt = str(fmt).lower()
    if fmt == "ply-ascii":
        fmt = "ply"
    if fmt not in allowed:
        raise ParseError(f"unsupported {kind} format {fmt!r} (expected one of {allowed})", path)
    return fmt


def _read_lines(path):
    try:
        with open(path, "r", encoding="utf-8", errors="strict") as fh:
            return fh.read().splitlines()
    except UnicodeDecodeError as exc:
        raise ParseError(f"not an ascii/utf-8 text file ({exc.reason})", path) from exc


def _meaningful(lines):
    """Yield (line_number, stripped_line), skipping blanks and # comments."""
    for i, raw in enumerate(lines, start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        yield i, s


def _parse_floats(tokens, n, path, lineno, what):
    if len(tokens) < n:
        raise ParseError(f"expected {n} numbers for {what}, got {len(tokens)}", path, lineno)
    out = []
    for t in tokens[:n]:
        try:
            v = float(t)
        except ValueError:
            raise ParseError(f"invalid number {t!r} in {what}", path, lineno) from None
        if not np.isfinite(v):
            raise ParseError(f"non-finite coordinate {t!r} in {what}", path, lineno)
        out.append(v)
    return out


def _fan_triangulate(idx, path, lineno):
    """Split a polygon index list into triangles fanned from the first vertex."""
    if len(idx) < 3:
        raise ParseError(f"face needs at least 3 vertices, got {len(idx)}", path, lineno)
    tris = []
    for a, b in zip(idx[1:-1], idx[2:]):
        tri = (idx[0], a, b)
        if len(set(tri)) != 3:
            raise ParseError("face repeats a vertex index", path, lineno)
        tris.append(tri)
    return tris


def load_mesh(path, format: str | None = None) -> TriangleMesh:
    """Parse an OBJ or OFF triangle mesh.

    Polygon faces are fan-triangulated from their first vertex. Raises
    ParseError / FaceIndexError / EmptyMeshError on malformed input.
    """
    fmt = _resolve_format(path, format, _MESH_FORMATS, "mesh")
    lines = _read_lines(path)
    if fmt == "obj":
        return _load_obj(lines, path)
    return _load_off(lines, path)


def _load_obj(lines, path) -> TriangleMesh:
    verts: list[list[float]] = []
    faces: list[tuple[int, int, int]] = []
    face_lines: list[int] = []
    for lineno, s in _meaningful(lines):
        tokens = s.split()
        key = tokens[0]
        if key == "v":
            verts.append(_parse_floats(tokens[1:], 3, path, lineno, "vertex"))
        elif key == "f":
            idx = []
            for t in tokens[1:]:
                head = t.split("/")[0]
                try:
                    i = int(head)
                except ValueError:
                    raise ParseError(f"invalid face index {t!r}", path, lineno) from None
                if i < 1:
                    raise ParseError(f"face index must be positive (1-based), got {i}", path, lineno)
                idx.append(i - 1)
            tris = _fan_triangulate(idx, path, lineno)
            faces.extend(tris)
            face_lines.extend([lineno] * len(tris))
        elif key in _OBJ_PASSTHROUGH:
            continue
        else:
            raise ParseError(f"unrecognized OBJ keyword {key!r}", path, lineno)
    if not faces:
        raise EmptyMeshError(f"{path}: mesh has no faces")
    fa = np.asarray(faces, dtype=np.int64)
    bad = np.nonzero(fa.max(axis=1) >= len(verts))[0]
    if bad.size:
        b = int(bad[0])
        raise FaceIndexError(
            f"face index {int(fa[b].max()) + 1} exceeds vertex count {len(verts)}",
            path,
            face_lines[b],
        )
    return TriangleMesh(np.asarray(verts, dtype=np.float64), fa)


def _load_off(lines, path) -> TriangleMesh:
    it = _meaningful(lines)
    try:
        lineno, header = next(it)
    except StopIteration:
        raise ParseError("empty OFF file", path) from None
    tokens = header.split()
    if tokens[0] != "OFF":
        raise ParseError(f"expected OFF header, got {tokens[0]!r}", path, lineno)
    if len(tokens) == 4:
        counts, counts_line = tokens[1:], lineno
    else:
        if len(tokens) != 1:
            raise ParseError("malformed OFF header", path, lineno)
        try:
            counts_line, s = next(it)
        except StopIteration:
            raise ParseError("missing OFF count line", path) from None
        counts = s.split()
    if len(counts) != 3:
        raise ParseError("OFF count line must hold 3 integers", path, counts_line)
    try:
        nv, nf, _ne = (int(c) for c in counts)
    except ValueError:
        raise ParseError("OFF counts must be integers", path, counts_line) from None
    if nv < 0 or nf < 0:
        raise ParseError("OFF counts must be non-negative", path, counts_line)

    verts = []
    for k in range(nv):
        try:
            lineno, s = next(it)
        except StopIteration:
            raise ParseError(
                f"OFF declares {nv} vertices but file provides only {k}", path
            ) from None
        verts.append(_parse_floats(s.split(), 3, path, lineno, "vertex"))

    faces: list[tuple[int, int, int]] = []
    for k in range(nf):
        try:
            lineno, s = next(it)
        except StopIteration:
            raise ParseError(f"OFF declares {nf} faces but file provides only {k}", path) from None
        tokens = s.split()
        try:
            cnt = int(tokens[0])
        except ValueError:
            raise ParseError(f"invalid face vertex count {tokens[0]!r}", path, lineno) from None
        if cnt < 3 or len(tokens) < 1 + cnt:
            raise ParseError(f"face declares {cnt} vertices, line holds {len(tokens) - 1}", path, lineno)
        idx = []
        for t in tokens[1 : 1 + cnt]:
            try:
                i = int(t)
            except ValueError:
                raise ParseError(f"invalid face index {t!r}", path, lineno) from None
            if i < 0 or i >= nv:
                raise FaceIndexError(f"face index {i} out of range [0, {nv})", path, lineno)
            idx.append(i)
        faces.extend(_fan_triangulate(idx, path, lineno))
    if not faces:
        raise EmptyMeshError(f"{path}: mesh has no faces")
    return TriangleMesh(np.asarray(verts, dtype=np.float64), np.asarray(faces, dtype=np.int64))


def save_mesh(mesh: TriangleMesh, path, format: str | None = None) -> None:
    """Write a mesh as OBJ or OFF (ascii)."""
    fmt = _resolve_format(path, format, _MESH_FORMATS, "mesh")
    out = []
    if fmt == "obj":
        for v in mesh.vertices:
            out.append(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
        for f in mesh.faces:
            out.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    else:
        out.append("OFF")
        out.append(f"{mesh.n_vertices} {mesh.n_faces} 0")
        for v in mesh.vertices:
            out.append(f"{_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
        for f in mesh.faces:
            out.append(f"3 {f[0]} {f[1]} {f[2]}")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def load_point_cloud(path, format: str | None = None) -> PointCloud:
    """Parse an XYZ, ascii-PLY, or CSV (``x,y,z`` header) point cloud.

    Empty clouds are valid here; consumers that need points reject them.
    """
    fmt = _resolve_format(path, format, _CLOUD_FORMATS, "point cloud")
    lines = _read_lines(path)
    if fmt == "xyz":
        pts = [
            _parse_floats(_strict_triple(s, path, lineno), 3, path, lineno, "point")
            for lineno, s in _meaningful(lines)
        ]
    elif fmt == "csv":
        pts = _load_csv_points(lines, path)
    else:
        pts = _load_ply_points(lines, path)
    arr = np.asarray(pts, dtype=np.float64).reshape(len(pts), 3)
    return PointCloud(arr)


def _strict_triple(s, path, lineno):
    tokens = s.split()
    if len(tokens) != 3:
        raise ParseError(f"XYZ line must hold exactly 3 numbers, got {len(tokens)}", path, lineno)
    return tokens


def _load_csv_points(lines, path):
    it = _meaningful(lines)
    try:
        lineno, header = next(it)
    except StopIteration:
        raise ParseError("missing CSV header", path) from None
    cols = [c.strip() for c in header.split(",")]
    if cols != ["x", "y", "z"]:
        raise ParseError(f"CSV header must be exactly 'x,y,z', got {header!r}", path, lineno)
    pts = []
    for lineno, s in it:
        fields = [c.strip() for c in s.split(",")]
        if len(fields) != 3:
            raise ParseError(f"CSV row must hold 3 fields, got {len(fields)}", path, lineno)
        pts.append(_parse_floats(fields, 3, path, lineno, "point"))
    return pts


def _load_ply_points(lines, path):
    it = _meaningful(lines)
    try:
        lineno, magic = next(it)
    except StopIteration:
        raise ParseError("empty PLY file", path) from None
    if magic != "ply":
        raise ParseError("missing 'ply' magic line", path, lineno)

    elements: list[tuple[str, int, list[str]]] = []  # (name, count, property names)
    fmt_seen = False
    for lineno, s in it:
        tokens = s.split()
        key = tokens[0]
        if key == "comment":
            continue
        if key == "format":
            if tokens[1:2] != ["ascii"]:
                raise ParseError("only ascii PLY is supported", path, lineno)
            fmt_seen = True
        elif key == "element":
            if len(tokens) != 3:
                raise ParseError("malformed element declaration", path, lineno)
            try:
                cnt = int(tokens[2])
            except ValueError:
                raise ParseError(f"invalid element count {tokens[2]!r}", path, lineno) from None
            elements.append((tokens[1], cnt, []))
        elif key == "property":
            if not elements:
                raise ParseError("property before any element", path, lineno)
            if tokens[1] == "list":
                elements[-1][2].append(None)  # positional parse impossible
            else:
                elements[-1][2].append(tokens[-1])
        elif key == "end_header":
            break
        else:
            raise ParseError(f"unrecognized PLY header keyword {key!r}", path, lineno)
    else:
        raise ParseError("missing end_header", path)
    if not fmt_seen:
        raise ParseError("missing PLY format line", path)

    vertex = next((e for e in elements if e[0] == "vertex"), None)
    if vertex is None:
        raise ParseError("PLY file has no vertex element", path)
    props = vertex[2]
    try:
        xi, yi, zi = props.index("x"), props.index("y"), props.index("z")
    except ValueError:
        raise ParseError("vertex element must have x, y, z properties", path) from None
    if None in props:
        raise ParseError("list properties on the vertex element are unsupported", path)

    pts = []
    for name, cnt, nprops in elements:
        for k in range(cnt):
            try:
                lineno, s = next(it)
            except StopIteration:
                raise ParseError(
                    f"element {name!r} declares {cnt} rows but file provides only {k}", path
                ) from None
            if name != "vertex":
                continue
            tokens = s.split()
            if len(tokens) < len(nprops):
                raise ParseError(
                    f"vertex row holds {len(tokens)} values, header declares {len(nprops)}",
                    path,
                    lineno,
                )
            vals = _parse_floats([tokens[xi], tokens[yi], tokens[zi]], 3, path, lineno, "vertex")
            pts.append(vals)
    return pts


def save_point_cloud(cloud: PointCloud, path, format: str | None = None) -> None:
    """Write a point cloud; load(save(c)) reproduces coordinates exactly."""
    fmt = _resolve_format(path, format, _CLOUD_FORMATS, "point cloud")
    out = []
    if fmt == "xyz":
        for p in cloud.points:
            out.append(f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
    elif fmt == "csv":
        out.append("x,y,z")
        for p in cloud.points:
            out.append(f"{_fmt(p[0])},{_fmt(p[1])},{_fmt(p[2])}")
    else:
        out.extend(
            [
                "ply",
                "format ascii 1.0",
                f"element vertex {cloud.count}",
                "property double x",
                "property double y",
                "property double z",
                "end_header",
            ]
        )
        for p in cloud.points:
            out.append(f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
