"""Indexed triangle meshes: file IO, welding, orientation, and spatial indexing.

All coordinates are millimetres. Meshes are immutable after construction and
every query on them is pure, so shared instances are safe to use from multiple
threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

WELD_TOLERANCE_MM = 1e-6

_BVH_LEAF_SIZE = 8


class MeshError(Exception):
    """Base class for mesh construction and parsing failures."""


class MeshParseError(MeshError):
    """The file could not be parsed in the declared format."""


class DegenerateMeshError(MeshError):
    """Too few vertices/triangles, bad indices, or non-finite coordinates."""


@dataclass(frozen=True, eq=False)
class Bvh:
    """Flat axis-aligned bounding-box tree over triangle indices.

    Nodes are stored in arrays; leaves reference a contiguous slice of
    ``order``, a permutation of triangle indices. Built deterministically by
    median split along the widest centroid axis.
    """

    lo: np.ndarray          # (n_nodes, 3) box minima
    hi: np.ndarray          # (n_nodes, 3) box maxima
    left: np.ndarray        # (n_nodes,) child index or -1 for leaves
    right: np.ndarray       # (n_nodes,)
    start: np.ndarray       # (n_nodes,) leaf slice start into order
    count: np.ndarray       # (n_nodes,) leaf slice length (0 for inner nodes)
    order: np.ndarray       # (n_triangles,) permutation of triangle indices


def _build_bvh(tri_lo: np.ndarray, tri_hi: np.ndarray) -> Bvh:
    n = len(tri_lo)
    centers = 0.5 * (tri_lo + tri_hi)
    order = np.arange(n)

    lo_list: list[np.ndarray] = []
    hi_list: list[np.ndarray] = []
    left_list: list[int] = []
    right_list: list[int] = []
    start_list: list[int] = []
    count_list: list[int] = []

    def build(start: int, count: int) -> int:
        idx = order[start:start + count]
        node = len(lo_list)
        lo_list.append(tri_lo[idx].min(axis=0))
        hi_list.append(tri_hi[idx].max(axis=0))
        left_list.append(-1)
        right_list.append(-1)
        start_list.append(start)
        count_list.append(count)
        if count > _BVH_LEAF_SIZE:
            c = centers[idx]
            axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
            key = np.argsort(c[:, axis], kind="stable")
            order[start:start + count] = idx[key]
            half = count // 2
            left_list[node] = build(start, half)
            right_list[node] = build(start + half, count - half)
            count_list[node] = 0
        return node

    build(0, n)
    bvh = Bvh(
        lo=np.asarray(lo_list),
        hi=np.asarray(hi_list),
        left=np.asarray(left_list, dtype=np.int64),
        right=np.asarray(right_list, dtype=np.int64),
        start=np.asarray(start_list, dtype=np.int64),
        count=np.asarray(count_list, dtype=np.int64),
        order=order,
    )
    for arr in (bvh.lo, bvh.hi, bvh.left, bvh.right, bvh.start, bvh.count, bvh.order):
        arr.setflags(write=False)
    return bvh


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Indexed triangle mesh with precomputed bounds and BVH.

    ``vertices`` is (n, 3) float64 mm, ``triangles`` is (m, 3) int64 indices.
    Construction validates shape, index range, and finiteness; it does not
    weld or reorient (see :func:`weld_vertices` and
    :func:`orient_outward`).
    """

    vertices: np.ndarray
    triangles: np.ndarray
    bvh: Bvh = field(init=False, repr=False)

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        t = np.ascontiguousarray(np.asarray(self.triangles, dtype=np.int64))
        if v.ndim != 2 or v.shape[1] != 3:
            raise DegenerateMeshError(f"vertices must be (n, 3), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise DegenerateMeshError(f"triangles must be (m, 3), got {t.shape}")
        if not np.isfinite(v).all():
            raise DegenerateMeshError("non-finite vertex coordinates")
        if len(v) < 4 or len(t) < 4:
            raise DegenerateMeshError(
                f"degenerate mesh: {len(v)} vertices, {len(t)} triangles (need >= 4 of each)"
            )
        if t.min() < 0 or t.max() >= len(v):
            raise DegenerateMeshError("triangle index out of range")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        corners = v[t]
        object.__setattr__(self, "_corners", corners)
        object.__setattr__(self, "_tri_lo", corners.min(axis=1))
        object.__setattr__(self, "_tri_hi", corners.max(axis=1))
        object.__setattr__(self, "bvh", _build_bvh(self._tri_lo, self._tri_hi))

    def __repr__(self) -> str:
        return f"TriangleMesh({len(self.vertices)} vertices, {len(self.triangles)} triangles)"

    # -- geometry ----------------------------------------------------------

    @property
    def corners(self) -> np.ndarray:
        """(m, 3, 3) triangle corner coordinates."""
        return self._corners

    @property
    def triangle_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self._tri_lo, self._tri_hi

    @property
    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        return self.bvh.lo[0], self.bvh.hi[0]

    @property
    def aabb_diagonal(self) -> float:
        lo, hi = self.aabb
        return float(np.linalg.norm(hi - lo))

    def signed_volume(self) -> float:
        """Signed enclosed volume by the divergence theorem (mm^3).

        Positive when triangle winding is outward.
        """
        a, b, c = self._corners[:, 0], self._corners[:, 1], self._corners[:, 2]
        return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)

    def volume_centroid(self) -> np.ndarray:
        """Centroid of the enclosed volume, assuming uniform density."""
        a, b, c = self._corners[:, 0], self._corners[:, 1], self._corners[:, 2]
        tet_vol = np.einsum("ij,ij->i", a, np.cross(b, c)) / 6.0
        total = tet_vol.sum()
        if total <= 0.0:
            raise DegenerateMeshError(
                f"mesh encloses non-positive volume ({total:.6g} mm^3); not watertight?"
            )
        tet_centroid = (a + b + c) / 4.0
        return (tet_vol[:, None] * tet_centroid).sum(axis=0) / total

    def translated(self, offset) -> "TriangleMesh":
        return TriangleMesh(self.vertices + np.asarray(offset, dtype=np.float64), self.triangles)

    def rotated(self, rotation: np.ndarray) -> "TriangleMesh":
        r = np.asarray(rotation, dtype=np.float64)
        return TriangleMesh(self.vertices @ r.T, self.triangles)

    def transformed(self, rotation: np.ndarray, translation) -> "TriangleMesh":
        r = np.asarray(rotation, dtype=np.float64)
        t = np.asarray(translation, dtype=np.float64)
        return TriangleMesh(self.vertices @ r.T + t, self.triangles)


def weld_vertices(vertices: np.ndarray, triangles: np.ndarray,
                  tolerance: float = WELD_TOLERANCE_MM) -> tuple[np.ndarray, np.ndarray]:
    """Merge vertices that coincide within ``tolerance`` (grid snap)."""
    v = np.asarray(vertices, dtype=np.float64)
    t = np.asarray(triangles, dtype=np.int64)
    keys = np.round(v / tolerance).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    return v[first], inverse[t]


def orient_outward(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Flip every triangle when the mesh's signed volume is negative.

    File normals are ignored on purpose: the divergence-theorem sign is the
    only orientation evidence that survives sloppy exporters.
    """
    v = np.asarray(vertices, dtype=np.float64)
    t = np.asarray(triangles, dtype=np.int64)
    corners = v[t]
    a, b, c = corners[:, 0], corners[:, 1], corners[:, 2]
    volume = np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0
    if volume < 0.0:
        t = t[:, ::-1]
    return t


def _finish_mesh(vertices: np.ndarray, triangles: np.ndarray) -> TriangleMesh:
    if len(triangles) < 4:
        raise DegenerateMeshError(
            f"degenerate mesh: {len(triangles)} triangles (need >= 4)"
        )
    if not np.isfinite(vertices).all():
        raise DegenerateMeshError("non-finite vertex coordinates")
    v, t = weld_vertices(vertices, triangles)
    t = orient_outward(v, t)
    return TriangleMesh(v, t)


# -- STL -------------------------------------------------------------------

def _parse_stl_ascii(text: str) -> tuple[np.ndarray, np.ndarray]:
    coords: list[float] = []
    for line in text.splitlines():
        parts = line.split()
        if parts[:1] == ["vertex"]:
            if len(parts) != 4:
                raise MeshParseError(f"bad vertex record: {line.strip()!r}")
            try:
                coords.extend(float(p) for p in parts[1:])
            except ValueError as exc:
                raise MeshParseError(f"bad vertex record: {line.strip()!r}") from exc
    if not coords or len(coords) % 9 != 0:
        raise MeshParseError("ASCII STL does not contain whole facets")
    vertices = np.asarray(coords, dtype=np.float64).reshape(-1, 3)
    triangles = np.arange(len(vertices), dtype=np.int64).reshape(-1, 3)
    return vertices, triangles


def _parse_stl_binary(data: bytes) -> tuple[np.ndarray, np.ndarray]:
    if len(data) < 84:
        raise MeshParseError("binary STL shorter than its 84-byte preamble")
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) != expected:
        raise MeshParseError(
            f"binary STL length {len(data)} does not match {count} triangles ({expected})"
        )
    if count == 0:
        raise DegenerateMeshError("binary STL declares 0 triangles")
    record = np.dtype([
        ("normal", "<f4", (3,)),
        ("verts", "<f4", (3, 3)),
        ("attr", "<u2"),
    ])
    body = np.frombuffer(data, dtype=record, count=count, offset=84)
    vertices = body["verts"].astype(np.float64).reshape(-1, 3)
    triangles = np.arange(len(vertices), dtype=np.int64).reshape(-1, 3)
    return vertices, triangles


def _sniff_format(path: Path) -> str:
    if path.suffix.lower() == ".obj":
        return "obj"
    with open(path, "rb") as f:
        head = f.read(512)
    if head.lstrip()[:5] == b"solid":
        # could still be binary with a chatty header; check length consistency
        size = path.stat().st_size
        if size >= 84:
            (count,) = struct.unpack_from("<I", head, 80) if len(head) >= 84 else (0,)
            if size == 84 + 50 * count and count > 0:
                return "stl-binary"
        return "stl-ascii"
    return "stl-binary"


def load_mesh(path, fmt: str = "auto") -> TriangleMesh:
    """Load a triangle mesh from STL (binary or ASCII) or OBJ.

    Duplicate vertices within 1e-6 mm are merged and the winding is
    normalized outward from the signed-volume sign. ``fmt`` is one of
    ``stl-binary``, ``stl-ascii``, ``obj``, or ``auto``.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    if fmt == "auto":
        fmt = _sniff_format(path)
    if fmt == "stl-ascii":
        try:
            text = path.read_text(encoding="utf-8", errors="strict")
        except UnicodeDecodeError as exc:
            raise MeshParseError(f"{path}: not valid ASCII STL") from exc
        vertices, triangles = _parse_stl_ascii(text)
    elif fmt == "stl-binary":
        vertices, triangles = _parse_stl_binary(path.read_bytes())
    elif fmt == "obj":
        vertices, triangles = _parse_obj(path.read_text(encoding="utf-8"))
    else:
        raise ValueError(f"unknown mesh format {fmt!r}")
    return _finish_mesh(vertices, triangles)


def save_stl_binary(mesh: TriangleMesh, path) -> None:
    """Write a little-endian binary STL (80-byte header, 50-byte facets).

    Output bytes are a pure function of the mesh, so repeated writes are
    identical.
    """
    corners = mesh.corners.astype(np.float32)
    e1 = corners[:, 1] - corners[:, 0]
    e2 = corners[:, 2] - corners[:, 0]
    normals = np.cross(e1, e2)
    lengths = np.linalg.norm(normals, axis=1)
    safe = lengths > 0
    normals[safe] /= lengths[safe, None]
    normals[~safe] = 0.0
    record = np.zeros(len(corners), dtype=np.dtype([
        ("normal", "<f4", (3,)),
        ("verts", "<f4", (3, 3)),
        ("attr", "<u2"),
    ]))
    record["normal"] = normals
    record["verts"] = corners
    header = b"softjig mesh" + b" " * 68
    with open(path, "wb") as f:
        f.write(header)
        f.write(struct.pack("<I", len(corners)))
        f.write(record.tobytes())


def save_stl_ascii(mesh: TriangleMesh, path) -> None:
    lines = ["solid softjig"]
    corners = mesh.corners
    e1 = corners[:, 1] - corners[:, 0]
    e2 = corners[:, 2] - corners[:, 0]
    normals = np.cross(e1, e2)
    lengths = np.linalg.norm(normals, axis=1)
    safe = lengths > 0
    normals[safe] /= lengths[safe, None]
    normals[~safe] = 0.0
    for tri, n in zip(corners, normals):
        lines.append(f"  facet normal {n[0]:.9g} {n[1]:.9g} {n[2]:.9g}")
        lines.append("    outer loop")
        for v in tri:
            lines.append(f"      vertex {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}")
        lines.append("    endloop")
        lines.append("  endfacet")
    lines.append("endsolid softjig")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- OBJ -------------------------------------------------------------------

def _parse_obj(text: str) -> tuple[np.ndarray, np.ndarray]:
    vertices: list[list[float]] = []
    faces: list[list[int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] not in ("v", "f"):
            continue  # only v/f records are honoured
        if parts[0] == "v":
            if len(parts) < 4:
                raise MeshParseError(f"line {lineno}: short vertex record")
            try:
                vertices.append([float(p) for p in parts[1:4]])
            except ValueError as exc:
                raise MeshParseError(f"line {lineno}: bad vertex record") from exc
        else:
            try:
                idx = [int(p.split("/")[0]) for p in parts[1:]]
            except ValueError as exc:
                raise MeshParseError(f"line {lineno}: bad face record") from exc
            if len(idx) < 3:
                raise MeshParseError(f"line {lineno}: face with fewer than 3 vertices")
            resolved = [i - 1 if i > 0 else len(vertices) + i for i in idx]
            for k in range(1, len(resolved) - 1):  # fan-triangulate polygons
                faces.append([resolved[0], resolved[k], resolved[k + 1]])
    if not vertices or not faces:
        raise MeshParseError("OBJ contains no v/f records")
    v = np.asarray(vertices, dtype=np.float64)
    t = np.asarray(faces, dtype=np.int64)
    if t.min() < 0 or t.max() >= len(v):
        raise MeshParseError("OBJ face index out of range")
    return v, t


def save_obj(mesh: TriangleMesh, path) -> None:
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}")
    for t in mesh.triangles:
        lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
