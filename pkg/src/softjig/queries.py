"""Distance, intersection, and containment queries between triangle meshes.

Conventions that everything downstream relies on:

* Surface contact is not an intersection. ``intersects`` reports true only
  for positive penetration (a transversal surface crossing) or containment,
  so parts resting or sliding on each other stay legal.
* ``min_distance`` is exactly symmetric in its arguments and the BVH
  accelerated path returns the same float as the all-pairs scan.

All tolerances are absolute millimetres.
"""

from __future__ import annotations

import heapq

import numpy as np

from .mesh import TriangleMesh

TOUCH_TOLERANCE_MM = 1e-9

# winding fraction above this counts as strictly inside a closed mesh
# (inside = 1, outside = 0, on-surface = 0.5)
_INSIDE_WINDING = 0.75

_CHUNK_ROWS = 1 << 18


# -- low-level kernels -------------------------------------------------------

def point_triangle_distance_sq(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Row-wise squared distance from ``points[i]`` to triangle ``triangles[i]``.

    Vectorized form of the closest-point-on-triangle region walk from
    Ericson's Real-Time Collision Detection.
    """
    p = np.asarray(points, dtype=np.float64)
    tri = np.asarray(triangles, dtype=np.float64)
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]

    ab = b - a
    ac = c - a
    ap = p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)

    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    closest = np.empty_like(p)
    done = np.zeros(len(p), dtype=bool)

    def settle(mask: np.ndarray, value: np.ndarray) -> None:
        use = mask & ~done
        closest[use] = value[use] if value.shape == closest.shape else value
        done[use] = True

    settle((d1 <= 0) & (d2 <= 0), a)
    settle((d3 >= 0) & (d4 <= d3), b)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom_ab = d1 - d3
        v = np.where(denom_ab != 0, d1 / np.where(denom_ab != 0, denom_ab, 1.0), 0.0)
        settle((vc <= 0) & (d1 >= 0) & (d3 <= 0), a + v[:, None] * ab)
    settle((d6 >= 0) & (d5 <= d6), c)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom_ac = d2 - d6
        w = np.where(denom_ac != 0, d2 / np.where(denom_ac != 0, denom_ac, 1.0), 0.0)
        settle((vb <= 0) & (d2 >= 0) & (d6 <= 0), a + w[:, None] * ac)
        num_bc = d4 - d3
        den_bc = (d4 - d3) + (d5 - d6)
        w2 = np.where(den_bc != 0, num_bc / np.where(den_bc != 0, den_bc, 1.0), 0.0)
        settle((va <= 0) & (num_bc >= 0) & (d5 - d6 >= 0), b + w2[:, None] * (c - b))
        total = va + vb + vc
        safe = np.where(total != 0, total, 1.0)
        vi = vb / safe
        wi = vc / safe
        interior = a + vi[:, None] * ab + wi[:, None] * ac
        interior[total == 0] = a[total == 0]  # degenerate sliver fallback
    settle(np.ones(len(p), dtype=bool), interior)

    diff = p - closest
    best = np.einsum("ij,ij->i", diff, diff)
    # zero-area triangles can mislead the region walk; vertex distances are
    # a free upper bound and leave non-degenerate results untouched
    for v in (a, b, c):
        dv = p - v
        best = np.minimum(best, np.einsum("ij,ij->i", dv, dv))
    return best


def _segment_segment_distance_sq(p1, q1, p2, q2) -> np.ndarray:
    """Row-wise squared distance between segments (p1,q1) and (p2,q2).

    Not symmetric in floating point; callers wanting exact symmetry take the
    min over both argument orders.
    """
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)

    with np.errstate(divide="ignore", invalid="ignore"):
        denom = a * e - b * b
        s = np.where(denom != 0, (b * f - c * e) / np.where(denom != 0, denom, 1.0), 0.0)
        s = np.clip(s, 0.0, 1.0)
        t = np.where(e != 0, (b * s + f) / np.where(e != 0, e, 1.0), 0.0)

        s_low = np.where(a != 0, -c / np.where(a != 0, a, 1.0), 0.0)
        s_high = np.where(a != 0, (b - c) / np.where(a != 0, a, 1.0), 0.0)
    s = np.where(t < 0, np.clip(s_low, 0.0, 1.0), s)
    s = np.where(t > 1, np.clip(s_high, 0.0, 1.0), s)
    t = np.clip(t, 0.0, 1.0)

    c1 = p1 + s[:, None] * d1
    c2 = p2 + t[:, None] * d2
    diff = c2 - c1
    return np.einsum("ij,ij->i", diff, diff)


_EDGES = ((0, 1), (1, 2), (2, 0))


def triangle_pair_distance_sq(tri_a: np.ndarray, tri_b: np.ndarray) -> np.ndarray:
    """Row-wise squared distance between triangle pairs.

    Exactly symmetric: the candidate set (6 vertex-face and 18 edge-edge
    evaluations) is identical for both argument orders, so the float minimum
    is too. For properly crossing pairs the value is a positive
    overestimate; callers combine with :func:`proper_crossings`.
    """
    a = np.asarray(tri_a, dtype=np.float64)
    b = np.asarray(tri_b, dtype=np.float64)
    best = np.full(len(a), np.inf)
    for i in range(3):
        best = np.minimum(best, point_triangle_distance_sq(a[:, i], b))
        best = np.minimum(best, point_triangle_distance_sq(b[:, i], a))
    for i0, i1 in _EDGES:
        for j0, j1 in _EDGES:
            pa, qa = a[:, i0], a[:, i1]
            pb, qb = b[:, j0], b[:, j1]
            best = np.minimum(best, _segment_segment_distance_sq(pa, qa, pb, qb))
            best = np.minimum(best, _segment_segment_distance_sq(pb, qb, pa, qa))
    return best


def _interval_on_line(signed: np.ndarray, proj: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Interval each triangle cuts on the plane-intersection line.

    ``signed`` (n, 3): vertex distances to the other plane in mm;
    ``proj`` (n, 3): vertex projections onto the line. Candidates are
    vertices on the plane plus edge crossings with strictly opposite signs.
    """
    n = len(signed)
    lo = np.full(n, np.inf)
    hi = np.full(n, -np.inf)
    on_plane = np.abs(signed) <= tol
    for i in range(3):
        x = proj[:, i]
        lo = np.where(on_plane[:, i], np.minimum(lo, x), lo)
        hi = np.where(on_plane[:, i], np.maximum(hi, x), hi)
    for i, j in _EDGES:
        si, sj = signed[:, i], signed[:, j]
        crossing = ((si > tol) & (sj < -tol)) | ((si < -tol) & (sj > tol))
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = si / np.where(crossing, si - sj, 1.0)
            x = proj[:, i] + (proj[:, j] - proj[:, i]) * frac
        lo = np.where(crossing, np.minimum(lo, x), lo)
        hi = np.where(crossing, np.maximum(hi, x), hi)
    return lo, hi


def proper_crossings(tri_a: np.ndarray, tri_b: np.ndarray,
                     tol: float = TOUCH_TOLERANCE_MM) -> np.ndarray:
    """Row-wise transversal-crossing test for triangle pairs.

    True only when both triangles straddle each other's plane strictly
    beyond ``tol`` and the intersection segments overlap by more than
    ``tol`` mm. Coplanar overlap, edge touches, and vertex touches are all
    false: those are contacts, not penetrations.
    """
    a = np.asarray(tri_a, dtype=np.float64)
    b = np.asarray(tri_b, dtype=np.float64)

    na = np.cross(a[:, 1] - a[:, 0], a[:, 2] - a[:, 0])
    nb = np.cross(b[:, 1] - b[:, 0], b[:, 2] - b[:, 0])
    len_a = np.linalg.norm(na, axis=1)
    len_b = np.linalg.norm(nb, axis=1)
    valid = (len_a > 0) & (len_b > 0)
    div_a = np.where(len_a > 0, len_a, 1.0)
    div_b = np.where(len_b > 0, len_b, 1.0)

    # vertex distances to the opposite plane, in mm
    sa = np.einsum("ikj,ij->ik", a - b[:, 0][:, None, :], nb) / div_b[:, None]
    sb = np.einsum("ikj,ij->ik", b - a[:, 0][:, None, :], na) / div_a[:, None]

    straddle_a = (sa.min(axis=1) < -tol) & (sa.max(axis=1) > tol)
    straddle_b = (sb.min(axis=1) < -tol) & (sb.max(axis=1) > tol)
    mask = valid & straddle_a & straddle_b
    if not mask.any():
        return mask

    d = np.cross(na, nb)
    len_d = np.linalg.norm(d, axis=1)
    ok = len_d > 0
    d_hat = d / np.where(ok, len_d, 1.0)[:, None]
    mask &= ok

    pa = np.einsum("ikj,ij->ik", a, d_hat)
    pb = np.einsum("ikj,ij->ik", b, d_hat)
    lo_a, hi_a = _interval_on_line(sa, pa, tol)
    lo_b, hi_b = _interval_on_line(sb, pb, tol)
    overlap = np.minimum(hi_a, hi_b) - np.maximum(lo_a, lo_b)
    return mask & (overlap > tol)


def winding_fraction(points: np.ndarray, corners: np.ndarray) -> np.ndarray:
    """Generalized winding number of each point w.r.t. a closed surface.

    1 inside, 0 outside, 0.5 on the surface; robust for the multi-component
    watertight solids used here. ``corners`` is (t, 3, 3).
    """
    pts = np.asarray(points, dtype=np.float64)
    tris = np.asarray(corners, dtype=np.float64)
    if len(pts) == 0:
        return np.zeros(0)
    out = np.zeros(len(pts))
    tri_chunk = max(1, _CHUNK_ROWS // max(len(pts), 1))
    for start in range(0, len(tris), tri_chunk):
        t = tris[start:start + tri_chunk]
        a = t[None, :, 0, :] - pts[:, None, :]
        b = t[None, :, 1, :] - pts[:, None, :]
        c = t[None, :, 2, :] - pts[:, None, :]
        la = np.linalg.norm(a, axis=2)
        lb = np.linalg.norm(b, axis=2)
        lc = np.linalg.norm(c, axis=2)
        det = np.einsum("ptj,ptj->pt", a, np.cross(b, c))
        denom = (la * lb * lc
                 + np.einsum("ptj,ptj->pt", a, b) * lc
                 + np.einsum("ptj,ptj->pt", b, c) * la
                 + np.einsum("ptj,ptj->pt", c, a) * lb)
        out += np.arctan2(det, denom).sum(axis=1)
    return out / (2.0 * np.pi)


# -- containment probes ------------------------------------------------------

def interior_probe_point(mesh: TriangleMesh) -> np.ndarray:
    """A point just inside the solid: largest face's centroid nudged inward."""
    corners = mesh.corners
    e1 = corners[:, 1] - corners[:, 0]
    e2 = corners[:, 2] - corners[:, 0]
    normals = np.cross(e1, e2)
    areas2 = np.linalg.norm(normals, axis=1)
    idx = int(np.argmax(areas2))
    normal = normals[idx] / areas2[idx]
    centroid = corners[idx].mean(axis=0)
    depth = 1e-3 * mesh.aabb_diagonal
    return centroid - depth * normal


def surface_probe_points(mesh: TriangleMesh) -> np.ndarray:
    """Containment probes: every face centroid pulled slightly inside the
    solid, plus one deep interior point.

    The inward pull keeps probes of a surface that merely rests on another
    mesh strictly outside it (on-surface winding numbers are degenerate),
    while probes of a penetrating surface stay inside the other solid.
    """
    corners = mesh.corners
    normals = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
    lengths = np.linalg.norm(normals, axis=1)
    ok = lengths > 0
    depth = 1e-6 * mesh.aabb_diagonal
    probes = corners.mean(axis=1)[ok] - depth * normals[ok] / lengths[ok, None]
    return np.vstack([probes, interior_probe_point(mesh)[None, :]])


def _probes_strictly_inside(probes: np.ndarray, target: TriangleMesh) -> bool:
    lo, hi = target.aabb
    keep = np.all((probes > lo) & (probes < hi), axis=1)
    if not keep.any():
        return False
    w = winding_fraction(probes[keep], target.corners)
    return bool((w > _INSIDE_WINDING).any())


def _containment(mesh_a: TriangleMesh, mesh_b: TriangleMesh) -> bool:
    """True when either surface dips strictly inside the other solid.

    Surface probes also catch penetrations whose boundaries meet only along
    tangent planes, where no transversal triangle crossing exists.
    """
    if _probes_strictly_inside(surface_probe_points(mesh_a), mesh_b):
        return True
    return _probes_strictly_inside(surface_probe_points(mesh_b), mesh_a)


# -- broad phase -------------------------------------------------------------

def _boxes_overlap(lo_a, hi_a, lo_b, hi_b) -> bool:
    return bool(np.all(lo_a <= hi_b) and np.all(lo_b <= hi_a))


def candidate_triangle_pairs(mesh_a: TriangleMesh, mesh_b: TriangleMesh) -> tuple[np.ndarray, np.ndarray]:
    """Triangle index pairs whose boxes overlap, from a BVH-BVH walk."""
    ta, tb = mesh_a.bvh, mesh_b.bvh
    out_a: list[np.ndarray] = []
    out_b: list[np.ndarray] = []
    stack = [(0, 0)]
    while stack:
        ia, ib = stack.pop()
        if not _boxes_overlap(ta.lo[ia], ta.hi[ia], tb.lo[ib], tb.hi[ib]):
            continue
        leaf_a = ta.left[ia] < 0
        leaf_b = tb.left[ib] < 0
        if leaf_a and leaf_b:
            idx_a = ta.order[ta.start[ia]:ta.start[ia] + ta.count[ia]]
            idx_b = tb.order[tb.start[ib]:tb.start[ib] + tb.count[ib]]
            ga, gb = np.meshgrid(idx_a, idx_b, indexing="ij")
            out_a.append(ga.ravel())
            out_b.append(gb.ravel())
        elif leaf_a or (not leaf_b and _node_extent(tb, ib) > _node_extent(ta, ia)):
            stack.append((ia, int(tb.left[ib])))
            stack.append((ia, int(tb.right[ib])))
        else:
            stack.append((int(ta.left[ia]), ib))
            stack.append((int(ta.right[ia]), ib))
    if not out_a:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    pa = np.concatenate(out_a)
    pb = np.concatenate(out_b)
    lo_a, hi_a = mesh_a.triangle_bounds
    lo_b, hi_b = mesh_b.triangle_bounds
    tight = np.all(lo_a[pa] <= hi_b[pb], axis=1) & np.all(lo_b[pb] <= hi_a[pa], axis=1)
    return pa[tight], pb[tight]


def _node_extent(tree, i) -> float:
    return float((tree.hi[i] - tree.lo[i]).max())


# -- public queries ----------------------------------------------------------

def intersects(mesh_a: TriangleMesh, mesh_b: TriangleMesh) -> bool:
    """True iff the solids overlap with positive penetration.

    Either some triangle pair crosses transversally, or one mesh's surface
    or interior probe lies strictly inside the other (containment). Pure
    surface touching returns False.
    """
    lo_a, hi_a = mesh_a.aabb
    lo_b, hi_b = mesh_b.aabb
    if not _boxes_overlap(lo_a, hi_a, lo_b, hi_b):
        return False
    pa, pb = candidate_triangle_pairs(mesh_a, mesh_b)
    ca = mesh_a.corners
    cb = mesh_b.corners
    for start in range(0, len(pa), _CHUNK_ROWS):
        sl = slice(start, start + _CHUNK_ROWS)
        if proper_crossings(ca[pa[sl]], cb[pb[sl]]).any():
            return True
    return _containment(mesh_a, mesh_b)


def min_distance_brute_force(mesh_a: TriangleMesh, mesh_b: TriangleMesh) -> float:
    """All-pairs reference for :func:`min_distance` (same kernels, no BVH)."""
    na, nb = len(mesh_a.triangles), len(mesh_b.triangles)
    ia, ib = np.meshgrid(np.arange(na), np.arange(nb), indexing="ij")
    best = np.inf
    ca, cb = mesh_a.corners, mesh_b.corners
    fa, fb = ia.ravel(), ib.ravel()
    for start in range(0, len(fa), _CHUNK_ROWS):
        sl = slice(start, start + _CHUNK_ROWS)
        d = triangle_pair_distance_sq(ca[fa[sl]], cb[fb[sl]])
        best = min(best, float(d.min()))
    return _finalize_distance(best, mesh_a, mesh_b)


def min_distance(mesh_a: TriangleMesh, mesh_b: TriangleMesh) -> float:
    """Minimum distance between the surfaces; 0 when touching or overlapping.

    Best-first BVH pair traversal with a conservatively deflated box bound,
    so the result is identical to the all-pairs scan. Exactly symmetric in
    its arguments.
    """
    ta, tb = mesh_a.bvh, mesh_b.bvh
    ca, cb = mesh_a.corners, mesh_b.corners

    def bound_sq(ia: int, ib: int) -> float:
        gap = np.maximum(0.0, np.maximum(ta.lo[ia] - tb.hi[ib], tb.lo[ib] - ta.hi[ia]))
        return float(gap @ gap)

    best = np.inf
    counter = 0
    heap = [(bound_sq(0, 0), 0, 0, 0)]
    while heap:
        bnd, _, ia, ib = heapq.heappop(heap)
        if bnd * (1.0 - 1e-9) > best:
            break
        leaf_a = ta.left[ia] < 0
        leaf_b = tb.left[ib] < 0
        if leaf_a and leaf_b:
            idx_a = ta.order[ta.start[ia]:ta.start[ia] + ta.count[ia]]
            idx_b = tb.order[tb.start[ib]:tb.start[ib] + tb.count[ib]]
            ga, gb = np.meshgrid(idx_a, idx_b, indexing="ij")
            d = triangle_pair_distance_sq(ca[ga.ravel()], cb[gb.ravel()])
            best = min(best, float(d.min()))
            if best == 0.0:
                break
        else:
            if leaf_a or (not leaf_b and _node_extent(tb, ib) > _node_extent(ta, ia)):
                children = ((ia, int(tb.left[ib])), (ia, int(tb.right[ib])))
            else:
                children = ((int(ta.left[ia]), ib), (int(ta.right[ia]), ib))
            for ja, jb in children:
                counter += 1
                heapq.heappush(heap, (bound_sq(ja, jb), counter, ja, jb))
    return _finalize_distance(best, mesh_a, mesh_b)


def _finalize_distance(best_sq: float, mesh_a: TriangleMesh, mesh_b: TriangleMesh) -> float:
    if best_sq == 0.0:
        return 0.0
    if intersects(mesh_a, mesh_b):
        # interpenetrating solids have distance 0 even when no triangle
        # pair comes close (e.g. one mesh nested inside the other)
        return 0.0
    return float(np.sqrt(best_sq))
