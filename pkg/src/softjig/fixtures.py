"""Deterministic analytic fixture meshes and assemblies.

These stand in for a real assembled CAD product: a heavy motor with bottom
pins and an upward shaft, a thin plate that drops over the shaft, and two
bolts that pass through the plate and seat on the motor's top face. Mating
faces touch exactly (integer coordinate planes) while every non-mating
clearance is >= 0.37 mm, so contact and interference queries are
unambiguous.
"""

from __future__ import annotations

import numpy as np

from .mesh import TriangleMesh
from .parts import AssemblyModel, PartModel

MOTOR_MASS_G = 300.0
PLATE_MASS_G = 60.0
BOLT_MASS_G = 4.0
PEG_MASS_G = 20.0
BASE_MASS_G = 80.0
CUBE_MASS_G = 1.0

MOTOR_RADIUS = 15.0
MOTOR_HEIGHT = 40.0
SHAFT_RADIUS = 3.0
SHAFT_TOP = 55.0
PIN_RADIUS = 1.5
PIN_DEPTH = 3.0
PIN_ORBIT = 10.0

PLATE_HALF_X = 32.0
PLATE_HALF_Y = 18.0
PLATE_BOTTOM = MOTOR_HEIGHT          # rests on the motor's top face
PLATE_TOP = PLATE_BOTTOM + 4.0
SHAFT_HOLE_HALF = 4.0                # 1.0 mm radial clearance to the shaft
BOLT_HOLE_HALF = 2.5                 # 0.5 mm clearance to the bolt shank
BOLT_OFFSET_X = 9.0                  # over the motor's top annulus

BOLT_SHANK_RADIUS = 2.0
BOLT_HEAD_RADIUS = 4.0
BOLT_HEAD_TOP = PLATE_TOP + 3.0

BASE_HALF = 10.0
BASE_HEIGHT = 10.0
POCKET_HALF = 4.0
POCKET_FLOOR = 4.0
PEG_HALF = 3.5                       # 0.5 mm clearance in the pocket
PEG_TOP = 12.0                       # sticks 2 mm out of the pocket

# analytic axis-aligned bounds per fixture kind, for IO round-trip checks
FIXTURE_AABBS: dict[str, tuple[tuple[float, float, float], tuple[float, float, float]]] = {
    "motor": ((-MOTOR_RADIUS, -MOTOR_RADIUS, -PIN_DEPTH), (MOTOR_RADIUS, MOTOR_RADIUS, SHAFT_TOP)),
    "plate": ((-PLATE_HALF_X, -PLATE_HALF_Y, PLATE_BOTTOM), (PLATE_HALF_X, PLATE_HALF_Y, PLATE_TOP)),
    "bolt-pair": ((-BOLT_OFFSET_X - BOLT_HEAD_RADIUS, -BOLT_HEAD_RADIUS, PLATE_BOTTOM),
                  (BOLT_OFFSET_X + BOLT_HEAD_RADIUS, BOLT_HEAD_RADIUS, BOLT_HEAD_TOP)),
    "peg": ((-PEG_HALF, -PEG_HALF, POCKET_FLOOR), (PEG_HALF, PEG_HALF, PEG_TOP)),
    "blind-hole-base": ((-BASE_HALF, -BASE_HALF, 0.0), (BASE_HALF, BASE_HALF, BASE_HEIGHT)),
    "cube": ((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5)),
}

FIXTURE_KINDS = tuple(FIXTURE_AABBS)


def box_mesh(lo, hi) -> TriangleMesh:
    """Axis-aligned box with outward-wound triangles."""
    x0, y0, z0 = lo
    x1, y1, z1 = hi
    v = np.array([
        [x0, y0, z0], [x1, y0, z0], [x1, y1, z0], [x0, y1, z0],
        [x0, y0, z1], [x1, y0, z1], [x1, y1, z1], [x0, y1, z1],
    ])
    t = np.array([
        [0, 2, 1], [0, 3, 2],  # bottom
        [4, 5, 6], [4, 6, 7],  # top
        [0, 1, 5], [0, 5, 4],  # y = y0
        [1, 2, 6], [1, 6, 5],  # x = x1
        [2, 3, 7], [2, 7, 6],  # y = y1
        [3, 0, 4], [3, 4, 7],  # x = x0
    ])
    return TriangleMesh(v, t)


def revolve_mesh(profile, segments: int) -> TriangleMesh:
    """Closed surface of revolution about the z axis.

    ``profile`` is a polyline of (radius, z) points with radius 0 at both
    ends; interior points have radius > 0. Winding is outward for a profile
    traversed from the bottom pole upward.
    """
    profile = [(float(r), float(z)) for r, z in profile]
    if profile[0][0] != 0.0 or profile[-1][0] != 0.0:
        raise ValueError("profile must start and end on the axis (radius 0)")
    if any(r <= 0 for r, _ in profile[1:-1]):
        raise ValueError("interior profile points must have radius > 0")
    angles = 2.0 * np.pi * np.arange(segments) / segments
    cos, sin = np.cos(angles), np.sin(angles)

    rings = profile[1:-1]
    verts = [np.array([[0.0, 0.0, profile[0][1]]])]
    for r, z in rings:
        verts.append(np.column_stack([r * cos, r * sin, np.full(segments, z)]))
    verts.append(np.array([[0.0, 0.0, profile[-1][1]]]))
    vertices = np.vstack(verts)
    top = len(vertices) - 1

    def ring(i: int, j: int) -> int:
        return 1 + i * segments + (j % segments)

    tris = []
    for j in range(segments):
        tris.append([0, ring(0, j + 1), ring(0, j)])
    for i in range(len(rings) - 1):
        for j in range(segments):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j + 1), ring(i + 1, j)
            tris.append([a, b, c])
            tris.append([a, c, d])
    for j in range(segments):
        tris.append([top, ring(len(rings) - 1, j), ring(len(rings) - 1, j + 1)])
    return TriangleMesh(vertices, np.array(tris))


def compound_mesh(*meshes: TriangleMesh) -> TriangleMesh:
    """Concatenate closed components into one mesh (no welding)."""
    offsets = np.cumsum([0] + [len(m.vertices) for m in meshes[:-1]])
    vertices = np.vstack([m.vertices for m in meshes])
    triangles = np.vstack([m.triangles + off for m, off in zip(meshes, offsets)])
    return TriangleMesh(vertices, triangles)


def motor_mesh() -> TriangleMesh:
    body = revolve_mesh([
        (0.0, 0.0),
        (MOTOR_RADIUS, 0.0),
        (MOTOR_RADIUS, MOTOR_HEIGHT),
        (SHAFT_RADIUS, MOTOR_HEIGHT),
        (SHAFT_RADIUS, SHAFT_TOP),
        (0.0, SHAFT_TOP),
    ], segments=24)
    pins = []
    for angle in (45.0, 135.0, 225.0, 315.0):
        rad = np.deg2rad(angle)
        cx, cy = PIN_ORBIT * np.cos(rad), PIN_ORBIT * np.sin(rad)
        pin = revolve_mesh([
            (0.0, -PIN_DEPTH),
            (PIN_RADIUS, -PIN_DEPTH),
            (PIN_RADIUS, 0.0),
            (0.0, 0.0),
        ], segments=12)
        pins.append(pin.translated((cx, cy, 0.0)))
    return compound_mesh(body, *pins)


def plate_mesh() -> TriangleMesh:
    """Thin slab with three square through-holes, decomposed into boxes.

    Central hole clears the motor shaft; the outer pair clears the bolt
    shanks but not the bolt heads.
    """
    z0, z1 = PLATE_BOTTOM, PLATE_TOP
    hx, hy = PLATE_HALF_X, PLATE_HALF_Y
    c = SHAFT_HOLE_HALF
    b = BOLT_HOLE_HALF
    ox = BOLT_OFFSET_X
    spans = [
        # full-depth slabs left/right of everything
        ((-hx, -hy), (-ox - b, hy)),
        ((ox + b, -hy), (hx, hy)),
        # columns between the holes
        ((-ox + b, -hy), (-c, hy)),
        ((c, -hy), (ox - b, hy)),
        # strips above/below each hole
        ((-ox - b, b), (-ox + b, hy)),
        ((-ox - b, -hy), (-ox + b, -b)),
        ((-c, c), (c, hy)),
        ((-c, -hy), (c, -c)),
        ((ox - b, b), (ox + b, hy)),
        ((ox - b, -hy), (ox + b, -b)),
    ]
    boxes = [box_mesh((x0, y0, z0), (x1, y1, z1)) for (x0, y0), (x1, y1) in spans]
    return compound_mesh(*boxes)


def bolt_mesh(center_x: float) -> TriangleMesh:
    bolt = revolve_mesh([
        (0.0, PLATE_BOTTOM),                  # tip seats on the motor's top face
        (BOLT_SHANK_RADIUS, PLATE_BOTTOM),
        (BOLT_SHANK_RADIUS, PLATE_TOP),
        (BOLT_HEAD_RADIUS, PLATE_TOP),        # head rests on the plate's top face
        (BOLT_HEAD_RADIUS, BOLT_HEAD_TOP),
        (0.0, BOLT_HEAD_TOP),
    ], segments=16)
    return bolt.translated((center_x, 0.0, 0.0))


def blind_hole_base_mesh() -> TriangleMesh:
    """Block with a square pocket opening upward, as five boxes."""
    s, h = BASE_HALF, BASE_HEIGHT
    p, f = POCKET_HALF, POCKET_FLOOR
    return compound_mesh(
        box_mesh((-s, -s, 0.0), (s, s, f)),
        box_mesh((-s, -s, f), (-p, s, h)),
        box_mesh((p, -s, f), (s, s, h)),
        box_mesh((-p, -s, f), (p, -p, h)),
        box_mesh((-p, p, f), (p, s, h)),
    )


def peg_mesh() -> TriangleMesh:
    return box_mesh((-PEG_HALF, -PEG_HALF, POCKET_FLOOR), (PEG_HALF, PEG_HALF, PEG_TOP))


def cube_mesh() -> TriangleMesh:
    return box_mesh((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5))


def generate_proxy_fixture(kind: str) -> PartModel:
    """Build one deterministic proxy part in its assembled pose."""
    if kind == "motor":
        return PartModel("motor", motor_mesh(), MOTOR_MASS_G)
    if kind == "plate":
        return PartModel("plate", plate_mesh(), PLATE_MASS_G)
    if kind == "bolt-pair":
        mesh = compound_mesh(bolt_mesh(-BOLT_OFFSET_X), bolt_mesh(BOLT_OFFSET_X))
        return PartModel("bolts", mesh, 2 * BOLT_MASS_G)
    if kind == "peg":
        return PartModel("peg", peg_mesh(), PEG_MASS_G)
    if kind == "blind-hole-base":
        return PartModel("base", blind_hole_base_mesh(), BASE_MASS_G)
    if kind == "cube":
        return PartModel("cube", cube_mesh(), CUBE_MASS_G)
    raise ValueError(f"unknown fixture kind {kind!r}; expected one of {FIXTURE_KINDS}")


def proxy_assembly(split_bolts: bool = True) -> AssemblyModel:
    """The assembled proxy product.

    With ``split_bolts`` the two bolts are separate parts sharing the
    ``bolts`` group (as the shipped descriptor models them); otherwise they
    form a single two-component part.
    """
    parts = [
        generate_proxy_fixture("motor"),
        generate_proxy_fixture("plate"),
    ]
    if split_bolts:
        parts.append(PartModel("bolt_a", bolt_mesh(-BOLT_OFFSET_X), BOLT_MASS_G, group="bolts"))
        parts.append(PartModel("bolt_b", bolt_mesh(BOLT_OFFSET_X), BOLT_MASS_G, group="bolts"))
    else:
        parts.append(generate_proxy_fixture("bolt-pair"))
    return AssemblyModel(tuple(parts))


def peg_assembly() -> AssemblyModel:
    return AssemblyModel((
        generate_proxy_fixture("blind-hole-base"),
        generate_proxy_fixture("peg"),
    ))


def cube_stack_assembly(seed: int, levels: int = 4) -> AssemblyModel:
    """Randomized tower of boxes, each resting exactly on the one below.

    Sizes, lateral offsets, and masses come from a seeded generator;
    consecutive boxes always overlap in x/y so every vertical neighbour pair
    is in face contact.
    """
    rng = np.random.default_rng(seed)
    parts = []
    z = 0.0
    cx = cy = 0.0
    prev_half = None
    for i in range(levels):
        half = float(rng.uniform(3.0, 8.0))
        height = float(rng.uniform(4.0, 10.0))
        if prev_half is not None:
            limit = 0.6 * (prev_half + half)
            cx += float(rng.uniform(-limit, limit))
            cy += float(rng.uniform(-limit, limit))
        mesh = box_mesh((cx - half, cy - half, z), (cx + half, cy + half, z + height))
        parts.append(PartModel(f"box{i}", mesh, float(rng.uniform(1.0, 100.0))))
        z += height
        prev_half = half
    return AssemblyModel(tuple(parts))
