"""Contact, interference-free, and reachable-direction relations.

For parts i, k of an assembled product:

* ``contact[i, k]`` — the surfaces are within the contact tolerance.
* ``interference_free[j][i, k]`` — part k can translate along axis
  direction j from its assembled pose all the way out of the assembly
  without ever penetrating part i, checked at uniform samples.
* ``reachable[j]`` — elementwise gate of contact with interference
  freedom: ``(C | C^T) & M_j``. A pair's six reachable flags, in the fixed
  order +x, -x, +y, -y, +z, -z, form its reachable-direction list.

Each unordered pair is swept once per direction on the pair's relative
motion (the higher-index part is always the one displaced), which makes the
mirror identity ``M_j(i,k) == M_-j(k,i)`` hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .mesh import TriangleMesh
from .parts import AssemblyModel
from .queries import (
    proper_crossings,
    surface_probe_points,
    winding_fraction,
)

_INSIDE_WINDING = 0.75
_ROW_CHUNK = 1 << 17


class RelationError(ValueError):
    """Invalid relation computation input (dimensions, unknown entities)."""


class Direction(Enum):
    """Axis-aligned direction label, one of the six assembly axes."""

    PLUS_X = "+x"
    MINUS_X = "-x"
    PLUS_Y = "+y"
    MINUS_Y = "-y"
    PLUS_Z = "+z"
    MINUS_Z = "-z"

    @property
    def axis(self) -> int:
        return {"x": 0, "y": 1, "z": 2}[self.value[1]]

    @property
    def sign(self) -> float:
        return 1.0 if self.value[0] == "+" else -1.0

    @property
    def unit_vector(self) -> np.ndarray:
        v = np.zeros(3)
        v[self.axis] = self.sign
        return v

    @property
    def opposite(self) -> "Direction":
        flip = {"+": "-", "-": "+"}
        return Direction(flip[self.value[0]] + self.value[1])

    @classmethod
    def from_vector(cls, vector) -> "Direction":
        """Match an exact axis-aligned unit vector to its label."""
        v = np.asarray(vector, dtype=np.float64)
        for d in DIRECTION_ORDER:
            if np.array_equal(v, d.unit_vector):
                return d
        raise RelationError(f"{v} is not an axis-aligned unit direction")


# fixed order of the six flags in every reachable-direction list
DIRECTION_ORDER: tuple[Direction, ...] = (
    Direction.PLUS_X, Direction.MINUS_X,
    Direction.PLUS_Y, Direction.MINUS_Y,
    Direction.PLUS_Z, Direction.MINUS_Z,
)


@dataclass(frozen=True)
class ReachableDirectionList:
    """Six reachability flags for an ordered pair, in DIRECTION_ORDER."""

    flags: tuple[bool, bool, bool, bool, bool, bool]

    def __post_init__(self) -> None:
        object.__setattr__(self, "flags", tuple(bool(f) for f in self.flags))
        if len(self.flags) != 6:
            raise RelationError(f"expected 6 flags, got {len(self.flags)}")

    def __getitem__(self, direction: Direction) -> bool:
        return self.flags[DIRECTION_ORDER.index(direction)]

    @property
    def any_set(self) -> bool:
        return any(self.flags)

    @property
    def set_directions(self) -> tuple[Direction, ...]:
        return tuple(d for d, f in zip(DIRECTION_ORDER, self.flags) if f)

    @property
    def first_set(self) -> Direction:
        for d, f in zip(DIRECTION_ORDER, self.flags):
            if f:
                return d
        raise RelationError("no direction flag is set")


@dataclass(frozen=True)
class SweepParams:
    """Discretization of the translational sweeps.

    ``max_distance`` defaults to twice the assembly AABB diagonal (beyond
    that an axis translation cannot re-enter the assembly bounds) and may
    not be set lower. The effective step never exceeds half the thinnest
    AABB extent of the swept pair; ``step_count`` is raised as needed.
    ``oracle_mode`` samples 10x finer on an exactly nested grid.
    """

    max_distance: float | None = None
    step_count: int = 64
    oracle_mode: bool = False

    def __post_init__(self) -> None:
        if self.step_count < 16:
            raise RelationError(f"step_count must be >= 16, got {self.step_count}")
        if self.max_distance is not None and not (self.max_distance > 0):
            raise RelationError("max_distance must be positive")

    def resolved_distance(self, assembly: AssemblyModel) -> float:
        floor = 2.0 * assembly.aabb_diagonal
        if self.max_distance is None:
            return floor
        if self.max_distance < floor:
            raise RelationError(
                f"max_distance {self.max_distance} < 2 x assembly diagonal {floor}"
            )
        return float(self.max_distance)

    def steps_for(self, max_distance: float, thinnest_extent: float) -> int:
        n = self.step_count
        if thinnest_extent > 0:
            n = max(n, math.ceil(max_distance / (0.5 * thinnest_extent)))
        if self.oracle_mode:
            n *= 10
        return n


def sweep_sample_distances(max_distance: float, n_steps: int) -> np.ndarray:
    """Sample offsets ``max_distance * (k / n)`` for k = 1..n.

    Computed so that the grid for any integer multiple of ``n_steps`` is an
    exact superset, which keeps refinement monotone.
    """
    k = np.arange(1, n_steps + 1, dtype=np.float64)
    return max_distance * (k / n_steps)


# -- sweep engine ------------------------------------------------------------

def sweep_translation_is_free(static: TriangleMesh, moving: TriangleMesh,
                              direction: Direction, max_distance: float,
                              n_steps: int) -> bool:
    """True iff ``moving`` never penetrates ``static`` at any sampled offset.

    Penetration at one sample means a transversal triangle crossing or a
    surface/interior probe of one mesh strictly inside the other, exactly as
    in :func:`softjig.queries.intersects`. Samples whose swept bounding
    boxes cannot overlap are skipped; that skip is exact, not approximate.
    """
    axis, sign = direction.axis, direction.sign
    s_lo, s_hi = static.aabb
    m_lo, m_hi = moving.aabb
    for ax in range(3):
        if ax != axis and (s_lo[ax] > m_hi[ax] or m_lo[ax] > s_hi[ax]):
            return True
    if sign > 0:
        t_lo, t_hi = s_lo[axis] - m_hi[axis], s_hi[axis] - m_lo[axis]
    else:
        t_lo, t_hi = m_lo[axis] - s_hi[axis], m_hi[axis] - s_lo[axis]

    scale = n_steps / max_distance
    k_lo = max(1, math.ceil(t_lo * scale - 1e-9))
    k_hi = min(n_steps, math.floor(t_hi * scale + 1e-9))
    if k_lo > k_hi:
        return True
    samples = sweep_sample_distances(max_distance, n_steps)[k_lo - 1:k_hi]
    shift = sign * samples

    if _swept_crossing_hits(static, moving, axis, sign, samples, k_lo, scale):
        return False
    return not _swept_containment_hits(static, moving, axis, shift)


def _swept_crossing_hits(static: TriangleMesh, moving: TriangleMesh,
                         axis: int, sign: float, samples: np.ndarray,
                         k_lo: int, scale: float) -> bool:
    st_lo, st_hi = static.triangle_bounds
    mv_lo, mv_hi = moving.triangle_bounds

    lo_shift, hi_shift = sorted((sign * samples[0], sign * samples[-1]))
    ext_lo = mv_lo.copy()
    ext_hi = mv_hi.copy()
    ext_lo[:, axis] += lo_shift
    ext_hi[:, axis] += hi_shift

    overlap = np.ones((len(st_lo), len(mv_lo)), dtype=bool)
    for ax in range(3):
        overlap &= st_lo[:, ax][:, None] <= ext_hi[:, ax][None, :]
        overlap &= ext_lo[:, ax][None, :] <= st_hi[:, ax][:, None]
    si, mi = np.nonzero(overlap)
    if len(si) == 0:
        return False

    if sign > 0:
        pair_lo = st_lo[si, axis] - mv_hi[mi, axis]
        pair_hi = st_hi[si, axis] - mv_lo[mi, axis]
    else:
        pair_lo = mv_lo[mi, axis] - st_hi[si, axis]
        pair_hi = mv_hi[mi, axis] - st_lo[si, axis]
    k0 = np.maximum(k_lo, np.ceil(pair_lo * scale - 1e-9).astype(np.int64))
    k1 = np.minimum(k_lo + len(samples) - 1, np.floor(pair_hi * scale + 1e-9).astype(np.int64))
    counts = np.maximum(0, k1 - k0 + 1)
    keep = counts > 0
    si, mi, k0, counts = si[keep], mi[keep], k0[keep], counts[keep]
    if len(si) == 0:
        return False

    row_pair = np.repeat(np.arange(len(si)), counts)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    k_row = np.arange(counts.sum()) - starts[row_pair] + k0[row_pair]
    t_row = samples[k_row - k_lo]

    unit = np.zeros(3)
    unit[axis] = sign
    sc = static.corners
    mc = moving.corners
    for start in range(0, len(row_pair), _ROW_CHUNK):
        sl = slice(start, start + _ROW_CHUNK)
        rows = row_pair[sl]
        shifted = mc[mi[rows]] + t_row[sl][:, None, None] * unit
        if proper_crossings(sc[si[rows]], shifted).any():
            return True
    return False


def _swept_containment_hits(static: TriangleMesh, moving: TriangleMesh,
                            axis: int, shift: np.ndarray) -> bool:
    # moving-mesh probes against the static solid: probe + shift, and
    # static probes against the displaced moving solid: probe - shift
    unit_shift = np.zeros((len(shift), 3))
    unit_shift[:, axis] = shift
    if _grid_probe_hits(surface_probe_points(moving), unit_shift, static):
        return True
    return _grid_probe_hits(surface_probe_points(static), -unit_shift, moving)


def _grid_probe_hits(probes: np.ndarray, shifts: np.ndarray, target: TriangleMesh) -> bool:
    lo, hi = target.aabb
    # (probe, sample) grid of shifted points strictly inside the target box
    inside = np.ones((len(probes), len(shifts)), dtype=bool)
    for ax in range(3):
        coord = probes[:, ax][:, None] + shifts[:, ax][None, :]
        inside &= (coord > lo[ax]) & (coord < hi[ax])
    pi, ki = np.nonzero(inside)
    if len(pi) == 0:
        return False
    points = probes[pi] + shifts[ki]
    for start in range(0, len(points), _ROW_CHUNK):
        w = winding_fraction(points[start:start + _ROW_CHUNK], target.corners)
        if (w > _INSIDE_WINDING).any():
            return True
    return False


# -- relation matrices -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RelationMatrices:
    """Entity ids with their contact, interference-free, and reachable matrices.

    Diagonals are zero everywhere (self-relations are undefined), contact is
    symmetric, and ``reachable[j] = (contact | contact^T) & interference_free[j]``
    by construction.
    """

    entity_ids: tuple[str, ...]
    contact: np.ndarray
    interference_free: dict[Direction, np.ndarray]
    reachable: dict[Direction, np.ndarray] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        n = len(self.entity_ids)
        contact = np.array(self.contact, dtype=bool)
        if contact.shape != (n, n):
            raise RelationError(f"contact matrix shape {contact.shape} != ({n}, {n})")
        if contact.diagonal().any():
            raise RelationError("contact diagonal must be zero")
        if not np.array_equal(contact, contact.T):
            raise RelationError("contact matrix must be symmetric")
        free = {}
        for d in DIRECTION_ORDER:
            m = np.array(self.interference_free[d], dtype=bool)
            if m.shape != (n, n):
                raise RelationError(f"interference matrix {d.value} has shape {m.shape}")
            np.fill_diagonal(m, False)
            m.setflags(write=False)
            free[d] = m
        reach = self.reachable
        if reach is None:
            reach = {d: compute_reachable_matrix(contact, free[d]) for d in DIRECTION_ORDER}
        else:
            reach = {d: np.array(reach[d], dtype=bool) for d in DIRECTION_ORDER}
        contact.setflags(write=False)
        for d in DIRECTION_ORDER:
            reach[d].setflags(write=False)
        object.__setattr__(self, "entity_ids", tuple(self.entity_ids))
        object.__setattr__(self, "contact", contact)
        object.__setattr__(self, "interference_free", free)
        object.__setattr__(self, "reachable", reach)

    def __repr__(self) -> str:
        return f"RelationMatrices(entities={list(self.entity_ids)})"

    def index_of(self, entity_id: str) -> int:
        try:
            return self.entity_ids.index(entity_id)
        except ValueError:
            raise RelationError(f"unknown entity {entity_id!r}") from None

    def reachable_list(self, source_id: str, target_id: str) -> ReachableDirectionList:
        return reachable_direction_list(self.reachable, self.entity_ids, source_id, target_id)

    def to_json_dict(self) -> dict:
        return {
            "entity_ids": list(self.entity_ids),
            "contact": self.contact.astype(int).tolist(),
            "interference_free": {
                d.value: self.interference_free[d].astype(int).tolist() for d in DIRECTION_ORDER
            },
            "reachable": {
                d.value: self.reachable[d].astype(int).tolist() for d in DIRECTION_ORDER
            },
        }


def compute_contact_matrix(assembly: AssemblyModel) -> np.ndarray:
    """Symmetric boolean contact matrix over the assembly's parts.

    Parts are in contact when their surface distance is within the
    assembly's contact tolerance.
    """
    from .queries import min_distance

    n = len(assembly.parts)
    contact = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for k in range(i + 1, n):
            touching = min_distance(assembly.parts[i].mesh, assembly.parts[k].mesh) \
                <= assembly.contact_epsilon
            contact[i, k] = contact[k, i] = touching
    return contact


def _pair_sweep(assembly: AssemblyModel, params: SweepParams, max_distance: float,
                i: int, k: int, direction: Direction) -> bool:
    """Canonical sweep for the unordered pair: the higher index moves.

    ``interference_free[j][i, k]`` asks whether part k translates freely
    along j past static part i; for i > k this is evaluated as the exact
    relative motion with roles swapped and the direction negated, so the
    mirror identity between (i, k, j) and (k, i, -j) is bit-exact.
    """
    if i > k:
        i, k, direction = k, i, direction.opposite
    static = assembly.parts[i].mesh
    moving = assembly.parts[k].mesh
    thin = min(
        float(np.min(static.aabb[1] - static.aabb[0])),
        float(np.min(moving.aabb[1] - moving.aabb[0])),
    )
    n_steps = params.steps_for(max_distance, thin)
    return sweep_translation_is_free(static, moving, direction, max_distance, n_steps)


def compute_interference_free_matrix(assembly: AssemblyModel, direction: Direction,
                                     params: SweepParams | None = None) -> np.ndarray:
    """Matrix of free translations along one direction: entry (i, k) is true
    when part k sweeps out along ``direction`` without penetrating part i."""
    params = params or SweepParams()
    max_distance = params.resolved_distance(assembly)
    n = len(assembly.parts)
    free = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for k in range(n):
            if i != k:
                free[i, k] = _pair_sweep(assembly, params, max_distance, i, k, direction)
    return free


def compute_all_interference_free(assembly: AssemblyModel,
                                  params: SweepParams | None = None
                                  ) -> dict[Direction, np.ndarray]:
    """All six interference-free matrices from one canonical sweep per
    unordered pair and direction (half the work of six separate calls)."""
    params = params or SweepParams()
    max_distance = params.resolved_distance(assembly)
    n = len(assembly.parts)
    free = {d: np.zeros((n, n), dtype=bool) for d in DIRECTION_ORDER}
    for i in range(n):
        for k in range(i + 1, n):
            for d in DIRECTION_ORDER:
                result = _pair_sweep(assembly, params, max_distance, i, k, d)
                free[d][i, k] = result
                free[d.opposite][k, i] = result
    return free


def compute_reachable_matrix(contact: np.ndarray, interference_free: np.ndarray) -> np.ndarray:
    """Elementwise gate: reachable = (contact OR contact^T) AND interference-free."""
    c = np.asarray(contact, dtype=bool)
    m = np.asarray(interference_free, dtype=bool)
    if c.shape != m.shape or c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise RelationError(f"matrix shapes differ: {c.shape} vs {m.shape}")
    if c.diagonal().any() or m.diagonal().any():
        raise RelationError("diagonals must be zero")
    return (c | c.T) & m


def reachable_direction_list(reachable: dict[Direction, np.ndarray],
                             entity_ids, source_id: str, target_id: str
                             ) -> ReachableDirectionList:
    """The six reachable flags for an ordered entity pair, in fixed order."""
    ids = list(entity_ids)
    if source_id not in ids:
        raise RelationError(f"unknown entity {source_id!r}")
    if target_id not in ids:
        raise RelationError(f"unknown entity {target_id!r}")
    if source_id == target_id:
        raise RelationError(f"self-pair {source_id!r} has no reachable list")
    i, k = ids.index(source_id), ids.index(target_id)
    return ReachableDirectionList(tuple(bool(reachable[d][i, k]) for d in DIRECTION_ORDER))


def compute_relation_matrices(assembly: AssemblyModel,
                              params: SweepParams | None = None) -> RelationMatrices:
    """Contact, interference-free, and reachable matrices over the parts."""
    contact = compute_contact_matrix(assembly)
    free = compute_all_interference_free(assembly, params)
    return RelationMatrices(tuple(assembly.part_ids), contact, free)


def merge_entity(matrices: RelationMatrices, members: set[str] | frozenset[str],
                 new_id: str) -> RelationMatrices:
    """Collapse a set of entities into one combined entity.

    The combined entity contacts a neighbour when any member does (OR) and
    moves freely only when every member does (AND); reachability is then
    recomputed from the gate formula. The combined row/column sits at the
    first member's position.
    """
    members = set(members)
    if not members:
        raise RelationError("members must be non-empty")
    for m in members:
        matrices.index_of(m)
    survivors = set(matrices.entity_ids) - members
    if new_id in survivors:
        raise RelationError(f"new id {new_id!r} collides with an existing entity")

    old_ids = matrices.entity_ids
    member_idx = np.array([i for i, e in enumerate(old_ids) if e in members])
    first = int(member_idx[0])

    new_ids: list[str] = []
    source_rows: list[np.ndarray] = []  # per new entity: old indices it aggregates
    for i, e in enumerate(old_ids):
        if i == first:
            new_ids.append(new_id)
            source_rows.append(member_idx)
        elif e not in members:
            new_ids.append(e)
            source_rows.append(np.array([i]))

    def aggregate(matrix: np.ndarray, combine) -> np.ndarray:
        rows = np.stack([combine(matrix[idx, :], axis=0) for idx in source_rows])
        return np.stack([combine(rows[:, idx], axis=1) for idx in source_rows]).T

    contact = aggregate(matrices.contact, np.any)
    np.fill_diagonal(contact, False)
    free = {}
    for d in DIRECTION_ORDER:
        m = aggregate(matrices.interference_free[d], np.all)
        np.fill_diagonal(m, False)
        free[d] = m
    return RelationMatrices(tuple(new_ids), contact, free)
