"""Sequential parts-fixing configuration.

Walks a given assembly order. At each step it computes the
reachable-direction list between the subassembly built so far and the next
entity, halts with a diagnostic if no direction is reachable, otherwise
merges the entity in, picks the posture whose vertical placement gives the
combined model the lowest center of gravity, and records the bottom part as
the one to fix on the jig.

A posture label names the mating axis; the physical orientation is the one
of its two verticalizations (axis up or axis down) with the lower CoG
height. Even a single reachable flag therefore still resolves to a definite
world orientation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .parts import AssemblyModel, PartModel, RigidOrientation, mass_properties
from .relations import (
    Direction,
    ReachableDirectionList,
    RelationMatrices,
    SweepParams,
    compute_relation_matrices,
    merge_entity,
)

BOTTOM_TIE_TOL_MM = 1e-6


class PlannerError(ValueError):
    """Invalid sequence or assembly input to the planner."""


@dataclass(frozen=True)
class AssemblySequence:
    """Ordered entity references (part ids or group names), length >= 2."""

    steps: tuple[str, ...]

    def __post_init__(self) -> None:
        steps = tuple(self.steps)
        if len(steps) < 2:
            raise PlannerError("assembly sequence needs at least 2 entities")
        if len(set(steps)) != len(steps):
            raise PlannerError("assembly sequence repeats an entity")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def parse(cls, text: str) -> "AssemblySequence":
        return cls(tuple(s.strip() for s in text.split(",") if s.strip()))


@dataclass(frozen=True)
class FixingStep:
    """One planned step: which part to fix, in which posture."""

    step_index: int                      # 1-based
    fixed_part: str
    posture_label: Direction
    orientation: RigidOrientation
    cog_height: float                    # mm above the model's lowest point
    reachable_list: ReachableDirectionList

    def __post_init__(self) -> None:
        if not self.reachable_list[self.posture_label]:
            raise PlannerError(
                f"step {self.step_index}: posture {self.posture_label.value} is not reachable"
            )
        if self.cog_height < 0:
            raise PlannerError(f"step {self.step_index}: negative CoG height")


@dataclass(frozen=True)
class FixingPlan:
    """Planner output: one step per assembly operation, or a partial plan
    plus a halt diagnostic when some pair has no reachable direction."""

    steps: tuple[FixingStep, ...]
    complete: bool
    halt_reason: str | None = None

    def __post_init__(self) -> None:
        if self.complete != (self.halt_reason is None):
            raise PlannerError("halt_reason must be present exactly when incomplete")

    def to_json_dict(self) -> dict:
        return {
            "steps": [
                {
                    "index": s.step_index,
                    "fixed_part": s.fixed_part,
                    "posture_label": s.posture_label.value,
                    "rotation": s.orientation.rotation.tolist(),
                    "cog_height_mm": s.cog_height,
                    "reachable_flags": [int(f) for f in s.reachable_list.flags],
                }
                for s in self.steps
            ],
            "complete": self.complete,
            "halt_reason": self.halt_reason,
        }


_ROT_X_180 = np.array([[1, 0, 0], [0, -1, 0], [0, 0, -1]], dtype=np.float64)
_ROT_Y_P90 = np.array([[0, 0, 1], [0, 1, 0], [-1, 0, 0]], dtype=np.float64)   # +x -> -z
_ROT_Y_M90 = np.array([[0, 0, -1], [0, 1, 0], [1, 0, 0]], dtype=np.float64)   # +x -> +z
_ROT_X_P90 = np.array([[1, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=np.float64)   # +y -> +z
_ROT_X_M90 = np.array([[1, 0, 0], [0, 0, 1], [0, -1, 0]], dtype=np.float64)   # +y -> -z

_VERTICALIZATIONS: dict[Direction, tuple[np.ndarray, np.ndarray]] = {
    # (axis up, axis down): the two rotations placing the direction vertical
    Direction.PLUS_X: (_ROT_Y_M90, _ROT_Y_P90),
    Direction.MINUS_X: (_ROT_Y_P90, _ROT_Y_M90),
    Direction.PLUS_Y: (_ROT_X_P90, _ROT_X_M90),
    Direction.MINUS_Y: (_ROT_X_M90, _ROT_X_P90),
    Direction.PLUS_Z: (np.eye(3), _ROT_X_180),
    Direction.MINUS_Z: (_ROT_X_180, np.eye(3)),
}


def candidate_orientations(direction: Direction) -> list[RigidOrientation]:
    """The two rotations aligning a direction's axis with the world z-axis,
    mapping it to +z first, then to -z."""
    up, down = _VERTICALIZATIONS[direction]
    return [RigidOrientation(up.copy()), RigidOrientation(down.copy())]


def cog_height(parts: list[PartModel], orientation: RigidOrientation) -> float:
    """Height of the combined CoG above the model's lowest vertex, oriented."""
    _, cog = mass_properties(parts)
    world_cog_z = float(orientation.apply(cog)[2])
    lowest = min(float(orientation.apply(p.mesh.vertices)[:, 2].min()) for p in parts)
    return world_cog_z - lowest


def select_posture(reachable: ReachableDirectionList,
                   parts: list[PartModel]) -> tuple[Direction, RigidOrientation]:
    """Pick the (direction, orientation) minimizing the combined CoG height.

    Candidates are both verticalizations of every reachable direction; ties
    fall to the fixed direction order and then to the axis-up orientation.
    """
    if not reachable.any_set:
        raise PlannerError("no reachable direction to select a posture from")
    best: tuple[Direction, RigidOrientation] | None = None
    best_height = np.inf
    for direction in reachable.set_directions:
        for orientation in candidate_orientations(direction):
            height = cog_height(parts, orientation)
            if height < best_height:
                best_height = height
                best = (direction, orientation)
    assert best is not None
    return best


def bottom_part(parts: list[PartModel], orientation: RigidOrientation) -> str:
    """Id of the part whose oriented mesh reaches lowest.

    Ties within 1e-6 mm go to the heavier part, then the smaller id.
    """
    if not parts:
        raise PlannerError("bottom_part needs a non-empty model")
    lows = [(float(orientation.apply(p.mesh.vertices)[:, 2].min()), p) for p in parts]
    z_min = min(z for z, _ in lows)
    tied = [p for z, p in lows if z - z_min <= BOTTOM_TIE_TOL_MM]
    tied.sort(key=lambda p: (-p.mass, p.id))
    return tied[0].id


def _resolve_entities(assembly: AssemblyModel, sequence: AssemblySequence) -> list[str]:
    groups = {p.group for p in assembly.parts if p.group is not None}
    grouped_parts = {p.id for p in assembly.parts if p.group is not None}
    entities = []
    for ref in sequence.steps:
        if ref in groups:
            entities.append(ref)
        elif ref in grouped_parts:
            raise PlannerError(
                f"entity {ref!r} belongs to a group and cannot be sequenced alone"
            )
        elif ref in assembly.part_ids:
            entities.append(ref)
        else:
            raise PlannerError(f"unknown sequence entity {ref!r}")
    return entities


def _collapse_groups(assembly: AssemblyModel, matrices: RelationMatrices) -> RelationMatrices:
    seen: list[str] = []
    for p in assembly.parts:
        if p.group is not None and p.group not in seen:
            seen.append(p.group)
    for group in seen:
        matrices = merge_entity(matrices, set(assembly.group_members(group)), group)
    return matrices


def _merge_id(existing: tuple[str, ...], left: str, right: str) -> str:
    candidate = f"{left}+{right}"
    while candidate in existing:
        candidate += "~"
    return candidate


def configure_fixing_parts(assembly: AssemblyModel, sequence: AssemblySequence,
                           params: SweepParams | None = None) -> FixingPlan:
    """Run the fixing-configuration walk over an assembly order.

    Returns a complete plan of ``len(sequence) - 1`` steps, or a partial
    plan with ``halt_reason`` naming the first pair that cannot be mated
    along any axis direction.
    """
    entities = _resolve_entities(assembly, sequence)
    matrices = _collapse_groups(assembly, compute_relation_matrices(assembly, params))

    members: dict[str, list[PartModel]] = {}
    for p in assembly.parts:
        members.setdefault(p.group or p.id, []).append(p)

    target = entities[0]
    model_parts = list(members[target])
    steps: list[FixingStep] = []

    for i, entity in enumerate(entities[1:], start=2):
        reachable = matrices.reachable_list(target, entity)
        if not reachable.any_set:
            return FixingPlan(
                steps=tuple(steps),
                complete=False,
                halt_reason=(
                    f"no reachable direction between {target!r} and {entity!r} "
                    f"at step {i - 1}"
                ),
            )
        model_parts = model_parts + members[entity]
        combined_id = _merge_id(matrices.entity_ids, target, entity)
        matrices = merge_entity(matrices, {target, entity}, combined_id)
        target = combined_id

        label, orientation = select_posture(reachable, model_parts)
        steps.append(FixingStep(
            step_index=i - 1,
            fixed_part=bottom_part(model_parts, orientation),
            posture_label=label,
            orientation=orientation,
            cog_height=cog_height(model_parts, orientation),
            reachable_list=reachable,
        ))

    return FixingPlan(steps=tuple(steps), complete=True, halt_reason=None)
