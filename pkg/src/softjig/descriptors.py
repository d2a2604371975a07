"""Assembly descriptor files: JSON serialization of an assembled product.

A descriptor lists each part's mesh file, mass, and rigid pose that places
the mesh in assembled-frame coordinates, plus optional contact tolerance
and sweep settings::

    {
      "parts": [
        {"id": "motor", "mesh_path": "motor.stl", "mass_g": 300.0,
         "pose": {"rotation": [[..3x3..]], "translation_mm": [0, 0, 0]},
         "group": null}
      ],
      "contact_epsilon_mm": null,
      "sweep": {"max_distance_mm": null, "step_count": 64}
    }

Mesh paths are resolved relative to the descriptor's directory.
"""

from __future__ import annotations

import json
from pathlib import Path

from .mesh import MeshError, load_mesh
from .parts import AssemblyModel, PartError, PartModel, RigidOrientation
from .relations import RelationError, SweepParams


class DescriptorError(ValueError):
    """Malformed assembly descriptor."""


def load_descriptor(path) -> tuple[AssemblyModel, SweepParams]:
    """Parse a descriptor and load its meshes into an assembly."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DescriptorError(f"descriptor not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DescriptorError(f"{path}: descriptor must be a JSON object")

    raw_parts = data.get("parts")
    if not isinstance(raw_parts, list) or not raw_parts:
        raise DescriptorError(f"{path}: descriptor needs a non-empty 'parts' list")

    parts = []
    for i, entry in enumerate(raw_parts):
        if not isinstance(entry, dict):
            raise DescriptorError(f"{path}: parts[{i}] must be an object")
        try:
            part_id = str(entry["id"])
            mesh_path = (path.parent / str(entry["mesh_path"])).resolve()
            mass = float(entry["mass_g"])
        except KeyError as exc:
            raise DescriptorError(f"{path}: parts[{i}] missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            raise DescriptorError(f"{path}: parts[{i}]: {exc}") from exc
        try:
            mesh = load_mesh(mesh_path)
        except (MeshError, FileNotFoundError) as exc:
            raise DescriptorError(f"{path}: parts[{i}] ({part_id}): {exc}") from exc
        pose = entry.get("pose")
        if pose is not None:
            try:
                rotation = RigidOrientation(pose["rotation"])
                translation = [float(v) for v in pose["translation_mm"]]
            except (KeyError, TypeError, ValueError) as exc:
                raise DescriptorError(f"{path}: parts[{i}]: bad pose: {exc}") from exc
            if len(translation) != 3:
                raise DescriptorError(f"{path}: parts[{i}]: translation must have 3 entries")
            mesh = mesh.transformed(rotation.rotation, translation)
        group = entry.get("group")
        try:
            parts.append(PartModel(part_id, mesh, mass, group=None if group is None else str(group)))
        except (PartError, MeshError) as exc:
            raise DescriptorError(f"{path}: parts[{i}] ({part_id}): {exc}") from exc

    epsilon = data.get("contact_epsilon_mm")
    sweep_cfg = data.get("sweep") or {}
    try:
        assembly = AssemblyModel(tuple(parts),
                                 contact_epsilon=None if epsilon is None else float(epsilon))
        params = SweepParams(
            max_distance=sweep_cfg.get("max_distance_mm"),
            step_count=int(sweep_cfg.get("step_count", SweepParams.step_count)),
        )
    except (PartError, RelationError) as exc:
        raise DescriptorError(f"{path}: {exc}") from exc
    return assembly, params


def proxy_descriptor_dict(mesh_files: dict[str, str],
                          groups: dict[str, str] | None = None,
                          masses: dict[str, float] | None = None) -> dict:
    """Descriptor content for a set of already-assembled mesh files."""
    groups = groups or {}
    masses = masses or {}
    return {
        "parts": [
            {
                "id": part_id,
                "mesh_path": rel_path,
                "mass_g": masses.get(part_id, 1.0),
                "pose": {
                    "rotation": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                    "translation_mm": [0.0, 0.0, 0.0],
                },
                **({"group": groups[part_id]} if part_id in groups else {}),
            }
            for part_id, rel_path in mesh_files.items()
        ],
    }
