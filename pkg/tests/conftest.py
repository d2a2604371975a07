import numpy as np
import pytest

from softjig import (
    AssemblyModel,
    PartModel,
    cube_stack_assembly,
    peg_assembly,
    proxy_assembly,
)
from softjig.fixtures import box_mesh, compound_mesh
from softjig.queries import intersects
from softjig.relations import sweep_sample_distances


@pytest.fixture(scope="session")
def proxy():
    return proxy_assembly()


@pytest.fixture(scope="session")
def peg():
    return peg_assembly()


@pytest.fixture(scope="session")
def cube_stacks():
    return [cube_stack_assembly(seed) for seed in range(5)]


def tunnel_assembly() -> AssemblyModel:
    """Two-part fixture whose slider can leave only along +x: a capped
    square tunnel with a bar resting on its floor."""
    shell = compound_mesh(
        box_mesh((-20, -8, 0), (20, 8, 4)),      # floor
        box_mesh((-20, -8, 10), (20, 8, 14)),    # roof
        box_mesh((-20, -8, 4), (20, -4, 10)),    # wall -y
        box_mesh((-20, 4, 4), (20, 8, 10)),      # wall +y
        box_mesh((-20, -4, 4), (-16, 4, 10)),    # end cap at -x
    )
    slider = box_mesh((-12, -3, 4), (0, 3, 9))
    return AssemblyModel((
        PartModel("tunnel", shell, 200.0),
        PartModel("slider", slider, 30.0),
    ))


def rotated_assembly(assembly: AssemblyModel, rotation: np.ndarray) -> AssemblyModel:
    parts = tuple(
        PartModel(p.id, p.mesh.rotated(rotation), p.mass, p.group) for p in assembly.parts
    )
    return AssemblyModel(parts, contact_epsilon=assembly.contact_epsilon)


ROT_Z_QUARTER = np.array([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


def naive_sweep_is_free(static_mesh, moving_mesh, direction, max_distance, n_steps) -> bool:
    """Reference sweep: one public intersection query per sample."""
    unit = direction.unit_vector
    for t in sweep_sample_distances(max_distance, n_steps):
        if intersects(static_mesh, moving_mesh.translated(t * unit)):
            return False
    return True
