"""Built-in complexes and uniformly decorated starting metrics.

The sphere presets (tetrahedron, octahedron, icosahedron) are simplicial
and their gluings are inferred from the vertex labels.  torus_grid(n) is
the n-by-n flat grid torus with squares split along one diagonal, also
simplicial for n >= 3.  one_vertex_torus is the smallest closed example
that needs explicit gluings: two triangles, three loop edges, one marked
point.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParams
from .mesh import DeltaComplex, build_complex, infer_gluings
from .metric import DecoratedMetric, lengths_from_inversive

PRESET_NAMES = (
    "tetrahedron",
    "octahedron",
    "icosahedron",
    "torus_grid",
    "one_vertex_torus",
)

_TETRA_FACES = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]

_OCTA_FACES = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1),
    (5, 2, 1), (5, 3, 2), (5, 4, 3), (5, 1, 4),
]

# Top vertex 0, upper ring 1-5, lower ring 6-10, bottom vertex 11.
_ICOSA_FACES = (
    [(0, ring, ring % 5 + 1) for ring in range(1, 6)]
    + [(ring, ring + 5, ring % 5 + 6) for ring in range(1, 6)]
    + [(ring, ring % 5 + 6, ring % 5 + 1) for ring in range(1, 6)]
    + [(11, ring % 5 + 6, ring + 5) for ring in range(1, 6)]
)


def torus_grid_faces(n: int) -> list[tuple[int, int, int]]:
    faces = []
    for i in range(n):
        for j in range(n):
            v00 = i * n + j
            v10 = ((i + 1) % n) * n + j
            v11 = ((i + 1) % n) * n + (j + 1) % n
            v01 = i * n + (j + 1) % n
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    return faces


def preset_complex(name: str, n: int | None = None) -> DeltaComplex:
    """Build one of the named complexes; ``n`` only applies to torus_grid."""
    if name == "tetrahedron":
        return infer_gluings(4, _TETRA_FACES)
    if name == "octahedron":
        return infer_gluings(6, _OCTA_FACES)
    if name == "icosahedron":
        return infer_gluings(12, _ICOSA_FACES)
    if name == "torus_grid":
        if n is None or n < 3:
            raise InvalidParams(f"torus_grid needs n >= 3, got {n}")
        return infer_gluings(n * n, torus_grid_faces(n))
    if name == "one_vertex_torus":
        tris = [(0, 0, 0), (0, 0, 0)]
        gluings = [((0, k), (1, k)) for k in range(3)]
        return build_complex(1, tris, gluings)
    raise InvalidParams(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")


def preset_metric(
    name: str,
    *,
    radius: float = 1.0,
    inversive: float = 2.0,
    n: int | None = None,
) -> DecoratedMetric:
    """Uniform decoration on a preset complex: every vertex circle the same
    radius, every edge the same inversive distance (> 1 demanded)."""
    if not radius > 0:
        raise InvalidParams(f"radius must be positive, got {radius}")
    if not inversive > 1.0:
        raise InvalidParams(f"inversive distance must exceed 1 on initial data, got {inversive}")
    mesh = preset_complex(name, n=n)
    radii = np.full(mesh.num_vertices, float(radius))
    inv = np.full(mesh.num_edges, float(inversive))
    lengths = lengths_from_inversive(mesh, radii, inv)
    return DecoratedMetric(mesh, lengths, radii)
