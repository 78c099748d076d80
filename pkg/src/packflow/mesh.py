"""Triangulated closed oriented surfaces with explicit side gluings.

A surface is stored as a list of corner-labeled triangles plus a perfect
matching on triangle sides.  Side ``e`` of triangle ``t`` is the directed
edge from corner ``e`` to corner ``(e + 1) % 3``; a matched pair of sides
is traversed in opposite directions, so the whole complex is oriented by
construction.  Nothing assumes the triangulation is simplicial: loops
(both endpoints the same vertex) and multiple edges between one vertex
pair are legal, which is what surgery on small flat tori produces.

Vertex labels name marked points.  Validation checks that the corner
identification forced by the gluings agrees with the labels, so a label
always means one point of the surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DisconnectedSurface,
    InconsistentVertexLabels,
    MeshError,
    NonSimplicial,
    OrientationMismatch,
    SelfFlip,
    UnmatchedSlot,
    UnusedVertex,
)

Slot = tuple[int, int]


@dataclass(frozen=True)
class EdgeHandle:
    """Stable reference to one edge of the complex.

    ``sides`` are the two glued (triangle, side) slots; ``endpoints`` are
    the vertex labels read off the first side, tail first.
    """

    id: int
    endpoints: tuple[int, int]
    sides: tuple[Slot, Slot]

    @property
    def is_loop(self) -> bool:
        return self.endpoints[0] == self.endpoints[1]


@dataclass
class FlipRecord:
    """What a combinatorial flip did, in terms callers can replay."""

    edge_id: int
    old_endpoints: tuple[int, int]
    new_endpoints: tuple[int, int]
    triangles: tuple[int, int]
    old_corners: tuple[tuple[int, int, int], tuple[int, int, int]]
    new_corners: tuple[tuple[int, int, int], tuple[int, int, int]]
    slot_remap: dict[Slot, Slot]


class DeltaComplex:
    """Closed oriented triangulated surface with marked vertices.

    Use :func:`build_complex` or :func:`infer_gluings` instead of the raw
    constructor; they run the full validation pass.
    """

    def __init__(
        self,
        num_vertices: int,
        triangles: list[tuple[int, int, int]],
        glue: dict[Slot, Slot],
        edges: list[tuple[Slot, Slot]],
        slot_edge: dict[Slot, int],
    ):
        self.num_vertices = num_vertices
        self.triangles = triangles
        self._glue = glue
        self._edges = edges
        self._slot_edge = slot_edge
        self.version = 0
        self._array_cache: dict[str, tuple[int, np.ndarray]] = {}

    # -- size and lookup ----------------------------------------------------

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_triangles

    def glued_to(self, slot: Slot) -> Slot:
        return self._glue[slot]

    def slot_edge(self, slot: Slot) -> int:
        return self._slot_edge[slot]

    def slot_endpoints(self, slot: Slot) -> tuple[int, int]:
        t, e = slot
        tri = self.triangles[t]
        return tri[e], tri[(e + 1) % 3]

    def edge(self, edge_id: int) -> EdgeHandle:
        s1, s2 = self._edges[edge_id]
        return EdgeHandle(edge_id, self.slot_endpoints(s1), (s1, s2))

    def edges(self) -> Iterable[EdgeHandle]:
        return (self.edge(i) for i in range(len(self._edges)))

    # -- cached index arrays --------------------------------------------------

    def _cached(self, key: str, build) -> np.ndarray:
        hit = self._array_cache.get(key)
        if hit is not None and hit[0] == self.version:
            return hit[1]
        arr = build()
        self._array_cache[key] = (self.version, arr)
        return arr

    def triangle_array(self) -> np.ndarray:
        """Corner labels, shape (F, 3)."""
        return self._cached("tri", lambda: np.array(self.triangles, dtype=np.int64))

    def slot_edge_array(self) -> np.ndarray:
        """Edge id under each (triangle, side) slot, shape (F, 3)."""

        def build() -> np.ndarray:
            out = np.empty((self.num_triangles, 3), dtype=np.int64)
            for (t, e), eid in self._slot_edge.items():
                out[t, e] = eid
            return out

        return self._cached("slot_edge", build)

    def edge_endpoints_array(self) -> np.ndarray:
        """Vertex labels by edge id, shape (E, 2)."""

        def build() -> np.ndarray:
            out = np.empty((self.num_edges, 2), dtype=np.int64)
            for eid, (s1, _) in enumerate(self._edges):
                out[eid] = self.slot_endpoints(s1)
            return out

        return self._cached("edge_ends", build)

    # -- stars -----------------------------------------------------------------

    def _next_corner_around(self, t: int, c: int) -> tuple[int, int]:
        # Cross the side arriving at this corner; land on the corner of the
        # neighbor that is glued to the same surface point.
        partner = self._glue[(t, (c + 2) % 3)]
        return partner

    def vertex_star(self, v: int) -> list[tuple[int, int]]:
        """All (triangle, corner) incidences of vertex ``v`` in cyclic order.

        Every corner labeled ``v`` appears exactly once; loops and multiple
        edges are handled because the walk uses gluings, not labels.
        """
        start = None
        for t, tri in enumerate(self.triangles):
            for c in range(3):
                if tri[c] == v:
                    start = (t, c)
                    break
            if start is not None:
                break
        if start is None:
            raise UnusedVertex(f"vertex {v} appears on no triangle")
        out = [start]
        cur = self._next_corner_around(*start)
        while cur != start:
            out.append(cur)
            cur = self._next_corner_around(*cur)
        return out

    # -- mutation ------------------------------------------------------------

    def flip(self, edge_id: int) -> FlipRecord:
        """Replace the two triangles sharing ``edge_id`` by the opposite pair.

        With the shared edge written i -> j, triangles (i, j, k) and
        (j, i, l) become (l, j, k) and (k, i, l); the four outer edges keep
        their ids and the flipped edge keeps its own id with new endpoints
        (k, l).  Purely combinatorial; lengths are the caller's business.
        """
        s1, s2 = self._edges[edge_id]
        t1, e1 = s1
        t2, e2 = s2
        if t1 == t2:
            raise SelfFlip(
                f"edge {edge_id} has both sides on triangle {t1}; flip undefined"
            )
        tri1, tri2 = self.triangles[t1], self.triangles[t2]
        i, j, k = tri1[e1], tri1[(e1 + 1) % 3], tri1[(e1 + 2) % 3]
        l = tri2[(e2 + 2) % 3]

        outer = [
            (t1, (e1 + 1) % 3),  # j -> k
            (t1, (e1 + 2) % 3),  # k -> i
            (t2, (e2 + 1) % 3),  # i -> l
            (t2, (e2 + 2) % 3),  # l -> j
        ]
        remap: dict[Slot, Slot] = {
            outer[0]: (t1, 1),
            outer[1]: (t2, 0),
            outer[2]: (t2, 1),
            outer[3]: (t1, 0),
        }
        partners = {s: self._glue[s] for s in outer}
        outer_edges = {s: self._slot_edge[s] for s in outer}
        # snapshot the affected edge rows: when both sides of an outer edge
        # lie on the two flipped triangles the remap must hit the row exactly
        # once, not once per side
        outer_rows = {eid: self._edges[eid] for eid in outer_edges.values()}

        for s in outer + [s1, s2]:
            del self._glue[s]
            del self._slot_edge[s]

        self.triangles[t1] = (l, j, k)
        self.triangles[t2] = (k, i, l)

        for s in outer:
            new_s = remap[s]
            p = partners[s]
            new_p = remap.get(p, p)
            self._glue[new_s] = new_p
            self._glue[new_p] = new_s
            self._slot_edge[new_s] = outer_edges[s]
        for eid, (a, b) in outer_rows.items():
            self._edges[eid] = (remap.get(a, a), remap.get(b, b))

        diag = ((t1, 2), (t2, 2))
        self._glue[diag[0]] = diag[1]
        self._glue[diag[1]] = diag[0]
        self._slot_edge[diag[0]] = edge_id
        self._slot_edge[diag[1]] = edge_id
        self._edges[edge_id] = diag

        self.version += 1
        return FlipRecord(
            edge_id=edge_id,
            old_endpoints=(i, j),
            new_endpoints=(k, l),
            triangles=(t1, t2),
            old_corners=(tri1, tri2),
            new_corners=(self.triangles[t1], self.triangles[t2]),
            slot_remap=remap,
        )

    def copy(self) -> "DeltaComplex":
        dup = DeltaComplex(
            self.num_vertices,
            list(self.triangles),
            dict(self._glue),
            list(self._edges),
            dict(self._slot_edge),
        )
        dup.version = self.version
        return dup

    # -- validation ------------------------------------------------------------

    def check(self) -> None:
        """Re-run the structural invariants; raises on any violation."""
        _validate(self)

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"DeltaComplex(V={self.num_vertices}, E={self.num_edges},"
            f" F={self.num_triangles}, chi={self.euler_characteristic})"
        )


def flip_combinatorial(mesh: DeltaComplex, edge_id: int) -> tuple[DeltaComplex, FlipRecord]:
    """Flip an edge of ``mesh`` in place; returns the mesh and the remap record."""
    record = mesh.flip(edge_id)
    return mesh, record


def vertex_star(mesh: DeltaComplex, v: int) -> list[tuple[int, int]]:
    return mesh.vertex_star(v)


def _validate(mesh: DeltaComplex) -> None:
    n = mesh.num_vertices
    tris = mesh.triangles
    if n <= 0:
        raise MeshError("num_vertices must be positive")
    if not tris:
        raise MeshError("no triangles")
    seen_labels = set()
    for t, tri in enumerate(tris):
        if len(tri) != 3:
            raise MeshError(f"triangle {t} does not have three corners")
        for c in tri:
            if not (0 <= c < n):
                raise MeshError(f"triangle {t} references vertex {c} outside [0, {n})")
            seen_labels.add(c)
    missing = set(range(n)) - seen_labels
    if missing:
        raise UnusedVertex(f"vertex labels never used: {sorted(missing)}")

    all_slots = {(t, e) for t in range(len(tris)) for e in range(3)}
    glue = mesh._glue
    if set(glue.keys()) != all_slots:
        extra = set(glue.keys()) - all_slots
        if extra:
            raise UnmatchedSlot(f"gluing references unknown slots: {sorted(extra)[:4]}")
        lonely = sorted(all_slots - set(glue.keys()))
        raise UnmatchedSlot(f"sides missing from the gluing: {lonely[:4]}")
    for s, p in glue.items():
        if s == p:
            raise UnmatchedSlot(f"slot {s} glued to itself")
        if glue.get(p) != s:
            raise UnmatchedSlot(f"gluing is not an involution at {s} <-> {p}")
        a, b = mesh.slot_endpoints(s)
        b2, a2 = mesh.slot_endpoints(p)
        if (a, b) != (a2, b2):
            raise OrientationMismatch(
                f"slots {s} ({a}->{b}) and {p} ({b2}->{a2} reversed) disagree on labels"
            )

    # edge table consistent with the gluing
    if len(mesh._slot_edge) != len(all_slots):
        raise UnmatchedSlot("edge table does not cover every side")
    for eid, (s1, s2) in enumerate(mesh._edges):
        if glue[s1] != s2 or mesh._slot_edge[s1] != eid or mesh._slot_edge[s2] != eid:
            raise MeshError(f"edge table row {eid} disagrees with the gluing")

    # corner orbits around vertices must match the labels one-to-one
    remaining = {(t, c) for t in range(len(tris)) for c in range(3)}
    orbit_labels: dict[int, int] = {}
    while remaining:
        start = min(remaining)
        label = tris[start[0]][start[1]]
        cur = start
        while True:
            if tris[cur[0]][cur[1]] != label:
                raise InconsistentVertexLabels(
                    f"corner {cur} labeled {tris[cur[0]][cur[1]]} in the orbit of label {label}"
                )
            remaining.discard(cur)
            cur = mesh._next_corner_around(*cur)
            if cur == start:
                break
        if label in orbit_labels:
            raise InconsistentVertexLabels(
                f"vertex label {label} names two distinct points of the surface"
            )
        orbit_labels[label] = 1

    # connectivity through shared edges
    seen = {0}
    stack = [0]
    while stack:
        t = stack.pop()
        for e in range(3):
            t2 = glue[(t, e)][0]
            if t2 not in seen:
                seen.add(t2)
                stack.append(t2)
    if len(seen) != len(tris):
        raise DisconnectedSurface(
            f"only {len(seen)} of {len(tris)} triangles reachable from triangle 0"
        )

    if mesh.euler_characteristic % 2 != 0:
        raise MeshError(
            f"Euler characteristic {mesh.euler_characteristic} is odd; not a closed surface"
        )


def build_complex(
    num_vertices: int,
    triangles: Sequence[Sequence[int]],
    gluings: Iterable[tuple[Slot, Slot]],
) -> DeltaComplex:
    """Assemble and validate a closed surface from explicit side gluings.

    Edge ids follow the order of ``gluings``; the arrays in a decorated
    metric are aligned with these ids.
    """
    tris = [tuple(int(c) for c in tri) for tri in triangles]
    glue: dict[Slot, Slot] = {}
    edges: list[tuple[Slot, Slot]] = []
    slot_edge: dict[Slot, int] = {}
    for pair in gluings:
        (s1, s2) = (tuple(pair[0]), tuple(pair[1]))
        s1 = (int(s1[0]), int(s1[1]))
        s2 = (int(s2[0]), int(s2[1]))
        for s in (s1, s2):
            if not (0 <= s[0] < len(tris)) or not (0 <= s[1] < 3):
                raise UnmatchedSlot(f"gluing references slot {s} outside the complex")
            if s in glue:
                raise UnmatchedSlot(f"slot {s} appears in more than one gluing")
        if s1 == s2:
            raise UnmatchedSlot(f"slot {s1} glued to itself")
        glue[s1] = s2
        glue[s2] = s1
        slot_edge[s1] = len(edges)
        slot_edge[s2] = len(edges)
        edges.append((s1, s2))
    mesh = DeltaComplex(int(num_vertices), tris, glue, edges, slot_edge)
    _validate(mesh)
    return mesh


def infer_gluings(num_vertices: int, triangles: Sequence[Sequence[int]]) -> DeltaComplex:
    """Build a complex from triangles alone; works only on simplicial data.

    Every unordered vertex pair must appear on exactly two sides.  The
    one-vertex torus and other self-glued configurations need explicit
    gluings and are rejected with :class:`NonSimplicial`.
    """
    tris = [tuple(int(c) for c in tri) for tri in triangles]
    by_pair: dict[tuple[int, int], list[Slot]] = {}
    order: list[tuple[int, int]] = []
    for t, tri in enumerate(tris):
        for e in range(3):
            a, b = tri[e], tri[(e + 1) % 3]
            key = (min(a, b), max(a, b))
            if key not in by_pair:
                by_pair[key] = []
                order.append(key)
            by_pair[key].append((t, e))
    gluings = []
    for key in order:
        slots = by_pair[key]
        if len(slots) != 2:
            raise NonSimplicial(
                f"vertex pair {key} appears on {len(slots)} sides; gluings must be explicit"
            )
        gluings.append((slots[0], slots[1]))
    return build_complex(num_vertices, tris, gluings)
