"""Edge lengths induced by circles at the vertices, and their conformal scaling.

A decorated metric stores, per vertex, a circle radius, and per edge a base
length, together with one log scale factor per vertex.  Scaling factor u
changes radii by exp(u_i) and lengths by the mixed rule below, which is
exactly the change that keeps every inversive distance

    I_e = (l^2 - r_a^2 - r_b^2) / (2 r_a r_b)

fixed.  All geometry downstream (angles, curvature, flips) reads the
effective lengths and radii, never the base data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateLength,
    DegenerateTriangle,
    InvalidInversiveDistance,
    NonPositiveRadius,
)
from .mesh import DeltaComplex

TRIANGLE_MARGIN_REL_TOL = 1e-12


@dataclass
class MarginReport:
    """Triangle-inequality slack for every face at a given scale factor."""

    margins: np.ndarray
    threshold: float
    worst_triangle: int

    @property
    def admissible(self) -> bool:
        return bool(np.all(self.margins > self.threshold))

    def require(self) -> None:
        if not self.admissible:
            raise DegenerateTriangle(
                f"triangle {self.worst_triangle} has margin"
                f" {self.margins[self.worst_triangle]:.3e}"
                f" (threshold {self.threshold:.3e})"
            )


class InversiveDistances:
    """Per-edge inversive distances with the initial-data hypothesis attached.

    Plain array wrapper; ``require_packing_range`` enforces I > 1, which is
    demanded of user-supplied input but deliberately not of edges created
    by surgery.
    """

    def __init__(self, values: np.ndarray):
        self.values = np.asarray(values, dtype=float)

    def require_packing_range(self) -> None:
        bad = np.where(self.values <= 1.0)[0]
        if bad.size:
            raise InvalidInversiveDistance(
                f"inversive distance must exceed 1 on initial data; edges {bad.tolist()[:8]}"
                f" have values {self.values[bad][:8].tolist()}"
            )

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


def lengths_from_inversive(
    mesh: DeltaComplex, radii: np.ndarray, inversive: np.ndarray
) -> np.ndarray:
    """Edge lengths l = sqrt(r_a^2 + r_b^2 + 2 I r_a r_b), one per edge id."""
    radii = np.asarray(radii, dtype=float)
    inversive = np.asarray(inversive, dtype=float)
    if np.any(radii <= 0) or not np.all(np.isfinite(radii)):
        bad = np.where(~(radii > 0) | ~np.isfinite(radii))[0]
        raise NonPositiveRadius(f"radii must be positive and finite; vertices {bad.tolist()[:8]}")
    if np.any(inversive <= -1.0):
        bad = np.where(inversive <= -1.0)[0]
        raise InvalidInversiveDistance(
            f"inversive distance must exceed -1; edges {bad.tolist()[:8]}"
        )
    ends = mesh.edge_endpoints_array()
    ra = radii[ends[:, 0]]
    rb = radii[ends[:, 1]]
    sq = ra * ra + rb * rb + 2.0 * inversive * ra * rb
    if np.any(sq <= 0):
        bad = np.where(sq <= 0)[0]
        raise DegenerateLength(f"squared length non-positive on edges {bad.tolist()[:8]}")
    return np.sqrt(sq)


class DecoratedMetric:
    """A circle-decorated piecewise flat metric on a fixed complex.

    The mesh may be mutated by flips (single writer); every cached array
    here is keyed by the mesh version and the scale-factor token, so reads
    always see current data.
    """

    def __init__(
        self,
        mesh: DeltaComplex,
        base_lengths: np.ndarray,
        radii: np.ndarray,
        conformal_factors: np.ndarray | None = None,
    ):
        radii = np.array(radii, dtype=float)
        base_lengths = np.array(base_lengths, dtype=float)
        if radii.shape != (mesh.num_vertices,):
            raise NonPositiveRadius(
                f"expected {mesh.num_vertices} radii, got shape {radii.shape}"
            )
        if np.any(radii <= 0) or not np.all(np.isfinite(radii)):
            bad = np.where(~(radii > 0) | ~np.isfinite(radii))[0]
            raise NonPositiveRadius(f"radii must be positive and finite; vertices {bad.tolist()[:8]}")
        if base_lengths.shape != (mesh.num_edges,):
            raise DegenerateLength(
                f"expected {mesh.num_edges} edge lengths, got shape {base_lengths.shape}"
            )
        if np.any(base_lengths <= 0) or not np.all(np.isfinite(base_lengths)):
            bad = np.where(~(base_lengths > 0) | ~np.isfinite(base_lengths))[0]
            raise DegenerateLength(f"edge lengths must be positive; edges {bad.tolist()[:8]}")
        self.mesh = mesh
        self.base_lengths = base_lengths
        self.radii = radii
        if conformal_factors is None:
            self._u = np.zeros(mesh.num_vertices)
        else:
            self._u = np.array(conformal_factors, dtype=float)
            if self._u.shape != (mesh.num_vertices,):
                raise DegenerateLength(
                    f"expected {mesh.num_vertices} scale factors, got shape {self._u.shape}"
                )
        self._u_token = 0
        self._eff_cache: tuple[tuple[int, int], np.ndarray, np.ndarray] | None = None

    # -- constructors ----------------------------------------------------------

    @classmethod
    def from_inversive(
        cls,
        mesh: DeltaComplex,
        radii: np.ndarray,
        inversive: np.ndarray | InversiveDistances,
        *,
        enforce_packing_range: bool = True,
    ) -> "DecoratedMetric":
        inv = inversive if isinstance(inversive, InversiveDistances) else InversiveDistances(inversive)
        if enforce_packing_range:
            inv.require_packing_range()
        lengths = lengths_from_inversive(mesh, radii, inv.values)
        return cls(mesh, lengths, radii)

    # -- scale factors -----------------------------------------------------------

    @property
    def conformal_factors(self) -> np.ndarray:
        view = self._u.view()
        view.flags.writeable = False
        return view

    def set_conformal_factors(self, u: np.ndarray) -> None:
        u = np.array(u, dtype=float)
        if u.shape != self._u.shape:
            raise ValueError(f"scale factor shape {u.shape} != {self._u.shape}")
        self._u = u
        self._u_token += 1

    # -- effective data ------------------------------------------------------------

    def _state_key(self) -> tuple[int, int]:
        return (self.mesh.version, self._u_token)

    @property
    def effective_lengths(self) -> np.ndarray:
        self._refresh()
        return self._eff_cache[1]

    @property
    def effective_radii(self) -> np.ndarray:
        self._refresh()
        return self._eff_cache[2]

    def _refresh(self) -> None:
        key = self._state_key()
        if self._eff_cache is not None and self._eff_cache[0] == key:
            return
        lengths, radii = apply_conformal(self, self._u)
        lengths.flags.writeable = False
        radii.flags.writeable = False
        self._eff_cache = (key, lengths, radii)

    def copy(self) -> "DecoratedMetric":
        dup = DecoratedMetric(
            self.mesh.copy(), self.base_lengths.copy(), self.radii.copy(), self._u.copy()
        )
        return dup

    def rebase_edge(self, edge_id: int, effective_length: float) -> None:
        """Store a base length for ``edge_id`` so that the current scale
        factors reproduce ``effective_length``.

        Used after a flip: the new diagonal's geometric length is known in
        the effective metric and has to be divided back through the scaling
        rule at the current u.
        """
        a, b = self.mesh.edge(edge_id).endpoints
        ua, ub = self._u[a], self._u[b]
        ea, eb, eab = np.exp(2.0 * ua), np.exp(2.0 * ub), np.exp(ua + ub)
        sq = (
            effective_length * effective_length
            - (ea - eab) * self.radii[a] ** 2
            - (eb - eab) * self.radii[b] ** 2
        ) / eab
        if not sq > 0:
            raise DegenerateLength(
                f"cannot rebase edge {edge_id}: squared base length {sq:.3e}"
            )
        self.base_lengths[edge_id] = np.sqrt(sq)
        self._eff_cache = None
        self._u_token += 1

    def __repr__(self) -> str:  # pragma: no cover
        return f"DecoratedMetric({self.mesh!r}, |u|_inf={np.max(np.abs(self._u)):.3g})"


def apply_conformal(metric: DecoratedMetric, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Effective (lengths, radii) of ``metric`` under scale factors ``u``.

    Lengths follow

        l~^2 = (e^{2u_a} - e^{u_a+u_b}) r_a^2 + (e^{2u_b} - e^{u_a+u_b}) r_b^2
             + e^{u_a+u_b} l^2

    which for a loop edge (a == b) collapses to l~ = e^{u_a} l, since the
    first two terms vanish identically.
    """
    u = np.asarray(u, dtype=float)
    ends = metric.mesh.edge_endpoints_array()
    ua, ub = u[ends[:, 0]], u[ends[:, 1]]
    ra, rb = metric.radii[ends[:, 0]], metric.radii[ends[:, 1]]
    eab = np.exp(ua + ub)
    sq = (
        (np.exp(2.0 * ua) - eab) * ra * ra
        + (np.exp(2.0 * ub) - eab) * rb * rb
        + eab * metric.base_lengths**2
    )
    if np.any(sq <= 0) or not np.all(np.isfinite(sq)):
        bad = np.where(~(sq > 0) | ~np.isfinite(sq))[0]
        raise DegenerateLength(
            f"scaled squared length non-positive on edges {bad.tolist()[:8]}"
        )
    return np.sqrt(sq), np.exp(u) * metric.radii


def inversive_from_lengths(metric: DecoratedMetric) -> np.ndarray:
    """Per-edge inversive distances read off the effective lengths and radii.

    Invariant under scale factors, so this recovers the base decoration.
    """
    ends = metric.mesh.edge_endpoints_array()
    r = metric.effective_radii
    ra, rb = r[ends[:, 0]], r[ends[:, 1]]
    l = metric.effective_lengths
    return (l * l - ra * ra - rb * rb) / (2.0 * ra * rb)


def triangle_side_lengths(metric: DecoratedMetric) -> np.ndarray:
    """Effective lengths under each (triangle, side) slot, shape (F, 3)."""
    return metric.effective_lengths[metric.mesh.slot_edge_array()]


def validate_triangles(metric: DecoratedMetric, u: np.ndarray | None = None) -> MarginReport:
    """Triangle-inequality margins for every face.

    The margin of a face is the smallest of the three sums-of-two-sides
    minus the third side; the metric is admissible iff every margin clears
    a relative threshold tied to the largest effective length.
    """
    if u is None:
        lengths = metric.effective_lengths
    else:
        lengths, _ = apply_conformal(metric, u)
    sides = lengths[metric.mesh.slot_edge_array()]
    s0, s1, s2 = sides[:, 0], sides[:, 1], sides[:, 2]
    margins = np.minimum(
        np.minimum(s0 + s1 - s2, s1 + s2 - s0),
        s2 + s0 - s1,
    )
    threshold = TRIANGLE_MARGIN_REL_TOL * float(np.max(lengths, initial=0.0))
    worst = int(np.argmin(margins))
    return MarginReport(margins=margins, threshold=threshold, worst_triangle=worst)
