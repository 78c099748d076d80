"""Edge flips keep the surface rigid while the triangulation adapts.

Squeezing some vertices of a flat torus makes a few edges violate the
weighted Delaunay condition: the orthogonal circles of the two adjacent
faces cross the edge at angles summing past pi.  Flipping such an edge to
the opposite diagonal of its quadrilateral is a pure retriangulation; the
metric does not move, so curvature and area stay put to roundoff.
"""

import numpy as np

from packflow import (
    curvature,
    delaunay_violations,
    make_delaunay,
    preset_metric,
    triangle_areas,
)

metric = preset_metric("torus_grid", n=3, radius=0.5)
rng = np.random.default_rng(9)
u = rng.uniform(-1.2, 1.2, 9)
u -= u.mean()
metric.set_conformal_factors(u)

violations = delaunay_violations(metric)
print("violating edges (worst first):")
for edge_id, weight in violations:
    a, b = metric.mesh.edge_endpoints_array()[edge_id]
    print(f"  edge {edge_id} = ({a},{b})  weight {weight:+.4f}")

k_before = curvature(metric)
area_before = float(np.sum(triangle_areas(metric)))

_, events = make_delaunay(metric)

print()
print(f"{len(events)} flips:")
for ev in events:
    note = "" if ev.inversive_in_packing_range else "  (inversive <= 1)"
    print(f"  #{ev.ordinal}: edge {ev.edge_id} {ev.old_endpoints} -> {ev.new_endpoints},"
          f" new length {ev.new_length:.4f}, new inversive {ev.new_inversive:.3f}{note}")

print()
print("violations left:", len(delaunay_violations(metric)))
print("curvature moved by", float(np.max(np.abs(curvature(metric) - k_before))))
print("area moved by     ", abs(float(np.sum(triangle_areas(metric))) - area_before))
