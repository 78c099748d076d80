"""
Curvature lives at the vertices, its total lives in the topology
================================================================

A piecewise flat surface is flat inside every triangle; all the bending
concentrates at the vertices.  The curvature of a vertex is 2*pi minus
the angles that meet there, and no matter how the lengths are chosen the
curvatures always add up to 2*pi times the Euler characteristic.
"""

import numpy as np

from packflow import curvature, gauss_bonnet_residual, preset_metric

for name, kwargs in [
    ("tetrahedron", {}),
    ("octahedron", {}),
    ("icosahedron", {}),
    ("torus_grid", {"n": 3}),
    ("one_vertex_torus", {}),
]:
    metric = preset_metric(name, **kwargs)
    k = curvature(metric)
    chi = metric.mesh.euler_characteristic
    print(f"{name:18s} chi={chi:+d}  K ranges [{k.min():+.4f}, {k.max():+.4f}]"
          f"  sum(K)/2pi = {np.sum(k) / (2 * np.pi):+.6f}")

# The symmetric presets are homogeneous: pi at each tetrahedron vertex,
# 2*pi/3 on the octahedron, pi/3 on the icosahedron, zero on the tori.

# Breaking the symmetry moves curvature around but never changes the total.
metric = preset_metric("icosahedron")
rng = np.random.default_rng(0)
u = rng.uniform(-0.3, 0.3, 12)
u -= u.mean()
metric.set_conformal_factors(u)
k = curvature(metric)
print()
print("perturbed icosahedron:")
print("  K spread     ", round(float(k.max() - k.min()), 4))
print("  total residual", gauss_bonnet_residual(metric))
