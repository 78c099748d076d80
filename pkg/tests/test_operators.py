"""Curvature, its Jacobian, and the three Laplacian flavors.

The regular tetrahedron makes everything explicit.  All six coefficients
equal sqrt(2)/sqrt(6) = 1/sqrt(3), so dK/du is (4/sqrt3)(I - J/4) with J
the all-ones matrix: diagonal sqrt(3), off-diagonal -1/sqrt(3), spectrum
{0} + {4/sqrt3} x 3.  Because I - J/4 is a projection, every power of the
matrix has the same closed form with the scalar powered.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from packflow import (
    DecoratedMetric,
    IndefiniteOperator,
    InvalidExponent,
    StepLeavesAdmissible,
    apply_fractional,
    apply_laplacian,
    apply_p_laplacian,
    calabi_energy,
    curvature,
    fd_jacobian,
    gauss_bonnet_residual,
    jacobian,
    preset_complex,
    preset_metric,
    spectral,
)

SQ3 = math.sqrt(3.0)
E0 = np.array([1.0, 0.0, 0.0, 0.0])


def test_tetrahedron_curvature_uniform():
    metric = preset_metric("tetrahedron")
    k = curvature(metric)
    assert np.allclose(k, np.pi, rtol=0, atol=1e-14)
    assert abs(gauss_bonnet_residual(metric)) < 1e-13


def test_gauss_bonnet_on_every_preset():
    for name, kwargs in (
        ("tetrahedron", {}),
        ("octahedron", {}),
        ("icosahedron", {}),
        ("torus_grid", {"n": 4}),
        ("one_vertex_torus", {}),
    ):
        metric = preset_metric(name, **kwargs)
        assert abs(gauss_bonnet_residual(metric)) < 1e-12, name


def test_tetrahedron_jacobian_closed_form():
    jac = jacobian(preset_metric("tetrahedron"))
    expected = (4.0 / SQ3) * (np.eye(4) - 0.25)
    assert np.allclose(jac.matrix, expected, rtol=0, atol=1e-13)
    assert jac.delaunay_clean
    assert np.allclose(jac.edge_coefficients, 1.0 / SQ3, rtol=1e-13)
    _, lam = jac.spectral()
    assert np.allclose(lam, [0.0, 4.0 / SQ3, 4.0 / SQ3, 4.0 / SQ3], atol=1e-12)


def test_jacobian_rows_sum_to_zero():
    metric = preset_metric("icosahedron", radius=0.8, inversive=2.1)
    metric.set_conformal_factors(np.linspace(-0.15, 0.15, 12))
    mat = np.asarray(jacobian(metric))
    assert np.allclose(mat, mat.T, atol=1e-14)
    assert np.allclose(mat.sum(axis=1), 0.0, atol=1e-12)


def test_jacobian_matches_finite_differences():
    metric = preset_metric("torus_grid", n=3, radius=0.9)
    rng = np.random.default_rng(11)
    u = rng.uniform(-0.1, 0.1, 9)
    u -= u.mean()
    metric.set_conformal_factors(u)
    analytic = np.asarray(jacobian(metric))
    numeric = fd_jacobian(metric)
    scale = np.max(np.abs(analytic))
    assert np.max(np.abs(analytic - numeric)) < 1e-6 * scale


def test_fd_jacobian_rejects_near_degenerate_states():
    metric = preset_metric("tetrahedron")
    # margin of the flattest triangle shrinks to ~3e-7, below the probe step
    u = 1.0999999 * np.array([1.0, 1.0, -1.0, -1.0])
    metric.set_conformal_factors(u)
    with pytest.raises(StepLeavesAdmissible):
        fd_jacobian(metric)


def test_spectral_reconstructs_the_matrix():
    metric = preset_metric("octahedron", radius=1.2)
    metric.set_conformal_factors(np.linspace(-0.2, 0.2, 6))
    jac = jacobian(metric)
    p, lam = spectral(jac)
    assert np.all(np.diff(lam) >= 0.0)
    assert np.allclose(p @ p.T, np.eye(6), atol=1e-12)
    assert np.allclose(p.T @ np.diag(lam) @ p, np.asarray(jac), atol=1e-12)


def test_laplacian_response_on_tetrahedron():
    jac = jacobian(preset_metric("tetrahedron"))
    out = apply_laplacian(jac, E0)
    assert np.allclose(out, [-SQ3, 1 / SQ3, 1 / SQ3, 1 / SQ3], atol=1e-13)


def test_fractional_closed_form_on_tetrahedron():
    jac = jacobian(preset_metric("tetrahedron"))
    for s in (0.5, 1.0, 2.0, -0.5):
        out = apply_fractional(jac, s, E0)
        expected = -((4.0 / SQ3) ** s) * (E0 - 0.25)
        assert np.allclose(out, expected, atol=1e-12), s


def test_fractional_s_zero_is_exact_negation():
    jac = jacobian(preset_metric("icosahedron"))
    f = np.arange(12.0)
    out = apply_fractional(jac, 0.0, f)
    assert np.array_equal(out, -f)


def test_fractional_keeps_the_kernel():
    jac = jacobian(preset_metric("torus_grid", n=3))
    ones = np.ones(9)
    for s in (0.5, 1.0, -1.0):
        assert np.allclose(apply_fractional(jac, s, ones), 0.0, atol=1e-10)


def test_fractional_indefinite_matrix():
    mat = np.diag([-0.5, 1.0, 2.0])
    with pytest.raises(IndefiniteOperator):
        apply_fractional(mat, 0.5, np.ones(3))
    # integer exponents are plain matrix powers and stay legal
    out = apply_fractional(mat, 2.0, np.array([1.0, 1.0, 1.0]))
    assert np.allclose(out, [-0.25, -1.0, -4.0], atol=1e-14)


def test_p_laplacian_reduces_to_laplacian_at_two():
    metric = preset_metric("icosahedron", radius=0.7, inversive=2.4)
    rng = np.random.default_rng(3)
    jac = jacobian(metric)
    for _ in range(20):
        f = rng.normal(size=12)
        a = apply_p_laplacian(metric, 2.0, f)
        b = apply_laplacian(jac, f)
        assert np.allclose(a, b, atol=1e-12)


def test_p_laplacian_response_on_tetrahedron():
    # all differences are 0 or -1, so |diff|^(p-2) is 1 and every p agrees
    metric = preset_metric("tetrahedron")
    for p in (1.5, 2.0, 3.0):
        out = apply_p_laplacian(metric, p, E0)
        assert np.allclose(out, [-SQ3, 1 / SQ3, 1 / SQ3, 1 / SQ3], atol=1e-13)


def test_p_laplacian_sum_and_energy_identities():
    # sum(d_p f) = 0 and f . d_p f = -sum_e c_e |df|^p
    metric = preset_metric("torus_grid", n=3, radius=0.6)
    rng = np.random.default_rng(23)
    dsum = jacobian(metric).edge_coefficients
    ends = metric.mesh.edge_endpoints_array()
    for p in (1.5, 2.0, 3.0, 4.5):
        for _ in range(20):
            f = rng.normal(size=9)
            out = apply_p_laplacian(metric, p, f)
            assert abs(np.sum(out)) < 1e-12
            df = f[ends[:, 1]] - f[ends[:, 0]]
            energy = float(np.sum(dsum * np.abs(df) ** p))
            assert math.isclose(float(f @ out), -energy, rel_tol=1e-10)


def test_p_laplacian_handles_equal_values_below_two():
    metric = preset_metric("octahedron")
    f = np.zeros(6)
    out = apply_p_laplacian(metric, 1.5, f)
    assert np.array_equal(out, np.zeros(6))


def test_p_laplacian_rejects_exponent_at_most_one():
    metric = preset_metric("tetrahedron")
    for p in (1.0, 0.5, -2.0):
        with pytest.raises(InvalidExponent):
            apply_p_laplacian(metric, p, E0)


def test_loop_edges_contribute_nothing():
    mesh = preset_complex("one_vertex_torus")
    metric = DecoratedMetric(mesh, np.array([1.0, 1.1, 1.8]), np.array([0.4]))
    jac = jacobian(metric)
    assert jac.matrix.shape == (1, 1)
    assert abs(jac.matrix[0, 0]) < 1e-15
    assert np.array_equal(apply_p_laplacian(metric, 3.0, np.array([0.7])), [0.0])


def test_calabi_energy():
    k = np.array([1.0, 2.0, 3.0])
    target = np.array([1.0, 1.0, 1.0])
    assert calabi_energy(k, target) == 5.0
    assert calabi_energy(target, target) == 0.0
