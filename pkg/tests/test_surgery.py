from __future__ import annotations

import math

import numpy as np
import pytest

from packflow import (
    DecoratedMetric,
    FlipProducesDegenerate,
    SurgeryBudgetExceeded,
    build_complex,
    curvature,
    delaunay_violations,
    flip_metric,
    make_delaunay,
    preset_complex,
    preset_metric,
    triangle_areas,
    validate_triangles,
)


def _doubled_right_triangle() -> DecoratedMetric:
    mesh = build_complex(
        3,
        [(0, 1, 2), (2, 1, 0)],
        [((0, 0), (1, 1)), ((0, 1), (1, 0)), ((0, 2), (1, 2))],
    )
    return DecoratedMetric(mesh, np.array([3.0, 4.0, 5.0]), np.ones(3))


def _perturbed_torus(seed: int) -> DecoratedMetric:
    metric = preset_metric("torus_grid", n=3, radius=0.5)
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, 9) * 1.2
    u -= u.mean()
    metric.set_conformal_factors(u)
    return metric


def test_flip_regular_tetrahedron_edge():
    # both faces at edge 0 are equilateral with side sqrt(6); the unfolded
    # quad is a rhombus, so the new diagonal is twice the height, 3 sqrt(2),
    # and the new inversive distance is (18 - 1 - 1) / 2 = 8
    metric = preset_metric("tetrahedron")
    metric, event = flip_metric(metric, 0, flow_time=1.5, ordinal=3)
    assert math.isclose(event.new_length, 3.0 * math.sqrt(2.0), rel_tol=1e-14)
    assert math.isclose(event.new_inversive, 8.0, rel_tol=1e-12)
    assert math.isclose(event.pre_weight, 2.0, rel_tol=1e-12)
    assert event.old_endpoints == (0, 1)
    assert event.new_endpoints == (2, 3)
    assert event.inversive_in_packing_range
    assert event.flow_time == 1.5
    assert event.ordinal == 3
    assert math.isclose(metric.effective_lengths[0], event.new_length, rel_tol=1e-15)


def test_flip_is_an_isometry_on_the_one_vertex_torus():
    # the new diagonal is measured inside the common quad layout, so the
    # total angle at the vertex and the total area cannot move
    for edge_id in range(3):
        metric = DecoratedMetric(
            preset_complex("one_vertex_torus"),
            np.array([1.0, 1.1, 1.8]),
            np.array([0.4]),
        )
        k_before = curvature(metric)
        area_before = float(np.sum(triangle_areas(metric)))
        flip_metric(metric, edge_id)
        assert np.allclose(curvature(metric), k_before, rtol=0, atol=1e-13)
        assert math.isclose(
            float(np.sum(triangle_areas(metric))), area_before, rel_tol=1e-13
        )
        metric.mesh.check()


def test_flip_refuses_to_create_flat_triangles():
    # doubling a 3-4-5 triangle puts a right angle at vertex 1; unfolding
    # across edge (0,1) or (1,2) lands the far corners exactly in line
    metric = _doubled_right_triangle()
    assert validate_triangles(metric).admissible
    for edge_id in (0, 1):
        with pytest.raises(FlipProducesDegenerate):
            flip_metric(metric.copy(), edge_id)
    flip_metric(metric, 2)
    metric.mesh.check()


def test_violations_sorted_worst_first():
    metric = _perturbed_torus(9)
    violations = delaunay_violations(metric)
    assert len(violations) == 4
    weights = [w for _, w in violations]
    assert weights == sorted(weights)
    assert all(w < 0.0 for w in weights)
    assert violations[0][0] == 20


def test_make_delaunay_clears_violations_and_preserves_curvature():
    flipped_any = False
    for seed in range(10):
        metric = _perturbed_torus(seed)
        if not validate_triangles(metric).admissible:
            continue
        k_before = curvature(metric)
        area_before = float(np.sum(triangle_areas(metric)))
        _, events = make_delaunay(metric)
        assert delaunay_violations(metric) == []
        assert np.allclose(curvature(metric), k_before, rtol=0, atol=1e-9)
        assert math.isclose(
            float(np.sum(triangle_areas(metric))), area_before, rel_tol=1e-10
        )
        flipped_any = flipped_any or bool(events)
    assert flipped_any


def test_make_delaunay_is_idempotent():
    metric = _perturbed_torus(7)
    _, first = make_delaunay(metric)
    assert len(first) == 3
    _, second = make_delaunay(metric)
    assert second == []


def test_make_delaunay_numbers_events():
    metric = _perturbed_torus(9)
    _, events = make_delaunay(metric, flow_time=0.25, start_ordinal=10)
    assert [e.ordinal for e in events] == [10, 11, 12, 13]
    assert all(e.flow_time == 0.25 for e in events)


def test_surgery_budget():
    metric = _perturbed_torus(9)
    with pytest.raises(SurgeryBudgetExceeded):
        make_delaunay(metric, max_flips=0)


def test_clean_metric_needs_no_flips():
    metric = preset_metric("icosahedron")
    assert delaunay_violations(metric) == []
    _, events = make_delaunay(metric)
    assert events == []
