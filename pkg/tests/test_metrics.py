from __future__ import annotations

import math

import numpy as np
import pytest

from cadqa.errors import TooFewVertices
from cadqa.fixtures import make_cylinder
from cadqa.geometry import Aabb, CadModel, load_model
from cadqa.metrics import (
    CylinderFit,
    fit_cylinder,
    measure_part,
    part_center,
    part_extents,
)
from cadqa.segment import PartInstance

WALL = PartInstance(frozenset({0}))  # cylinder fixtures: face 0 is the wall


def transformed(model: CadModel, rotation=None, translation=None, scale=1.0) -> CadModel:
    verts = model.vertices * scale
    if rotation is not None:
        verts = verts @ np.asarray(rotation).T
    if translation is not None:
        verts = verts + np.asarray(translation)
    return CadModel(
        vertices=verts,
        faces=model.faces,
        adjacency=model.adjacency,
        aabb=Aabb.of_points(verts),
        source_path=model.source_path,
        labels=model.labels,
        triangles=model.triangles,
        tri_face=model.tri_face,
    )


def random_rotation(rng) -> np.ndarray:
    m = rng.normal(size=(3, 3))
    q, r = np.linalg.qr(m)
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def axis_angle_deg(a, b) -> float:
    cosang = abs(float(np.clip(np.dot(a, b), -1.0, 1.0)))
    return math.degrees(math.acos(cosang))


class TestExtentsCenter:
    def test_cube_extents(self, cube_model):
        whole = PartInstance(frozenset(range(6)))
        assert np.array_equal(part_extents(cube_model, whole), [1.0, 1.0, 1.0])
        assert np.array_equal(part_center(cube_model, whole), [0.5, 0.5, 0.5])

    def test_hole_wall_extents(self, plate_model, manifests):
        hole = manifests["plate4"]["holes"][0]
        wall = PartInstance(frozenset({hole["wall"]}))
        r, t = hole["radius"], manifests["plate4"]["plate"]["thickness"]
        assert np.allclose(part_extents(plate_model, wall),
                           [2 * r, 2 * r, t], atol=1e-9)

    def test_hole_wall_center_matches_manifest(self, plate_model, manifests):
        for hole in manifests["plate4"]["holes"]:
            wall = PartInstance(frozenset({hole["wall"]}))
            assert np.allclose(part_center(plate_model, wall),
                               hole["center"], atol=1e-6)

    def test_planar_part_zero_extent(self, plate_model, manifests):
        top = PartInstance(frozenset({manifests["plate4"]["faces"]["top"]}))
        assert part_extents(plate_model, top)[2] == 0.0

    def test_translation_equivariance(self, cylinder_model):
        t = np.array([13.0, -4.5, 2.25])
        moved = transformed(cylinder_model, translation=t)
        base = part_center(cylinder_model, WALL)
        assert np.allclose(part_center(moved, WALL), base + t, atol=1e-9)
        assert np.array_equal(part_extents(moved, WALL),
                              part_extents(cylinder_model, WALL))

    def test_vertices_inside_center_extents_box(self, plate_model, manifests):
        for hole in manifests["plate4"]["holes"]:
            part = PartInstance(frozenset({hole["wall"]}))
            center = part_center(plate_model, part)
            half = part_extents(plate_model, part) / 2.0
            ids = plate_model.face_vertex_ids(part.face_ids)
            pts = plate_model.vertices[ids]
            assert np.all(pts >= center - half - 1e-12)
            assert np.all(pts <= center + half + 1e-12)


class TestCylinderFit:
    def test_exact_fixture(self, cylinder_model):
        fit = fit_cylinder(cylinder_model, WALL)
        assert isinstance(fit, CylinderFit)
        assert fit.radius == pytest.approx(5.0, rel=0.01)
        assert fit.depth == pytest.approx(10.0, rel=0.001)
        assert axis_angle_deg(fit.axis, [0, 0, 1]) <= 1.0

    def test_coarse_tessellation(self, fixture_dir):
        model = load_model(fixture_dir / "cylinder16.obj")
        fit = fit_cylinder(model, WALL)
        assert fit.radius == pytest.approx(5.0, rel=0.03)

    def test_hole_wall_depth_is_thickness(self, plate_model, manifests):
        hole = manifests["plate4"]["holes"][0]
        fit = fit_cylinder(plate_model, PartInstance(frozenset({hole["wall"]})))
        assert fit.radius == pytest.approx(hole["radius"], rel=0.01)
        assert fit.depth == pytest.approx(hole["depth"], rel=0.001)

    def test_planar_face_not_cylindrical(self, plate_model, manifests):
        top = PartInstance(frozenset({manifests["plate4"]["faces"]["top"]}))
        assert fit_cylinder(plate_model, top) is None

    def test_too_few_vertices(self, cube_model):
        with pytest.raises(TooFewVertices):
            fit_cylinder(cube_model, PartInstance(frozenset({1})))

    @pytest.mark.parametrize("radius", [2.0, 5.0, 20.0])
    def test_rigid_poses(self, tmp_path, radius):
        height = 3.0 * radius
        fx = make_cylinder(radius, height, 64)
        base = load_model(fx.write(tmp_path, f"c{radius}"))
        rng = np.random.default_rng(int(radius * 100))
        for _ in range(10):
            rot = random_rotation(rng)
            shift = rng.uniform(-100, 100, size=3)
            posed = transformed(base, rotation=rot, translation=shift)
            fit = fit_cylinder(posed, WALL)
            assert fit is not None
            assert fit.radius == pytest.approx(radius, rel=0.01)
            assert fit.depth == pytest.approx(height, rel=0.001)
            assert axis_angle_deg(fit.axis, rot @ np.array([0, 0, 1.0])) <= 1.0

    def test_radius_depth_rotation_invariant(self, cylinder_model):
        rng = np.random.default_rng(0)
        rot = random_rotation(rng)
        posed = transformed(cylinder_model, rotation=rot)
        base = fit_cylinder(cylinder_model, WALL)
        moved = fit_cylinder(posed, WALL)
        assert moved.radius == pytest.approx(base.radius, rel=1e-6)
        assert moved.depth == pytest.approx(base.depth, rel=1e-6)

    def test_scale_covariance_power_of_two(self, cylinder_model):
        scaled = transformed(cylinder_model, scale=4.0)
        base = fit_cylinder(cylinder_model, WALL)
        big = fit_cylinder(scaled, WALL)
        assert big.radius == 4.0 * base.radius
        assert big.depth == 4.0 * base.depth
        assert np.array_equal(part_extents(scaled, WALL),
                              4.0 * part_extents(cylinder_model, WALL))
        assert np.array_equal(part_center(scaled, WALL),
                              4.0 * part_center(cylinder_model, WALL))

    def test_scale_covariance_generic(self, cylinder_model):
        scaled = transformed(cylinder_model, scale=3.0)
        base = fit_cylinder(cylinder_model, WALL)
        big = fit_cylinder(scaled, WALL)
        assert big.radius == pytest.approx(3.0 * base.radius, rel=1e-12)
        assert big.depth == pytest.approx(3.0 * base.depth, rel=1e-12)


class TestMeasurePart:
    def test_cylindrical_part_has_all_fields(self, cylinder_model):
        m = measure_part(cylinder_model, WALL)
        assert m.diameter == 2.0 * m.radius
        assert m.depth is not None and m.axis is not None
        assert m.face_area_total == pytest.approx(
            cylinder_model.faces[0].total_area)

    def test_planar_part_absent_fields(self, plate_model, manifests):
        top = PartInstance(frozenset({manifests["plate4"]["faces"]["top"]}))
        m = measure_part(plate_model, top)
        assert m.radius is None and m.diameter is None
        assert m.axis is None and m.depth is None
        assert m.extents[2] == 0.0

    def test_json_round_trip(self, cylinder_model):
        m = measure_part(cylinder_model, WALL)
        data = m.to_json()
        assert data["diameter"] == pytest.approx(10.0, rel=0.01)
        assert len(data["center"]) == 3
