from __future__ import annotations

from pathlib import Path

import pytest

from cadqa.fixtures import (
    HoleSpec,
    make_cube,
    make_cylinder,
    make_plate_before_block,
    make_plate_with_holes,
    make_two_cubes,
)
from cadqa.geometry import load_model
from cadqa.segment import PipelineConfig

# Tests run at a reduced resolution; thresholds and behavior are
# resolution-independent, runtime is not.
TEST_W, TEST_H = 640, 360


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory) -> Path:
    d = tmp_path_factory.mktemp("models")
    make_cube().write(d, "cube")
    make_two_cubes().write(d, "two_cubes")
    make_cylinder(5.0, 10.0, 64).write(d, "cylinder64")
    make_cylinder(5.0, 10.0, 16).write(d, "cylinder16")
    make_plate_with_holes().write(d, "plate4")
    make_plate_with_holes(
        width=100.0, depth=80.0, thickness=10.0, nx=5, ny=4,
        holes=[HoleSpec((1, 1), 5.0), HoleSpec((3, 1), 5.0),
               HoleSpec((2, 2), 6.0, kind="blind", depth=5.0)],
    ).write(d, "blindplate")
    make_plate_before_block().write(d, "fig3")
    return d


@pytest.fixture(scope="session")
def manifests(fixture_dir) -> dict:
    import json
    out = {}
    for mf in fixture_dir.glob("*.manifest.json"):
        out[mf.name.replace(".manifest.json", "")] = json.loads(mf.read_text())
    return out


def _loader(fixture_dir, name):
    return load_model(fixture_dir / f"{name}.obj")


@pytest.fixture(scope="session")
def cube_model(fixture_dir):
    return _loader(fixture_dir, "cube")


@pytest.fixture(scope="session")
def plate_model(fixture_dir):
    return _loader(fixture_dir, "plate4")


@pytest.fixture(scope="session")
def blind_model(fixture_dir):
    return _loader(fixture_dir, "blindplate")


@pytest.fixture(scope="session")
def fig3_model(fixture_dir):
    return _loader(fixture_dir, "fig3")


@pytest.fixture(scope="session")
def cylinder_model(fixture_dir):
    return _loader(fixture_dir, "cylinder64")


@pytest.fixture()
def test_cfg() -> PipelineConfig:
    return PipelineConfig(render_width=TEST_W, render_height=TEST_H)
