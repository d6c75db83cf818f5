"""Tests for domain recipes and the equal-area ball comparison."""

import json
import math

import numpy as np
import pytest

from robinfk.core import ProblemParams
from robinfk.domains import build_domain, outline_for
from robinfk.fk import FkReport, fk_check, load_report, save_report
from robinfk.mesh import make_disk, save_mesh
from robinfk.variational import solve_domain


# ---------------------------------------------------------------------------
# recipes


def test_rectangle_recipe_exact_measures():
    mesh, desc = build_domain({"kind": "rectangle", "aspect": 4.0 / math.pi, "area": math.pi}, 0.1)
    assert mesh.area() == pytest.approx(math.pi, rel=1e-12)
    width = mesh.vertices[:, 0].max() - mesh.vertices[:, 0].min()
    height = mesh.vertices[:, 1].max() - mesh.vertices[:, 1].min()
    assert width == pytest.approx(2.0, rel=1e-12)
    assert height == pytest.approx(math.pi / 2.0, rel=1e-12)
    assert desc.startswith("rectangle(")


def test_square_is_rectangle_aspect_one():
    mesh, _ = build_domain({"kind": "rectangle", "aspect": 1.0, "area": math.pi}, 0.1)
    width = mesh.vertices[:, 0].max() - mesh.vertices[:, 0].min()
    height = mesh.vertices[:, 1].max() - mesh.vertices[:, 1].min()
    assert width == pytest.approx(height, rel=1e-12)


def test_l_shape_recipe():
    mesh, desc = build_domain({"kind": "l-shape", "area": math.pi}, 0.1)
    assert mesh.area() == pytest.approx(math.pi, rel=1e-12)
    # three quarters of the bounding square
    width = mesh.vertices[:, 0].max() - mesh.vertices[:, 0].min()
    assert width**2 * 0.75 == pytest.approx(math.pi, rel=1e-12)
    assert desc == f"l-shape(area={math.pi:.6g})"


def test_regular_polygon_recipe():
    mesh, desc = build_domain({"kind": "regular-n-gon", "sides": 6, "area": math.pi}, 0.1)
    assert mesh.area() == pytest.approx(math.pi, rel=1e-12)
    assert desc.startswith("regular-6-gon")
    with pytest.raises(ValueError, match="3 sides"):
        build_domain({"kind": "regular-n-gon", "sides": 2, "area": math.pi}, 0.1)


@pytest.mark.parametrize("e", [0.0, 0.2, 0.4, 0.6])
def test_ellipse_recipe(e):
    mesh, desc = build_domain({"kind": "ellipse", "eccentricity": e, "area": math.pi}, 0.08)
    assert mesh.area() == pytest.approx(math.pi, rel=1e-12)
    a = mesh.vertices[:, 0].max()
    b = mesh.vertices[:, 1].max()
    if e > 0:
        assert math.sqrt(1.0 - (b / a) ** 2) == pytest.approx(e, abs=5e-3)
    assert f"e={e:.6g}" in desc


def test_ellipse_rejects_bad_eccentricity():
    with pytest.raises(ValueError, match="eccentricity"):
        outline_for({"kind": "ellipse", "eccentricity": 1.0, "area": math.pi}, 0.1)
    with pytest.raises(ValueError, match="eccentricity"):
        outline_for({"kind": "ellipse", "eccentricity": -0.1, "area": math.pi}, 0.1)


def test_disk_recipe_uses_ring_mesher():
    mesh, desc = build_domain({"kind": "disk", "area": math.pi}, 0.2)
    r = np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1])
    assert np.max(np.abs(r[mesh.boundary_vertex_mask()] - 1.0)) <= 1e-14
    assert desc.startswith("disk(")


def test_mesh_kind_round_trip(tmp_path):
    mesh = make_disk(1.0, 0.3)
    path = tmp_path / "m.json"
    save_mesh(mesh, path)
    loaded, desc = build_domain({"kind": "mesh", "path": str(path)}, 0.3)
    np.testing.assert_array_equal(loaded.vertices, mesh.vertices)
    assert desc == f"mesh:{path}"


def test_unknown_kind_and_bad_h():
    with pytest.raises(ValueError, match="unknown domain kind"):
        build_domain({"kind": "pentagon-ish"}, 0.1)
    with pytest.raises(ValueError, match="positive"):
        build_domain({"kind": "disk"}, 0.0)
    with pytest.raises(ValueError, match="aspect"):
        build_domain({"kind": "rectangle", "aspect": -2.0}, 0.1)


# ---------------------------------------------------------------------------
# ball comparison


@pytest.fixture(scope="module")
def square_report():
    mesh, desc = build_domain({"kind": "rectangle", "aspect": 1.0, "area": math.pi}, 0.05)
    return fk_check(mesh, ProblemParams(p=2.0, beta=1.0), desc)


def test_fk_square_positive_gap(square_report):
    rep = square_report
    assert rep.passed
    assert rep.gap > rep.tolerance  # far from the borderline for the square
    assert rep.gap == pytest.approx(rep.lambda_omega - rep.lambda_ball, rel=1e-14)


def test_fk_ball_radius_exact(square_report):
    assert math.pi * square_report.ball_radius**2 == pytest.approx(
        square_report.area, rel=1e-12
    )


def test_fk_tolerance_composition(square_report):
    rep = square_report
    assert rep.tolerance == pytest.approx(0.02 * rep.lambda_ball + rep.slack, rel=1e-14)
    assert rep.slack == pytest.approx(3.0 * rep.mesh_size**2 * rep.lambda_ball, rel=1e-14)


def test_fk_disk_gap_tiny():
    mesh, desc = build_domain({"kind": "disk", "area": math.pi}, 0.05)
    rep = fk_check(mesh, ProblemParams(p=2.0, beta=1.0), desc)
    assert rep.passed
    assert abs(rep.gap) <= 0.02 * rep.lambda_ball


def test_fk_lshape_gap_exceeds_square(square_report):
    mesh, desc = build_domain({"kind": "l-shape", "area": math.pi}, 0.05)
    rep = fk_check(mesh, ProblemParams(p=2.0, beta=1.0), desc)
    assert rep.passed
    assert rep.gap > square_report.gap


def test_fk_rejects_nonpositive_beta():
    mesh, _ = build_domain({"kind": "disk", "area": math.pi}, 0.3)
    with pytest.raises(ValueError, match="beta > 0"):
        fk_check(mesh, ProblemParams(p=2.0, beta=0.0))


def test_fk_accepts_precomputed_solution():
    mesh, desc = build_domain({"kind": "disk", "area": math.pi}, 0.1)
    params = ProblemParams(p=2.0, beta=1.0)
    sol = solve_domain(mesh, params)
    rep = fk_check(mesh, params, desc, domain_solution=sol)
    assert rep.lambda_omega == sol.lambda1
    other, _ = build_domain({"kind": "disk", "area": math.pi}, 0.3)
    with pytest.raises(ValueError, match="different mesh"):
        fk_check(other, params, desc, domain_solution=sol)


def test_fk_report_round_trip(tmp_path, square_report):
    path = tmp_path / "report.json"
    save_report(square_report, path)
    back = load_report(path)
    assert back == square_report
    doc = json.loads(path.read_text())
    for key in ("omega_descriptor", "area", "lambda_omega", "ball_radius", "lambda_ball", "gap", "passed", "slack", "tolerance"):
        assert key in doc
