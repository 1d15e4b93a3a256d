"""Exact integer geometry: determinants, coordinate certificates, reports."""

import random

import pytest

from polysphere.geomcert import (
    chirotope_from_points,
    det,
    embeddability_report,
    parse_points,
    verify_diagram,
    verify_fan,
)

from conftest import data_text


@pytest.fixture(scope="module")
def diagram_points():
    return parse_points(data_text("diagram_f2_coords.txt"))


@pytest.fixture(scope="module")
def fan_points():
    return parse_points(data_text("fan_coords.txt"))


def _det_by_cofactors(rows):
    if len(rows) == 1:
        return rows[0][0]
    total = 0
    for j in range(len(rows)):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_by_cofactors(minor)
        total += term if j % 2 == 0 else -term
    return total


def test_det_matches_cofactor_expansion():
    rng = random.Random(7)
    for size in (2, 3, 4, 5):
        for _ in range(20):
            rows = [
                [rng.randrange(-9, 10) for _ in range(size)] for _ in range(size)
            ]
            assert det(rows) == _det_by_cofactors(rows)


def test_parse_points_errors():
    with pytest.raises(ValueError):
        parse_points("dim 5\nv0 0 0 0 0 0\n")
    with pytest.raises(ValueError):
        parse_points("dim 3\nv0 0 0\n")
    with pytest.raises(ValueError):
        parse_points("dim 3\nv0 0 0 0\nv2 1 1 1\n")


def test_diagram_coordinates_verify(w12, diagram_points):
    report = verify_diagram(diagram_points, w12, 1)
    assert report.verdict, report.to_text()


def test_diagram_wrong_base_fails(w12, diagram_points):
    assert not verify_diagram(diagram_points, w12, 0).verdict


def test_diagram_perturbation_fails(w12, diagram_points):
    pts = list(diagram_points.points)
    x, y, z = pts[5]
    pts[5] = (x + 1000, y, z)  # far outside the base facet's hull
    moved = type(diagram_points)(3, tuple(pts))
    assert not verify_diagram(moved, w12, 1).verdict


def test_scaling_leaves_reports_byte_identical(w12, diagram_points, fan_points):
    assert (
        verify_diagram(diagram_points, w12, 1).to_text()
        == verify_diagram(diagram_points.scaled(7), w12, 1).to_text()
    )
    assert (
        verify_fan(fan_points, w12).to_text()
        == verify_fan(fan_points.scaled(7), w12).to_text()
    )


def test_fan_coordinates_verify(w12, fan_points):
    report = verify_fan(fan_points, w12)
    assert report.verdict, report.to_text()


def test_negated_fan_still_verifies(w12, fan_points):
    negated = type(fan_points)(
        4, tuple(tuple(-c for c in p) for p in fan_points.points)
    )
    assert verify_fan(negated, w12).verdict


def test_fan_rejects_zero_rays(w12, fan_points):
    pts = list(fan_points.points)
    pts[0] = (0, 0, 0, 0)
    with pytest.raises(ValueError):
        verify_fan(type(fan_points)(4, tuple(pts)), w12)


def test_determinant_chirotope_is_total(diagram_points):
    pc = chirotope_from_points(diagram_points, "affine")
    assert pc.rank == 4 and pc.n == 12
    assert None not in pc.signs


def test_embeddability_report(w12):
    rep = embeddability_report(w12)
    assert dict(rep.simple_vertices) == {
        3: (0, 1, 2, 7),
        6: (1, 3, 5, 8),
        7: (1, 4, 6, 10),
        9: (2, 3, 6, 9),
    }
    assert rep.facets_without_simple == (11,)
    tetra_ids = [j for j, _ in rep.tetrahedra]
    assert tetra_ids == [0, 4, 5, 11]
    assert (9, (1, 8, 10), (9, 11)) in rep.bipyramids
    text = rep.to_text()
    assert "simple vertex v3" in text and "F11" in text
