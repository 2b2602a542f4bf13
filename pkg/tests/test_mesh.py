"""Mesh construction: counts, orientation, connectivity, boundary flags."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mns.mesh import BOUNDARY_TOL, build_rect_mesh, edge_midpoints


def test_counts_unit_square():
    # nx=ny=n: (n+1)^2 vertices, 2n^2 triangles, 3n^2 + 2n edges
    for n in (1, 2, 5):
        mesh = build_rect_mesh(n, n)
        assert mesh.num_vertices == (n + 1) ** 2
        assert mesh.num_triangles == 2 * n * n
        assert mesh.num_edges == 3 * n * n + 2 * n


def test_counts_rectangular():
    mesh = build_rect_mesh(3, 5, (0.0, 2.0, -1.0, 1.0))
    assert mesh.num_vertices == 4 * 6
    assert mesh.num_triangles == 2 * 3 * 5
    assert mesh.num_edges == 3 * 15 + 3 + 5


def test_orientation_and_total_area():
    mesh = build_rect_mesh(4, 3, (-1.0, 1.0, 0.0, 3.0))
    areas = mesh.triangle_areas()
    assert np.all(areas > 0)  # CCW
    assert areas.sum() == pytest.approx(mesh.area, rel=1e-14)
    # uniform split: every triangle has the same area
    assert np.allclose(areas, areas[0])


def test_boundary_vertex_flags():
    mesh = build_rect_mesh(4, 4)
    xmin, xmax, ymin, ymax = mesh.bounds
    v = mesh.vertices
    expect = (
        (np.abs(v[:, 0] - xmin) <= BOUNDARY_TOL)
        | (np.abs(v[:, 0] - xmax) <= BOUNDARY_TOL)
        | (np.abs(v[:, 1] - ymin) <= BOUNDARY_TOL)
        | (np.abs(v[:, 1] - ymax) <= BOUNDARY_TOL)
    )
    assert np.array_equal(mesh.boundary_vertex, expect)
    assert mesh.boundary_vertex.sum() == 4 * 4  # 4n boundary vertices


def test_boundary_edge_count():
    # boundary edges = edges on exactly one triangle = 2(nx + ny)
    mesh = build_rect_mesh(3, 4)
    assert mesh.boundary_edge.sum() == 2 * (3 + 4)
    # every boundary edge joins two boundary vertices
    be = mesh.edges[mesh.boundary_edge]
    assert mesh.boundary_vertex[be].all()


def test_tri_edges_consistency():
    mesh = build_rect_mesh(3, 2)
    for t, tri in enumerate(mesh.triangles):
        for k, (i, j) in enumerate([(0, 1), (1, 2), (2, 0)]):
            eid = mesh.tri_edges[t, k]
            assert set(mesh.edges[eid]) == {tri[i], tri[j]}


def test_edges_sorted_unique():
    mesh = build_rect_mesh(4, 4)
    assert np.all(mesh.edges[:, 0] < mesh.edges[:, 1])
    assert len({tuple(e) for e in mesh.edges}) == mesh.num_edges


def test_edge_midpoints():
    mesh = build_rect_mesh(2, 2)
    mid = edge_midpoints(mesh)
    expect = 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
    assert np.array_equal(mid, expect)


def test_arrays_immutable():
    mesh = build_rect_mesh(2, 2)
    with pytest.raises(ValueError):
        mesh.vertices[0, 0] = 99.0


def test_invalid_arguments():
    with pytest.raises(ValueError):
        build_rect_mesh(0, 3)
    with pytest.raises(ValueError):
        build_rect_mesh(2, 2, (1.0, 1.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        build_rect_mesh(2, 2, (0.0, 1.0, 2.0, 1.0))


@settings(max_examples=25, deadline=None)
@given(
    nx=st.integers(1, 8),
    ny=st.integers(1, 8),
    x0=st.floats(-5, 5),
    dx=st.floats(0.1, 10),
    y0=st.floats(-5, 5),
    dy=st.floats(0.1, 10),
)
def test_area_and_euler_characteristic(nx, ny, x0, dx, y0, dy):
    mesh = build_rect_mesh(nx, ny, (x0, x0 + dx, y0, y0 + dy))
    assert mesh.triangle_areas().sum() == pytest.approx(dx * dy, rel=1e-12)
    # planar mesh of a disk-like region: V - E + F = 1
    assert mesh.num_vertices - mesh.num_edges + mesh.num_triangles == 1
