"""Structured triangulations of axis-aligned rectangles.

Every rectangle is split into an nx-by-ny grid of cells, each cell cut
into two right triangles by the same diagonal (lower-left to upper-right).
The mesh is the geometric substrate for all finite element spaces.
"""

from dataclasses import dataclass, field

import numpy as np

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class Mesh:
    """Immutable triangulation of a rectangle.

    vertices      : (nv, 2) coordinates
    triangles     : (nt, 3) vertex indices, counter-clockwise
    edges         : (ne, 2) vertex index pairs, sorted within each pair
    tri_edges     : (nt, 3) edge id of local edges (0,1), (1,2), (2,0)
    boundary_vertex : (nv,) bool, True iff the vertex lies on the rectangle boundary
    boundary_edge   : (ne,) bool, True iff the edge lies on exactly one triangle
    bounds        : (xmin, xmax, ymin, ymax)
    nx, ny        : cell counts, kept for structured point location
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    tri_edges: np.ndarray
    boundary_vertex: np.ndarray
    boundary_edge: np.ndarray
    bounds: tuple
    nx: int
    ny: int

    @property
    def num_vertices(self):
        return self.vertices.shape[0]

    @property
    def num_triangles(self):
        return self.triangles.shape[0]

    @property
    def num_edges(self):
        return self.edges.shape[0]

    @property
    def area(self):
        xmin, xmax, ymin, ymax = self.bounds
        return (xmax - xmin) * (ymax - ymin)

    def triangle_areas(self):
        """Signed areas of all triangles (positive for CCW orientation)."""
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def build_rect_mesh(nx, ny, bounds=(0.0, 1.0, 0.0, 1.0)):
    """Uniform right-triangle mesh of a rectangle.

    nx, ny cells per direction; each cell is split by its lower-left to
    upper-right diagonal into two CCW triangles.
    """
    if nx < 1 or ny < 1:
        raise ValueError(f"nx and ny must be positive, got nx={nx}, ny={ny}")
    xmin, xmax, ymin, ymax = bounds
    if not (xmin < xmax and ymin < ymax):
        raise ValueError(f"degenerate bounds {bounds}")

    x = np.linspace(xmin, xmax, nx + 1)
    y = np.linspace(ymin, ymax, ny + 1)
    X, Y = np.meshgrid(x, y, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (nx + 1) + i

    tris = []
    for j in range(ny):
        for i in range(nx):
            v00 = vid(i, j)
            v10 = vid(i + 1, j)
            v01 = vid(i, j + 1)
            v11 = vid(i + 1, j + 1)
            tris.append((v00, v10, v11))  # lower triangle
            tris.append((v00, v11, v01))  # upper triangle
    triangles = np.asarray(tris, dtype=np.int64)

    # Unique edge list; local edges are (0,1), (1,2), (2,0) of each triangle.
    local = np.stack(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=1
    )  # (nt, 3, 2)
    local_sorted = np.sort(local.reshape(-1, 2), axis=1)
    edges, inverse, counts = np.unique(
        local_sorted, axis=0, return_inverse=True, return_counts=True
    )
    tri_edges = inverse.reshape(-1, 3)
    boundary_edge = counts == 1

    on_bnd = (
        (np.abs(vertices[:, 0] - xmin) <= BOUNDARY_TOL)
        | (np.abs(vertices[:, 0] - xmax) <= BOUNDARY_TOL)
        | (np.abs(vertices[:, 1] - ymin) <= BOUNDARY_TOL)
        | (np.abs(vertices[:, 1] - ymax) <= BOUNDARY_TOL)
    )

    mesh = Mesh(
        vertices=vertices,
        triangles=triangles,
        edges=edges,
        tri_edges=tri_edges,
        boundary_vertex=on_bnd,
        boundary_edge=boundary_edge,
        bounds=tuple(float(b) for b in bounds),
        nx=nx,
        ny=ny,
    )
    for arr in (mesh.vertices, mesh.triangles, mesh.edges, mesh.tri_edges,
                mesh.boundary_vertex, mesh.boundary_edge):
        arr.setflags(write=False)
    return mesh


def edge_midpoints(mesh):
    """Midpoint of each edge, indexed by edge id."""
    return 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
