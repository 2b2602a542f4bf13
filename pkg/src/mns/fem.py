"""Nodal P1/P2 Lagrange elements on triangles and matrix/vector assembly.

Conventions:
  - scalar dofs: vertices first, then edge midpoints (P2 only);
  - vector dofs interleaved: (x0, y0, x1, y1, ...), dof(k, c) = 2k + c;
  - 2D curl of a vector field: curl u = dx(u_y) - dy(u_x) (a scalar);
    2D curl of a scalar field: curl w = (dy w, -dx w);
  - all element integrals use a 7-point degree-5 triangle rule, exact for
    every bilinear-form integrand here (degree <= 4) and for the degree-5
    convection integrands.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh, edge_midpoints

# 7-point degree-5 rule; barycentric points, weights sum to 1 so that
# int_K f = |K| * sum_q w_q f(x_q).
_A1 = 0.0597158717897698
_B1 = 0.4701420641051151
_A2 = 0.7974269853530873
_B2 = 0.1012865073234563
QUAD_BARY = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3],
        [_A1, _B1, _B1],
        [_B1, _A1, _B1],
        [_B1, _B1, _A1],
        [_A2, _B2, _B2],
        [_B2, _A2, _B2],
        [_B2, _B2, _A2],
    ]
)
QUAD_W = np.array(
    [
        0.225,
        0.1323941527885062,
        0.1323941527885062,
        0.1323941527885062,
        0.1259391805448271,
        0.1259391805448271,
        0.1259391805448271,
    ]
)


def reference_basis(order, bary):
    """Values and reference-coordinate gradients of the Lagrange basis.

    bary: (..., 3) barycentric coordinates (l0, l1, l2) with reference
    triangle (0,0), (1,0), (0,1), i.e. l1 = xi, l2 = eta.
    Returns (values (..., nloc), gradients (..., nloc, 2)).
    """
    bary = np.asarray(bary, dtype=float)
    l0, l1, l2 = bary[..., 0], bary[..., 1], bary[..., 2]
    dl = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])  # d(l_i)/d(xi,eta)
    if order == 1:
        vals = np.stack([l0, l1, l2], axis=-1)
        grads = np.broadcast_to(dl, bary.shape[:-1] + (3, 2)).copy()
        return vals, grads
    if order == 2:
        vals = np.stack(
            [
                l0 * (2 * l0 - 1),
                l1 * (2 * l1 - 1),
                l2 * (2 * l2 - 1),
                4 * l0 * l1,
                4 * l1 * l2,
                4 * l2 * l0,
            ],
            axis=-1,
        )
        lam = np.stack([l0, l1, l2], axis=-1)
        grads = np.empty(bary.shape[:-1] + (6, 2))
        for i in range(3):
            grads[..., i, :] = (4 * lam[..., i : i + 1] - 1) * dl[i]
        pairs = [(0, 1), (1, 2), (2, 0)]
        for k, (i, j) in enumerate(pairs):
            grads[..., 3 + k, :] = 4 * (
                lam[..., i : i + 1] * dl[j] + lam[..., j : j + 1] * dl[i]
            )
        return vals, grads
    raise ValueError(f"unsupported order {order}")


@dataclass
class FeSpace:
    """Scalar or vector nodal finite element space on a triangle mesh."""

    mesh: Mesh
    order: int
    components: int

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if self.components not in (1, 2):
            raise ValueError(f"components must be 1 or 2, got {self.components}")
        mesh = self.mesh
        nv = mesh.num_vertices
        if self.order == 1:
            self.dof_coords = mesh.vertices
            self.cell_dofs = mesh.triangles
            bnd = np.flatnonzero(mesh.boundary_vertex)
        else:
            self.dof_coords = np.vstack([mesh.vertices, edge_midpoints(mesh)])
            self.cell_dofs = np.hstack([mesh.triangles, nv + mesh.tri_edges])
            bnd = np.concatenate(
                [
                    np.flatnonzero(mesh.boundary_vertex),
                    nv + np.flatnonzero(mesh.boundary_edge),
                ]
            )
        self.num_scalar = self.dof_coords.shape[0]
        self.boundary_scalar_dofs = np.sort(bnd)
        # quadrature tables
        self.qvals, self.qgrads_ref = reference_basis(self.order, QUAD_BARY)
        self._geom = None

    @property
    def dof_count(self):
        return self.components * self.num_scalar

    @property
    def boundary_dofs(self):
        """Boundary dofs in the full (possibly interleaved) numbering."""
        if self.components == 1:
            return self.boundary_scalar_dofs
        b = self.boundary_scalar_dofs
        return np.sort(np.concatenate([2 * b, 2 * b + 1]))

    def geometry(self):
        """Per-element affine data: areas (nt,), physical basis gradients
        at the quad points (nt, nq, nloc, 2), and quad point coordinates
        (nt, nq, 2). Cached; all triangles are affine."""
        if self._geom is None:
            mesh = self.mesh
            p = mesh.vertices[mesh.triangles]  # (nt, 3, 2)
            J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=-1)  # (nt,2,2)
            detJ = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            areas = 0.5 * detJ
            Jinv = (
                np.stack(
                    [
                        np.stack([J[:, 1, 1], -J[:, 0, 1]], axis=-1),
                        np.stack([-J[:, 1, 0], J[:, 0, 0]], axis=-1),
                    ],
                    axis=1,
                )
                / detJ[:, None, None]
            )
            # grad_phys = grad_ref @ Jinv  (gradients stored as row vectors)
            gphys = np.einsum("qak,ekl->eqal", self.qgrads_ref, Jinv)
            xi_eta = QUAD_BARY[:, 1:]  # (nq, 2)
            qpts = p[:, None, 0, :] + np.einsum("qk,elk->eql", xi_eta, J)
            self._geom = (areas, gphys, qpts)
        return self._geom


@dataclass
class Field:
    """Coefficient vector on a finite element space."""

    coeffs: np.ndarray
    space: FeSpace

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.space.dof_count,):
            raise ValueError(
                f"coefficient length {self.coeffs.shape} != dof count "
                f"{self.space.dof_count}"
            )

    def cellwise(self):
        """Coefficients gathered per element: (nt, nloc) for scalar spaces,
        (nt, nloc, 2) for vector spaces."""
        cd = self.space.cell_dofs
        if self.space.components == 1:
            return self.coeffs[cd]
        return self.coeffs.reshape(-1, 2)[cd]


def zero_field(space):
    return Field(np.zeros(space.dof_count), space)


def _scatter_matrix(rows, cols, vals, shape):
    A = sp.coo_matrix(
        (vals.ravel(), (rows.ravel(), cols.ravel())), shape=shape
    ).tocsr()
    A.sum_duplicates()
    A.sort_indices()
    return A


def _vectorize(A_scalar):
    """Expand a scalar-space matrix blockwise to interleaved vector dofs."""
    return sp.kron(A_scalar, sp.identity(2, format="csr"), format="csr")


def assemble_mass(space):
    """M_ij = int phi_j phi_i (blockwise per component). SPD."""
    areas, _, _ = space.geometry()
    mref = np.einsum("q,qa,qb->ab", QUAD_W, space.qvals, space.qvals)
    elem = areas[:, None, None] * mref
    cd = space.cell_dofs
    rows = np.broadcast_to(cd[:, :, None], elem.shape)
    cols = np.broadcast_to(cd[:, None, :], elem.shape)
    M = _scatter_matrix(rows, cols, elem, (space.num_scalar, space.num_scalar))
    if space.components == 2:
        M = _vectorize(M)
    return M


def assemble_stiffness(space):
    """K_ij = int grad(phi_j) . grad(phi_i). Symmetric PSD, kernel = constants."""
    areas, gphys, _ = space.geometry()
    elem = areas[:, None, None] * np.einsum("q,eqal,eqbl->eab", QUAD_W, gphys, gphys)
    cd = space.cell_dofs
    rows = np.broadcast_to(cd[:, :, None], elem.shape)
    cols = np.broadcast_to(cd[:, None, :], elem.shape)
    K = _scatter_matrix(rows, cols, elem, (space.num_scalar, space.num_scalar))
    if space.components == 2:
        K = _vectorize(K)
    return K


def assemble_div(vel_space, pres_space):
    """B_qj = int q div(phi_j), shape (pressure dofs, velocity dofs).

    The momentum-side pressure coupling is -B^T acting on pressure
    coefficients.
    """
    if vel_space.mesh is not pres_space.mesh:
        raise ValueError("velocity and pressure spaces live on different meshes")
    areas, gphys, _ = vel_space.geometry()
    pvals = pres_space.qvals  # (nq, 3)
    # elem[e, a, b, c] = |K| sum_q w_q p_a(q) d(phi_b)/dx_c
    elem = areas[:, None, None, None] * np.einsum("q,qa,eqbc->eabc", QUAD_W, pvals, gphys)
    nt = vel_space.mesh.num_triangles
    rows = np.broadcast_to(pres_space.cell_dofs[:, :, None, None], elem.shape)
    cols = np.broadcast_to(
        (2 * vel_space.cell_dofs[:, None, :, None] + np.arange(2)[None, None, None, :]),
        elem.shape,
    )
    return _scatter_matrix(
        rows, cols, elem, (pres_space.num_scalar, vel_space.dof_count)
    )


def assemble_curl(vel_space, ang_space):
    """C_kj = int psi_k (dx phi_j,y - dy phi_j,x), shape (angular, velocity).

    The momentum-side coupling (curl w, v) = (w, curl v) is C^T acting on
    angular coefficients.
    """
    if vel_space.mesh is not ang_space.mesh:
        raise ValueError("velocity and angular spaces live on different meshes")
    areas, gphys, _ = vel_space.geometry()
    avals = ang_space.qvals
    # x-component of phi_b contributes -d/dy, y-component contributes +d/dx
    ex = -np.einsum("q,qa,eqb->eab", QUAD_W, avals, gphys[..., 1])
    ey = np.einsum("q,qa,eqb->eab", QUAD_W, avals, gphys[..., 0])
    elem = areas[:, None, None, None] * np.stack([ex, ey], axis=-1)
    rows = np.broadcast_to(ang_space.cell_dofs[:, :, None, None], elem.shape)
    cols = np.broadcast_to(
        (2 * vel_space.cell_dofs[:, None, :, None] + np.arange(2)[None, None, None, :]),
        elem.shape,
    )
    return _scatter_matrix(rows, cols, elem, (ang_space.num_scalar, vel_space.dof_count))


def _values_at_quad(field):
    """Field values at the quadrature points: (nt, nq) or (nt, nq, 2)."""
    co = field.cellwise()
    if field.space.components == 1:
        return np.einsum("qa,ea->eq", field.space.qvals, co)
    return np.einsum("qa,eac->eqc", field.space.qvals, co)


def _grads_at_quad(field):
    """Physical gradients at quad points: (nt, nq, 2) scalar case,
    (nt, nq, 2, 2) vector case with [comp, deriv] axes."""
    _, gphys, _ = field.space.geometry()
    co = field.cellwise()
    if field.space.components == 1:
        return np.einsum("ea,eqal->eql", co, gphys)
    return np.einsum("eac,eqal->eqcl", co, gphys)


def _scatter_load(space, integrand, areas):
    """Assemble F_i = int integrand . phi_i from quad-point values.

    integrand: (nt, nq) for scalar spaces, (nt, nq, 2) for vector spaces.
    """
    cd = space.cell_dofs
    F = np.zeros(space.dof_count)
    if space.components == 1:
        contrib = areas[:, None] * np.einsum("q,eq,qa->ea", QUAD_W, integrand, space.qvals)
        np.add.at(F, cd, contrib)
    else:
        contrib = areas[:, None, None] * np.einsum(
            "q,eqc,qa->eac", QUAD_W, integrand, space.qvals
        )
        np.add.at(F.reshape(-1, 2), cd, contrib)
    return F


def assemble_convection_load(transport, advected, test_space):
    """N_i = int (transport . grad advected) phi_i.

    transport is a vector field; advected and the test space must match
    (vector for the momentum equation, scalar for the angular equation).
    """
    if transport.space.components != 2:
        raise ValueError("transport must be a vector field")
    if advected.space is not test_space and (
        advected.space.order != test_space.order
        or advected.space.components != test_space.components
        or advected.space.mesh is not test_space.mesh
    ):
        raise ValueError("advected field and test space mismatch")
    areas, _, _ = test_space.geometry()
    U = _values_at_quad(transport)  # (nt, nq, 2)
    G = _grads_at_quad(advected)
    if advected.space.components == 1:
        integrand = np.einsum("eql,eql->eq", U, G)
    else:
        integrand = np.einsum("eql,eqcl->eqc", U, G)
    return _scatter_load(test_space, integrand, areas)


def assemble_load(f, space, t=None):
    """F_i = int f(x, t) . phi_i via the module quadrature rule.

    f is called as f(t, pts) when t is given, else f(pts); pts has shape
    (n, 2) and the result (n,) for scalar spaces or (n, 2) for vector ones.
    """
    areas, _, qpts = space.geometry()
    flat = qpts.reshape(-1, 2)
    vals = f(flat) if t is None else f(t, flat)
    vals = np.asarray(vals, dtype=float)
    if space.components == 1:
        integrand = vals.reshape(qpts.shape[:2])
    else:
        integrand = vals.reshape(qpts.shape[:2] + (2,))
    return _scatter_load(space, integrand, areas)


def interpolate(f, space):
    """Nodal (Lagrange) interpolant: coefficients = f at the dof coordinates."""
    vals = np.asarray(f(space.dof_coords), dtype=float)
    if space.components == 1:
        return Field(vals, space)
    return Field(vals.reshape(-1), space)


@dataclass
class FieldNorms:
    l2: float
    h1_semi: float
    div_l2: float | None = None
    curl_l2: float | None = None


def field_norms(field):
    """L2 norm, H1 seminorm and (vector case) L2 norms of div and curl."""
    areas, _, _ = field.space.geometry()
    V = _values_at_quad(field)
    G = _grads_at_quad(field)
    if field.space.components == 1:
        l2sq = np.einsum("q,eq,e->", QUAD_W, V**2, areas)
        h1sq = np.einsum("q,eql,eql,e->", QUAD_W, G, G, areas)
        return FieldNorms(np.sqrt(l2sq), np.sqrt(h1sq))
    l2sq = np.einsum("q,eqc,eqc,e->", QUAD_W, V, V, areas)
    h1sq = np.einsum("q,eqcl,eqcl,e->", QUAD_W, G, G, areas)
    div = G[..., 0, 0] + G[..., 1, 1]
    curl = G[..., 1, 0] - G[..., 0, 1]
    divsq = np.einsum("q,eq,e->", QUAD_W, div**2, areas)
    curlsq = np.einsum("q,eq,e->", QUAD_W, curl**2, areas)
    return FieldNorms(np.sqrt(l2sq), np.sqrt(h1sq), np.sqrt(divsq), np.sqrt(curlsq))


def apply_dirichlet(A, rhs, dofs, values):
    """Symmetric elimination of Dirichlet dofs.

    Constrained rows and columns are zeroed, the diagonal set to 1, and the
    rhs adjusted so the constrained dofs solve to the prescribed values.
    Returns a new (matrix, rhs) pair; inputs are not modified.
    """
    n = A.shape[0]
    dofs = np.asarray(dofs, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    if dofs.size and (dofs.min() < 0 or dofs.max() >= n):
        raise IndexError("Dirichlet dof out of range")
    rhs = rhs - A[:, dofs] @ values
    rhs[dofs] = values
    mask = np.zeros(n, dtype=bool)
    mask[dofs] = True
    coo = A.tocoo()
    keep = ~(mask[coo.row] | mask[coo.col])
    diag = sp.coo_matrix((np.ones(dofs.size), (dofs, dofs)), shape=A.shape)
    A2 = (
        sp.coo_matrix((coo.data[keep], (coo.row[keep], coo.col[keep])), shape=A.shape)
        + diag
    ).tocsr()
    A2.sort_indices()
    return A2, rhs
