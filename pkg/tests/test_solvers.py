"""Prepared solvers against dense linear algebra oracles."""

import numpy as np
import pytest
import scipy.sparse as sp

from mns import fem, solvers
from mns.fem import FeSpace
from mns.mesh import build_rect_mesh


def random_spd(n, rng):
    A = rng.normal(size=(n, n))
    return sp.csr_matrix(A @ A.T + n * np.eye(n))


# ---------------------------------------------------------------------------
# SPD solver


def test_spd_dense_oracle():
    rng = np.random.default_rng(0)
    A = random_spd(12, rng)
    solver = solvers.prepare_spd(A)
    b = rng.normal(size=12)
    x = solvers.solve_spd(solver, b)
    assert np.allclose(x, np.linalg.solve(A.toarray(), b), rtol=1e-12)


def test_spd_batched_rhs_matches_columnwise():
    rng = np.random.default_rng(1)
    A = random_spd(20, rng)
    solver = solvers.prepare_spd(A)
    B = rng.normal(size=(20, 3))
    X = solver.solve(B)
    for k in range(3):
        assert np.allclose(X[:, k], solver.solve(B[:, k]), rtol=1e-12)


def test_spd_reuse_many_solves():
    rng = np.random.default_rng(2)
    A = random_spd(15, rng)
    solver = solvers.prepare_spd(A)
    for _ in range(5):
        b = rng.normal(size=15)
        x = solver.solve(b)
        assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_spd_rejects_asymmetric():
    A = sp.csr_matrix(np.array([[2.0, 1.0], [0.0, 2.0]]))
    with pytest.raises(solvers.NotSpdError):
        solvers.prepare_spd(A)


def test_spd_rejects_indefinite():
    A = sp.csr_matrix(np.array([[1.0, 2.0], [2.0, 1.0]]))  # eigenvalues 3, -1
    with pytest.raises(solvers.NotSpdError):
        solvers.prepare_spd(A)


def test_spd_rejects_negative_definite():
    A = sp.csr_matrix(-np.eye(3))
    with pytest.raises(solvers.NotSpdError):
        solvers.prepare_spd(A)


def test_spd_accepts_fem_operator():
    mesh = build_rect_mesh(4, 4)
    space = FeSpace(mesh, order=2, components=1)
    A = fem.assemble_mass(space) + 0.5 * fem.assemble_stiffness(space)
    solver = solvers.prepare_spd(A)
    b = np.sin(np.arange(space.dof_count))
    x = solver.solve(b)
    assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)


# ---------------------------------------------------------------------------
# generalized Stokes solver


def _stokes_setup(n=4, tau=0.1, nu0=2.0):
    mesh = build_rect_mesh(n, n)
    vel = FeSpace(mesh, order=2, components=2)
    pres = FeSpace(mesh, order=1, components=1)
    M = fem.assemble_mass(vel)
    K = fem.assemble_stiffness(vel)
    B = fem.assemble_div(vel, pres)
    Mp = fem.assemble_mass(pres)
    bdofs = vel.boundary_dofs
    A, _ = fem.apply_dirichlet(M / tau + nu0 * K, np.zeros(vel.dof_count),
                               bdofs, np.zeros(bdofs.size))
    Bl = B.tolil()
    Bl[:, bdofs] = 0.0
    return vel, pres, A, Bl.tocsr(), Mp, bdofs


def test_stokes_dense_oracle():
    """Compare against a dense solve of the full saddle system with the
    zero-mean constraint appended."""
    vel, pres, A, B, Mp, bdofs = _stokes_setup(n=2)
    solver = solvers.prepare_stokes(A, B, Mp)
    rng = np.random.default_rng(3)
    rhs = rng.normal(size=vel.dof_count)
    rhs[bdofs] = 0.0
    u, p = solver.solve(rhs)

    nu_, np_ = vel.dof_count, pres.dof_count
    m = np.asarray(Mp @ np.ones(np_))
    S = np.zeros((nu_ + np_ + 1, nu_ + np_ + 1))
    S[:nu_, :nu_] = A.toarray()
    S[:nu_, nu_:nu_ + np_] = -B.toarray().T
    S[nu_:nu_ + np_, :nu_] = B.toarray()
    S[nu_:nu_ + np_, -1] = m
    S[-1, nu_:nu_ + np_] = m
    b = np.zeros(nu_ + np_ + 1)
    b[:nu_] = rhs
    x = np.linalg.solve(S, b)
    assert np.allclose(u, x[:nu_], atol=1e-9 * max(1, np.abs(x).max()))
    pd = x[nu_:nu_ + np_]
    pd = pd - (m @ pd) / m.sum()
    assert np.allclose(p, pd, atol=1e-9 * max(1, np.abs(pd).max()))


def test_stokes_contracts():
    vel, pres, A, B, Mp, bdofs = _stokes_setup(n=4)
    solver = solvers.prepare_stokes(A, B, Mp)
    rng = np.random.default_rng(4)
    for _ in range(3):
        rhs = rng.normal(size=vel.dof_count)
        rhs[bdofs] = 0.0
        u, p = solver.solve(rhs)
        scale = np.linalg.norm(rhs)
        assert np.linalg.norm(A @ u - B.T @ p - rhs) <= 1e-10 * scale
        assert np.linalg.norm(B @ u) <= 1e-8 * scale
        m = solver.mean_weights
        assert abs(m @ p) <= 1e-10 * scale  # zero mean


def test_stokes_batched_rhs_matches_columnwise():
    vel, pres, A, B, Mp, bdofs = _stokes_setup(n=3)
    solver = solvers.prepare_stokes(A, B, Mp)
    rng = np.random.default_rng(5)
    R = rng.normal(size=(vel.dof_count, 2))
    R[bdofs] = 0.0
    U, P = solver.solve(R)
    for k in range(2):
        u, p = solver.solve(R[:, k])
        assert np.allclose(U[:, k], u, atol=1e-12 * max(1, np.abs(u).max()))
        assert np.allclose(P[:, k], p, atol=1e-12 * max(1, np.abs(p).max()))


def test_stokes_zero_rhs():
    vel, pres, A, B, Mp, bdofs = _stokes_setup(n=2)
    solver = solvers.prepare_stokes(A, B, Mp)
    u, p = solver.solve(np.zeros(vel.dof_count))
    assert np.abs(u).max() == pytest.approx(0.0, abs=1e-14)
    assert np.abs(p).max() == pytest.approx(0.0, abs=1e-14)


def test_stokes_manufactured_convergence():
    """Generalized Stokes with manufactured data converges at order >= 2.5
    in the velocity L2 error under mesh refinement (P2/P1 gives ~3)."""
    import math

    tau, nu0 = 1.0, 1.0

    def exact_u(p):
        x, y = p[:, 0], p[:, 1]
        sx, sy = np.sin(np.pi * x), np.sin(np.pi * y)
        return np.column_stack([
            sx**2 * np.sin(2 * np.pi * y), -np.sin(2 * np.pi * x) * sy**2])

    def forcing(p):
        x, y = p[:, 0], p[:, 1]
        PI = np.pi
        sx, sy = np.sin(PI * x), np.sin(PI * y)
        c2x, c2y = np.cos(2 * PI * x), np.cos(2 * PI * y)
        s2x, s2y = np.sin(2 * PI * x), np.sin(2 * PI * y)
        u1 = sx**2 * s2y
        u2 = -s2x * sy**2
        lap1 = 2 * PI**2 * c2x * s2y - 4 * PI**2 * sx**2 * s2y
        lap2 = 4 * PI**2 * s2x * sy**2 - 2 * PI**2 * s2x * c2y
        px = PI * np.cos(PI * x) * sy
        py = PI * sx * np.cos(PI * y)
        return np.column_stack([u1 / tau - nu0 * lap1 + px,
                                u2 / tau - nu0 * lap2 + py])

    errs = []
    for n in (4, 8, 16):
        mesh = build_rect_mesh(n, n)
        vel = FeSpace(mesh, order=2, components=2)
        pres = FeSpace(mesh, order=1, components=1)
        M = fem.assemble_mass(vel)
        K = fem.assemble_stiffness(vel)
        B = fem.assemble_div(vel, pres)
        Mp = fem.assemble_mass(pres)
        bdofs = vel.boundary_dofs
        A, _ = fem.apply_dirichlet(M / tau + nu0 * K, np.zeros(vel.dof_count),
                                   bdofs, np.zeros(bdofs.size))
        Bl = B.tolil()
        Bl[:, bdofs] = 0.0
        solver = solvers.prepare_stokes(A, Bl.tocsr(), Mp)
        rhs = fem.assemble_load(forcing, vel)
        rhs[bdofs] = 0.0
        u, p = solver.solve(rhs)
        du = fem.Field(u - fem.interpolate(exact_u, vel).coeffs, vel)
        errs.append(fem.field_norms(du).l2)
    rate = math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2])
    assert min(rate) >= 2.5
