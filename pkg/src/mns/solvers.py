"""Linear solvers for the two system shapes produced by the time stepper.

All matrices are time-independent, so each solver factorizes once at setup;
SPD solves are a pair of triangular backsubstitutions and saddle solves a
short warm-started Uzawa iteration on an augmented SPD factor. The residual
contracts (momentum/angular rtol = 1e-10, divergence rtol = 1e-8) are
checked on every solve.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DEFAULT_RTOL = 1e-10
DEFAULT_RTOL_DIV = 1e-8


class NotSpdError(ValueError):
    """Raised when prepare_spd receives a matrix that is not SPD."""


class SolverConvergenceError(RuntimeError):
    """Raised when a solve fails its residual contract."""


def _check_symmetry(A, tol=1e-12):
    d = abs(A - A.T)
    amax = abs(A).max() if A.nnz else 0.0
    if d.nnz and d.max() > tol * max(amax, 1.0):
        raise NotSpdError("matrix is not symmetric")


@dataclass
class SpdSolver:
    """Prepared (factorized) symmetric positive definite system."""

    matrix: sp.csr_matrix
    rtol: float = DEFAULT_RTOL
    _lu: object = field(init=False, repr=False)

    def __post_init__(self):
        _check_symmetry(self.matrix)
        diag = self.matrix.diagonal()
        if np.any(diag <= 0):
            raise NotSpdError("matrix has a nonpositive diagonal entry")
        # Symmetric fill-reducing ordering without numerical pivoting keeps
        # P A P^T = L U with diag(U) the Cholesky pivots: all positive iff SPD.
        try:
            self._lu = spla.splu(
                self.matrix.tocsc(),
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:
            raise NotSpdError(f"factorization broke down: {exc}") from exc
        if np.any(self._lu.U.diagonal() <= 0):
            raise NotSpdError("matrix is not positive definite")

    def solve(self, rhs):
        """Solve A x = rhs; rhs may be 1D or 2D (one system per column)."""
        rhs = np.asarray(rhs, dtype=float)
        x = self._lu.solve(rhs)
        rnorm = np.linalg.norm(self.matrix @ x - rhs, axis=0)
        bnorm = np.linalg.norm(rhs, axis=0)
        if np.any(rnorm > self.rtol * np.maximum(bnorm, 1e-300)):
            raise SolverConvergenceError(
                f"SPD solve residual {np.max(rnorm):.3e} exceeds "
                f"{self.rtol:.1e} * {np.max(bnorm):.3e}"
            )
        return x


def prepare_spd(matrix, rtol=DEFAULT_RTOL):
    return SpdSolver(matrix, rtol=rtol)


def solve_spd(solver, rhs):
    return solver.solve(rhs)


@dataclass
class StokesSolver:
    """Prepared generalized Stokes (velocity-pressure saddle point) system,
    solved by an augmented-Lagrangian Uzawa iteration.

    velocity_matrix : Dirichlet-eliminated velocity block A = M/tau + nu0*K
    div_matrix      : divergence matrix with boundary velocity columns zeroed
    pressure_mass   : P1 pressure mass matrix (supplies the mean weights)
    gamma           : augmentation weight; larger gamma means fewer Uzawa
                      iterations at the price of a worse-conditioned factor

    One SPD factorization of A + gamma B^T W^-1 B (W = lumped pressure mass)
    is reused for every solve; each Uzawa sweep is one backsubstitution plus
    a pressure update p <- p - gamma W^-1 B u, and iterations stop once the
    momentum and divergence residual contracts hold. Constant pressure shifts
    lie in the kernel of B^T (zero-trace velocity space), so the zero-mean
    normalization is a final projection with the M_p weights.
    """

    velocity_matrix: sp.csr_matrix
    div_matrix: sp.csr_matrix
    pressure_mass: sp.csr_matrix
    rtol: float = DEFAULT_RTOL
    rtol_div: float = DEFAULT_RTOL_DIV
    gamma: float = 1e4
    max_iter: int = 200
    _lu: object = field(init=False, repr=False)

    def __post_init__(self):
        A = self.velocity_matrix
        B = self.div_matrix
        self.n_u = A.shape[0]
        self.n_p = B.shape[0]
        self.mean_weights = np.asarray(self.pressure_mass @ np.ones(self.n_p))
        self.domain_area = float(self.mean_weights.sum())
        self._w_lump = np.asarray(self.pressure_mass.sum(axis=1)).ravel()
        if np.any(self._w_lump <= 0):
            raise ValueError("pressure mass matrix has nonpositive row sums")
        self._amax = abs(A).max()
        winv = sp.diags(1.0 / self._w_lump)
        augmented = (A + self.gamma * (B.T @ (winv @ B))).tocsc()
        try:
            self._lu = spla.splu(
                augmented,
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:
            raise NotSpdError(f"factorization broke down: {exc}") from exc
        if np.any(self._lu.U.diagonal() <= 0):
            raise NotSpdError("augmented velocity block is not positive definite")
        # Factor of the plain (unaugmented) velocity block, used for a final
        # polish solve: the augmented factor leaves a momentum residual floor
        # of order eps * |A_gamma| * |u|, i.e. amplified by gamma, while one
        # backsubstitution with A itself brings it down to eps * |A| * |u|.
        try:
            self._lu_plain = spla.splu(
                A.tocsc(),
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:
            raise NotSpdError(f"factorization broke down: {exc}") from exc
        if np.any(self._lu_plain.U.diagonal() <= 0):
            raise NotSpdError("velocity block is not positive definite")
        self._p_warm = None

    def solve(self, rhs_velocity):
        """Solve the saddle system for one velocity right-hand side (1D) or
        several at once (2D, one per column); returns (u, p) shaped like the
        input. The divergence constraint has zero right-hand side in every
        use here. The previous pressure solution warm-starts the iteration."""
        rhs_velocity = np.asarray(rhs_velocity, dtype=float)
        single = rhs_velocity.ndim == 1
        rv = rhs_velocity.reshape(self.n_u, -1)
        ncol = rv.shape[1]
        A, B = self.velocity_matrix, self.div_matrix
        bnorm = np.linalg.norm(rv, axis=0)
        scale = np.maximum(bnorm, 1e-300)

        if self._p_warm is not None and self._p_warm.shape[1] == ncol:
            p = self._p_warm.copy()
        else:
            p = np.zeros((self.n_p, ncol))
        # The pressure error is the divergence residual amplified by the
        # inverse Schur complement, so iterate well past the divergence
        # contract, stopping at 1e-12 relative or at the round-off floor
        # (residual no longer shrinking).
        rdiv_prev = np.full(ncol, np.inf)
        for _ in range(self.max_iter):
            u = self._lu.solve(rv + B.T @ p)
            bu = B @ u
            p -= self.gamma * (bu / self._w_lump[:, None])
            rdiv = np.linalg.norm(bu, axis=0)
            if np.all(rdiv <= 1e-12 * scale) or np.all(rdiv >= 0.5 * rdiv_prev):
                break
            rdiv_prev = rdiv
        # Polish with the plain velocity block so the momentum residual is
        # not limited by the gamma-amplified round-off of the augmented
        # factor; the divergence residual grows by at most ~gamma, which is
        # still far below its contract.
        btp = B.T @ p
        u = self._lu_plain.solve(rv + btp)
        bu = B @ u
        rdiv = np.linalg.norm(bu, axis=0)
        au = A @ u
        rmom = np.linalg.norm(au - btp - rv, axis=0)
        # Backward-error normalization: a column whose right-hand side is
        # tiny relative to the terms it balances (e.g. a unit-load column
        # next to a stiff one) is judged against those terms, not only
        # bnorm. The eps*|A| floor keeps the check meaningful once the
        # solution itself has decayed to round-off level (residuals smaller
        # than one unit of velocity times machine epsilon are noise).
        denom = np.maximum(
            scale, np.linalg.norm(au, axis=0) + np.linalg.norm(btp, axis=0)
        )
        denom = np.maximum(denom, np.finfo(float).eps * self._amax)
        if np.any(rmom > self.rtol * denom) or np.any(rdiv > self.rtol_div * denom):
            raise SolverConvergenceError(
                f"Uzawa iteration stalled: momentum residual {np.max(rmom):.3e}, "
                f"divergence residual {np.max(rdiv):.3e}"
            )
        self._p_warm = p.copy()
        p = p - self.mean_weights @ p / self.domain_area
        if single:
            return u[:, 0], p[:, 0]
        return u, p


def prepare_stokes(velocity_matrix, div_matrix, pressure_mass,
                   rtol=DEFAULT_RTOL, rtol_div=DEFAULT_RTOL_DIV):
    return StokesSolver(velocity_matrix, div_matrix, pressure_mass,
                        rtol=rtol, rtol_div=rtol_div)


def solve_stokes(solver, rhs_velocity):
    return solver.solve(rhs_velocity)
