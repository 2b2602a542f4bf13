"""First-order IMEX time stepper with a scalar auxiliary variable.

Each step treats diffusion and the velocity/angular coupling implicitly
(partially time-lagged), convection explicitly weighted by the auxiliary
scalar, and recovers the step as a linear combination of two auxiliary
sub-problems:

  1. a generalized Stokes solve and an elliptic angular solve driven by the
     previous state (plus any forcing),
  2. the same operators driven by the explicit convection terms,
  3. a scalar equation fixing the combination weight S, then
     u = u1 + S*u2, p = p1 + S*p2, w = w1 + S*w2, q = S*exp(-t/T).

The combination weight stays well defined: the scalar equation's bracket
is provably positive, which the stepper asserts each step.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import fem, solvers
from .fem import Field, FeSpace
from .mesh import Mesh


@dataclass
class Config:
    """Physical and numerical parameters.

    nu   : Newtonian viscosity (> 0)
    nu_r : microrotation viscosity (> 0)
    jmath: microinertia (> 0)
    c1   : angular diffusion coefficient c_a + c_d (> 0)
    c2   : angular grad-div coefficient c_0 + c_d - c_a (> 0); the grad-div
           operator vanishes identically for a scalar angular field in 2D,
           so c2 only appears in diagnostics
    T    : final time; tau: time step (adjusted to T/N with N = round(T/tau))
    n_cells: cells per direction of the structured mesh
    forcing_f(t, pts) -> (n, 2), forcing_g(t, pts) -> (n,): optional forcing
    """

    nu: float
    nu_r: float
    T: float
    tau: float
    n_cells: int
    jmath: float = 1.0
    c1: float = 2.0
    c2: float = 1.0
    bounds: tuple = (0.0, 1.0, 0.0, 1.0)
    rtol: float = solvers.DEFAULT_RTOL
    rtol_div: float = solvers.DEFAULT_RTOL_DIV
    forcing_f: object = None
    forcing_g: object = None

    def __post_init__(self):
        for name in ("nu", "nu_r", "jmath", "c1", "c2", "T", "tau"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n_cells < 1:
            raise ValueError("n_cells must be positive")
        # equidistant partition: round the step count, make tau divide T
        self.n_steps = max(1, round(self.T / self.tau))
        self.tau = self.T / self.n_steps

    @property
    def nu0(self):
        return self.nu + self.nu_r


@dataclass
class State:
    """Solver state at step n."""

    u: Field
    p: Field
    w: Field
    q: float
    t: float
    n: int
    diagnostics: dict = dc_field(default_factory=dict)


@dataclass
class PreparedSystems:
    """Assembled matrices and prepared solvers, built once per run."""

    vel_space: FeSpace
    pres_space: FeSpace
    ang_space: FeSpace
    mass_u: object
    stiff_u: object
    div: object
    curl: object
    mass_w: object
    stiff_w: object
    mass_p: object
    stokes: solvers.StokesSolver
    angular: solvers.SpdSolver
    vel_bdofs: np.ndarray
    ang_bdofs: np.ndarray


def init_stepper(config, mesh, u0=None, w0=None):
    """Assemble all operators, prepare the solvers, return (State, systems).

    u0, w0 are Fields on the P2 vector / P2 scalar spaces (zero if omitted);
    their boundary dofs must vanish.
    """
    vel_space = FeSpace(mesh, order=2, components=2)
    pres_space = FeSpace(mesh, order=1, components=1)
    ang_space = FeSpace(mesh, order=2, components=1)

    if u0 is None:
        u0 = fem.zero_field(vel_space)
    if w0 is None:
        w0 = fem.zero_field(ang_space)
    for f, name in ((u0, "u0"), (w0, "w0")):
        bvals = np.abs(f.coeffs[f.space.boundary_dofs])
        if bvals.size and bvals.max() > 1e-12:
            raise ValueError(f"{name} has nonzero boundary dofs")

    tau = config.tau
    mass_u = fem.assemble_mass(vel_space)
    stiff_u = fem.assemble_stiffness(vel_space)
    div = fem.assemble_div(vel_space, pres_space)
    curl = fem.assemble_curl(vel_space, ang_space)
    mass_w = fem.assemble_mass(ang_space)
    stiff_w = fem.assemble_stiffness(ang_space)
    mass_p = fem.assemble_mass(pres_space)

    vel_bdofs = vel_space.boundary_dofs
    ang_bdofs = ang_space.boundary_dofs

    a_u = mass_u / tau + config.nu0 * stiff_u
    a_u, _ = fem.apply_dirichlet(a_u, np.zeros(vel_space.dof_count), vel_bdofs,
                                 np.zeros(vel_bdofs.size))
    div_elim = div.tolil()
    div_elim[:, vel_bdofs] = 0.0
    div_elim = div_elim.tocsr()
    stokes = solvers.prepare_stokes(a_u, div_elim, mass_p,
                                    rtol=config.rtol, rtol_div=config.rtol_div)

    # The c2 grad-div term is identically zero for scalar w in 2D.
    a_w = (config.jmath / tau) * mass_w + config.c1 * stiff_w + 4 * config.nu_r * mass_w
    a_w, _ = fem.apply_dirichlet(a_w, np.zeros(ang_space.dof_count), ang_bdofs,
                                 np.zeros(ang_bdofs.size))
    angular = solvers.prepare_spd(a_w, rtol=config.rtol)

    systems = PreparedSystems(
        vel_space=vel_space, pres_space=pres_space, ang_space=ang_space,
        mass_u=mass_u, stiff_u=stiff_u, div=div, curl=curl,
        mass_w=mass_w, stiff_w=stiff_w, mass_p=mass_p,
        stokes=stokes, angular=angular,
        vel_bdofs=vel_bdofs, ang_bdofs=ang_bdofs,
    )
    state = State(
        u=u0, p=fem.zero_field(pres_space), w=w0, q=1.0, t=0.0, n=0,
        diagnostics={"S": None, "E": discrete_energy_coeffs(
            u0.coeffs, w0.coeffs, 1.0, systems, config)},
    )
    return state, systems


def _angular_solve(systems, rhs):
    rhs = rhs.copy()
    rhs[systems.ang_bdofs] = 0.0
    return systems.angular.solve(rhs)


def _forcing_loads(config, systems, t):
    load_f = (fem.assemble_load(config.forcing_f, systems.vel_space, t)
              if config.forcing_f is not None else 0.0)
    load_g = (fem.assemble_load(config.forcing_g, systems.ang_space, t)
              if config.forcing_g is not None else 0.0)
    return load_f, load_g


def solve_aux1(state, systems, config):
    """First sub-problem: previous-state and forcing contributions.

    The angular solve uses the freshly computed u1 (implicit curl coupling).
    """
    tau = config.tau
    t_new = state.t + tau
    load_f, load_g = _forcing_loads(config, systems, t_new)
    rhs_u = systems.mass_u @ state.u.coeffs / tau \
        + 2 * config.nu_r * (systems.curl.T @ state.w.coeffs) + load_f
    rhs_u[systems.vel_bdofs] = 0.0
    u1, p1 = systems.stokes.solve(rhs_u)
    rhs_w = (config.jmath / tau) * (systems.mass_w @ state.w.coeffs) \
        + 2 * config.nu_r * (systems.curl @ u1) + load_g
    w1 = _angular_solve(systems, rhs_w)
    return u1, p1, w1


def convection_loads(state, systems):
    """Explicit convection load vectors N_u = (u.grad u, phi) and
    N_w = (u.grad w, psi), computed once per step and shared between the
    second sub-problem and the scalar equation."""
    n_u = fem.assemble_convection_load(state.u, state.u, systems.vel_space)
    n_w = fem.assemble_convection_load(state.u, state.w, systems.ang_space)
    return n_u, n_w


def solve_aux2(state, systems, config, loads=None):
    """Second sub-problem: explicit convection contributions."""
    n_u, n_w = convection_loads(state, systems) if loads is None else loads
    rhs_u = -n_u.copy()
    rhs_u[systems.vel_bdofs] = 0.0
    u2, p2 = systems.stokes.solve(rhs_u)
    rhs_w = -config.jmath * n_w + 2 * config.nu_r * (systems.curl @ u2)
    w2 = _angular_solve(systems, rhs_w)
    return u2, p2, w2


def compute_S(state, config, loads, aux1, aux2):
    """Combination weight from the scalar equation.

    A_i = N_u . u_i + jmath * N_w . w_i reuses the convection loads from the
    second sub-problem. The bracket is positive in exact arithmetic; a
    nonpositive value indicates a solver or assembly failure.
    """
    tau, T = config.tau, config.T
    t_new = state.t + tau
    n_u, n_w = loads
    u1, _, w1 = aux1
    u2, _, w2 = aux2
    a1 = n_u @ u1 + config.jmath * (n_w @ w1)
    a2 = n_u @ u2 + config.jmath * (n_w @ w2)
    e = math.exp(t_new / T)
    bracket = (tau + T) / (tau * T) - e * e * a2
    if bracket <= 0:
        raise RuntimeError(
            f"nonpositive scalar-equation bracket {bracket:.3e} at t={t_new}"
        )
    s = (e * a1 + state.q / tau) / (bracket / e)
    return s, bracket


def _solve_aux_pair(state, systems, config, loads):
    """Both sub-problems in one batched Stokes solve and one batched angular
    solve (the two velocity right-hand sides depend only on the previous
    state, as do the angular ones once u1, u2 are known). Equivalent to
    solve_aux1 followed by solve_aux2."""
    tau = config.tau
    t_new = state.t + tau
    load_f, load_g = _forcing_loads(config, systems, t_new)
    n_u, n_w = loads
    rhs_u1 = systems.mass_u @ state.u.coeffs / tau \
        + 2 * config.nu_r * (systems.curl.T @ state.w.coeffs) + load_f
    rhs_u = np.column_stack([rhs_u1, -n_u])
    rhs_u[systems.vel_bdofs] = 0.0
    (u1, u2), (p1, p2) = (x.T for x in systems.stokes.solve(rhs_u))
    rhs_w1 = (config.jmath / tau) * (systems.mass_w @ state.w.coeffs) \
        + 2 * config.nu_r * (systems.curl @ u1) + load_g
    rhs_w2 = -config.jmath * n_w + 2 * config.nu_r * (systems.curl @ u2)
    rhs_w = np.column_stack([rhs_w1, rhs_w2])
    rhs_w[systems.ang_bdofs] = 0.0
    w1, w2 = systems.angular.solve(rhs_w).T
    return (u1, p1, w1), (u2, p2, w2)


def advance(state, systems, config):
    """One full time step; returns the new State."""
    tau = config.tau
    t_new = state.t + tau
    loads = convection_loads(state, systems)
    aux1, aux2 = _solve_aux_pair(state, systems, config, loads)
    s, bracket = compute_S(state, config, loads, aux1, aux2)

    u1, p1, w1 = aux1
    u2, p2, w2 = aux2
    u_new = u1 + s * u2
    p_new = p1 + s * p2
    w_new = w1 + s * w2
    # guard: p1, p2 are each mean-zero already
    mw = systems.stokes.mean_weights
    p_new = p_new - (mw @ p_new) / systems.stokes.domain_area
    q_new = s * math.exp(-t_new / config.T)

    new = State(
        u=Field(u_new, systems.vel_space),
        p=Field(p_new, systems.pres_space),
        w=Field(w_new, systems.ang_space),
        q=q_new, t=t_new, n=state.n + 1,
    )
    new.diagnostics = {
        "S": s,
        "bracket": bracket,
        "E": discrete_energy(new, systems, config),
    }
    return new


def discrete_energy_coeffs(u, w, q, systems, config):
    eu = 0.5 * (u @ (systems.mass_u @ u))
    ew = 0.5 * (config.jmath + 4 * config.tau * config.nu_r) * (w @ (systems.mass_w @ w))
    return eu + ew + 0.5 * q * q


def discrete_energy(state, systems, config):
    """Lyapunov functional of the scheme:
    E = 1/2 ||u||^2 + (jmath + 4 tau nu_r)/2 ||w||^2 + 1/2 q^2."""
    return discrete_energy_coeffs(state.u.coeffs, state.w.coeffs, state.q,
                                  systems, config)


def physical_energy(state, systems, config):
    """1/2 ||u||^2 + jmath/2 ||w||^2 (no auxiliary-scalar term)."""
    u, w = state.u.coeffs, state.w.coeffs
    return 0.5 * (u @ (systems.mass_u @ u)) \
        + 0.5 * config.jmath * (w @ (systems.mass_w @ w))


def energy_dissipation_residual(prev, next_state, systems, config):
    """r = (E^{n+1} - E^n) + tau*(nu ||grad u||^2 + c1 ||grad w||^2
    + c2 ||div w||^2) + (tau/T) q^2 at the new time level.

    For zero forcing the scheme guarantees r <= 0 (up to solver residuals);
    with forcing the sign is diagnostic only. The c2 term is zero for
    scalar w in 2D.
    """
    tau = config.tau
    u, w = next_state.u.coeffs, next_state.w.coeffs
    grad_u_sq = u @ (systems.stiff_u @ u)
    grad_w_sq = w @ (systems.stiff_w @ w)
    e_prev = discrete_energy(prev, systems, config)
    e_next = discrete_energy(next_state, systems, config)
    return (e_next - e_prev) + tau * (config.nu * grad_u_sq + config.c1 * grad_w_sq) \
        + (tau / config.T) * next_state.q ** 2
