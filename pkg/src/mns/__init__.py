"""2D incompressible micropolar Navier-Stokes solver with decoupled,
linear, unconditionally energy-stable IMEX time stepping driven by a
scalar auxiliary variable."""

from .mesh import Mesh, build_rect_mesh, edge_midpoints
from .fem import Field, FeSpace
from .stepper import Config, PreparedSystems, State, advance, init_stepper
from .transport import ScalarField, advect

__all__ = [
    "Mesh", "build_rect_mesh", "edge_midpoints",
    "Field", "FeSpace",
    "Config", "PreparedSystems", "State", "advance", "init_stepper",
    "ScalarField", "advect",
]

__version__ = "0.1.0"
