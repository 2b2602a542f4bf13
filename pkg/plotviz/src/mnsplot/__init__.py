"""Figure rendering for micropolar flow solver outputs (CSV and VTK)."""

from .plots import fitted_slopes, plot_convergence, plot_energy, plot_stirring
from .readers import SchemaError, read_energy_csv, read_table_csv, read_vtk

__all__ = [
    "fitted_slopes", "plot_convergence", "plot_energy", "plot_stirring",
    "SchemaError", "read_energy_csv", "read_table_csv", "read_vtk",
]

__version__ = "0.1.0"
