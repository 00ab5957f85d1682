"""Transient heat conduction in layered slabs by the unified transform method.

Typical use::

    from layerheat import example_problem, solve
    field = solve(example_problem("A"), times=[0.1])
"""
from .assembly import assemble_imperfect, assemble_matrix, assemble_perfect, assemble_rhs, assemble_system
from .config import RunConfig, example_config, example_problem, load_config
from .contour import ContourGrid, Half, RealAxisGrid, contour_nodes, real_axis_nodes
from .errors import *  # noqa: F401,F403
from .evaluate import (
    ContourSettings,
    SolutionField,
    evaluate_flux,
    evaluate_initial_term,
    evaluate_solution,
    output_grid,
    solve,
    spectral_tables,
)
from .oracles import (
    ErrorReport,
    crank_nicolson,
    fourier_reference,
    fourier_series_solution,
    relative_error,
    steady_state_profile,
)
from .problem import (
    BoundarySpec,
    Constant,
    Cosine,
    Exponential,
    InterfaceKind,
    InterfaceSpec,
    LayerStack,
    Polynomial,
    PolynomialInX,
    Problem,
    Sampled,
    Sine,
    ValidatedProblem,
    make_problem,
    validate,
)
from .spectral import Provenance, SpectralTable, build_spectral_table, build_tables, solve_at_node
from .transforms import boundary_transform, initial_transform

__version__ = "0.1.0"
