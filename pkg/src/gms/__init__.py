"""Graph Mumford-Shah denoising on point clouds and its continuum-limit checks."""

__version__ = "0.1.0"

from .core import PointCloud, Solution, SolverConfig, ZetaSpec, zeta_derivative, zeta_value
from .energy import EnergyBreakdown, gms_energy, objective_sec1, objective_sec6
from .graph import SparseGraph, brute_force_graph, build_geometric_graph
from .solver import detect_edges, irls_minimize, solve_u, update_z

__all__ = [
    "PointCloud",
    "Solution",
    "SolverConfig",
    "ZetaSpec",
    "zeta_value",
    "zeta_derivative",
    "SparseGraph",
    "build_geometric_graph",
    "brute_force_graph",
    "EnergyBreakdown",
    "gms_energy",
    "objective_sec1",
    "objective_sec6",
    "update_z",
    "solve_u",
    "irls_minimize",
    "detect_edges",
]
