"""Coupling-strength certificates for frequency synchronization of Kuramoto oscillators."""
__version__ = "0.1.0"

from .bounds import (SyncCertificate, certificate, k_bound_analytic, k_bound_energy,
                     k_bound_ref3, k_bound_ref5, phase_constraint_flags)
from .dynamics import SimConfig, Trajectory, integrate, kuramoto_rhs, pis_check
from .graph import Graph, build_graph, make_topology
from .optimizer import PairProblem, brute_force_oracle, k_star, minimize_pair
from .state import FrequencyVector, center_phases, deviations

__all__ = [
    "FrequencyVector", "Graph", "PairProblem", "SimConfig", "SyncCertificate", "Trajectory",
    "brute_force_oracle", "build_graph", "center_phases", "certificate", "deviations",
    "integrate", "k_bound_analytic", "k_bound_energy", "k_bound_ref3", "k_bound_ref5",
    "k_star", "kuramoto_rhs", "make_topology", "minimize_pair", "phase_constraint_flags",
    "pis_check",
]
