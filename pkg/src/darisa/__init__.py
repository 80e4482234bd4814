"""DARISA MIMO: channel synthesis, DoF analysis, and EDoF phase optimization."""

from .channel import (Cluster, ClusterSet, ChannelRealization, DegenerateClusterError,
                      DirectionSample, angle_to_wavenumber, generate_channel,
                      sample_cluster_directions)
from .composite import (CompositeChannel, PhaseSchedule, assemble_composite,
                        simulate_received)
from .dof import DofPrediction, SupportEllipse, composite_rank, scattering_dof, support_ellipse
from .geometry import ArrayConfig, ElementLayout, Side, element_positions
from .metrics import SpectrumReport, capacity_edof_approx, capacity_exact, spectrum
from .optimizer import (BracketError, DinkelbachRun, RelaxedSolution, SdrProblem,
                        build_sdr_problem, dinkelbach_bisect, dinkelbach_value,
                        gaussian_randomize, quantize_phases, solve_subproblem)

__version__ = "0.1.0"

__all__ = [
    "ArrayConfig", "ElementLayout", "Side", "element_positions",
    "Cluster", "ClusterSet", "ChannelRealization", "DirectionSample",
    "DegenerateClusterError", "angle_to_wavenumber", "sample_cluster_directions",
    "generate_channel",
    "SupportEllipse", "DofPrediction", "support_ellipse", "scattering_dof",
    "composite_rank",
    "PhaseSchedule", "CompositeChannel", "assemble_composite", "simulate_received",
    "SpectrumReport", "spectrum", "capacity_edof_approx", "capacity_exact",
    "SdrProblem", "RelaxedSolution", "DinkelbachRun", "BracketError",
    "build_sdr_problem", "solve_subproblem", "dinkelbach_value", "dinkelbach_bisect",
    "gaussian_randomize", "quantize_phases",
]
