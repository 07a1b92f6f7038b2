"""Tensor Laplacians and distributed saddle-point dynamics on multilayer networks."""

from .cost import (
    CostModel,
    CostTerm,
    QuadraticCost,
    analytic_optimum,
    global_gradient,
    global_value,
    make_cost,
    optimum,
)
from .dynamics import (
    ConsensusReport,
    FlowState,
    Trajectory,
    detect_consensus,
    diffusion_rhs,
    integrate_diffusion,
    integrate_saddle,
    lyapunov,
    saddle_point,
    saddle_rhs,
    stationarity_residual,
)
from .experiments import ExperimentManifest, SweepResult, builtin_manifest, run_experiment, run_sweep
from .laplacian import (
    LaplacianTensor,
    SupraIndexMap,
    algebraic_connectivity,
    build_laplacian,
    multidegree,
    multiplex_supra_laplacian,
    spectrum,
)
from .network import (
    MultilayerNetwork,
    NodeLayerId,
    build_paper_networks,
    is_connected,
    load_network,
    read_network,
    save_network,
    scaled_weight,
)
from .cli import main as cli_main

__version__ = "0.1.0"

__all__ = [
    "ConsensusReport",
    "CostModel",
    "CostTerm",
    "ExperimentManifest",
    "FlowState",
    "LaplacianTensor",
    "MultilayerNetwork",
    "NodeLayerId",
    "QuadraticCost",
    "SupraIndexMap",
    "SweepResult",
    "Trajectory",
    "algebraic_connectivity",
    "analytic_optimum",
    "build_laplacian",
    "build_paper_networks",
    "builtin_manifest",
    "cli_main",
    "detect_consensus",
    "diffusion_rhs",
    "global_gradient",
    "global_value",
    "integrate_diffusion",
    "integrate_saddle",
    "is_connected",
    "load_network",
    "lyapunov",
    "make_cost",
    "multidegree",
    "multiplex_supra_laplacian",
    "optimum",
    "read_network",
    "run_experiment",
    "run_sweep",
    "saddle_point",
    "saddle_rhs",
    "save_network",
    "scaled_weight",
    "spectrum",
    "stationarity_residual",
]
