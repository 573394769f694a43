"""Weak Galerkin EIT forward solver and TV-regularized reconstruction."""

from ._core import (
    InvalidArgument,
    Mesh,
    NumericalError,
    __version__,
    convergence_study,
    count_components,
    fgp_denoise,
    forward_map,
    reconstruct,
    synth_currents,
    tv_grid,
    uniform_mesh,
)

__all__ = [
    "InvalidArgument",
    "Mesh",
    "NumericalError",
    "__version__",
    "convergence_study",
    "count_components",
    "fgp_denoise",
    "forward_map",
    "reconstruct",
    "synth_currents",
    "tv_grid",
    "uniform_mesh",
]
