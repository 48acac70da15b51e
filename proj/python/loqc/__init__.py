"""Constant-depth linear-optical compilation and exact simulation.

The heavy lifting happens in the C++ extension; this package re-exports its
surface: Fock-space simulation (permanents, distributions, sampling), the
graph-program compilers (naive8 and depth4), and the depth-2 chain
simulators.
"""

from ._core import (
    CZ_SUCCESS_PROBABILITY,
    Artifact,
    Circuit,
    FormatError,
    GraphProgram,
    InfeasiblePostselection,
    ResourceLimit,
    UnsupportedDepth,
    ValidationFailure,
    brickwork_graph,
    compile_depth4,
    compile_naive,
    exact_distribution_depth2,
    logical_distribution,
    output_distribution,
    permanent,
    postselected_distribution,
    sample,
    sample_depth2,
    transition_amplitude,
)

__all__ = [
    "CZ_SUCCESS_PROBABILITY",
    "Artifact",
    "Circuit",
    "FormatError",
    "GraphProgram",
    "InfeasiblePostselection",
    "ResourceLimit",
    "UnsupportedDepth",
    "ValidationFailure",
    "brickwork_graph",
    "compile_depth4",
    "compile_naive",
    "exact_distribution_depth2",
    "logical_distribution",
    "output_distribution",
    "permanent",
    "postselected_distribution",
    "sample",
    "sample_depth2",
    "transition_amplitude",
]
